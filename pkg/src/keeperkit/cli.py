"""Command-line entry points: validate, correct, render, import, serve.

Every failure prints one line to stderr prefixed with "error: " and exits
nonzero; success exits 0.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from keeperkit.document import (
    DocumentError,
    load_sequence,
    save_sequence,
    sequence_to_obj,
)
from keeperkit.model import FrameDims, JointId, ValidationError
from keeperkit.optimizer import OptimizerConfig
from keeperkit.pipeline import correct_sequence, report_obj
from keeperkit.render import RenderConfig, render_sequence, write_render_outputs
from keeperkit.session import SessionError, SessionStore, create_session_from_import


def _cmd_validate(args: argparse.Namespace) -> int:
    load_sequence(args.sequence)
    print(f"ok: {args.sequence} is a valid sequence document")
    return 0


def _parse_joint_arg(name: str | None) -> JointId | None:
    if name is None:
        return None
    try:
        return JointId(name)
    except ValueError:
        raise ValidationError(
            f"unknown joint {name!r}; valid joints: " + ", ".join(j.value for j in JointId)
        ) from None


def _cmd_correct(args: argparse.Namespace) -> int:
    seq = load_sequence(args.sequence)
    cfg = OptimizerConfig(
        iterations=args.iterations,
        convergence_tol=args.tolerance,
        interpolate_ball=args.interpolate_ball,
    )
    result = correct_sequence(
        seq,
        goal_index=args.goal_frame,
        blocking_joint=_parse_joint_arg(args.blocking_joint),
        config=cfg,
    )
    save_sequence(result.corrected, args.out)
    report = report_obj(result)
    if args.report is not None:
        Path(args.report).parent.mkdir(parents=True, exist_ok=True)
        Path(args.report).write_text(json.dumps(report, indent=2) + "\n")
    final = report["displacement_trace"][-1] if report["displacement_trace"] else 0.0
    print(
        f"corrected {args.sequence} -> {args.out}: "
        f"direction={report['direction']} goal_index={report['goal_index']} "
        f"blocking_joint={report['blocking_joint']} mirrored={report['mirrored']} "
        f"iterations={report['iterations_run']} converged={report['converged']} "
        f"final_displacement={final:.3e}"
    )
    return 0


def _cmd_render(args: argparse.Namespace) -> int:
    seq = load_sequence(args.sequence)
    corrected = load_sequence(args.corrected) if args.corrected else None
    cfg = RenderConfig(
        window_width=args.width,
        window_height=args.height,
        magnification=args.magnification,
        goalpost_offset=args.goalpost_offset,
        goalpost_height=args.goalpost_height,
        skip_last_frame=not args.no_skip_last,
        ball_color=args.ball_color,
        frame_interval_ms=args.interval_ms,
    )
    result = render_sequence(seq, corrected, cfg)
    paths = write_render_outputs(result, args.out_dir)
    print(f"wrote {len(paths) - 1} frame documents and 1 animation to {args.out_dir}")
    return 0


def _cmd_import(args: argparse.Namespace) -> int:
    store = SessionStore(args.data_dir)
    dims = None
    if args.width is not None and args.height is not None:
        dims = FrameDims(args.width, args.height)
    session = create_session_from_import(
        store,
        detections_dir=args.detections_dir,
        images_dir=args.images_dir,
        dims=dims,
        source_id=args.source_id,
        label=args.label,
    )
    print(
        f"created session {session.session_id} in {store.session_dir(session.session_id)} "
        f"({session.dims.width}x{session.dims.height}, label={session.label})"
    )
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from keeperkit.service import create_app

    app = create_app(args.data_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="keeperkit",
        description="Correct keyframed goalkeeper motion so the keeper meets the ball.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a sequence document against the schema")
    p.add_argument("sequence", help="path to a sequence document")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("correct", help="run the correction pipeline on a sequence document")
    p.add_argument("sequence", help="path to a sequence document")
    p.add_argument("--out", required=True, help="path for the corrected document")
    p.add_argument("--report", help="optional path for the JSON report")
    p.add_argument("--goal-frame", type=int, default=None, help="override the goal frame index (1..9)")
    p.add_argument("--blocking-joint", default=None, help="override the blocking joint by name")
    p.add_argument("--iterations", type=int, default=10, help="iteration cap (default 10)")
    p.add_argument("--tolerance", type=float, default=1e-6, help="convergence tolerance (default 1e-6)")
    p.add_argument("--interpolate-ball", action="store_true", help="also smooth the ball track")
    p.set_defaults(handler=_cmd_correct)

    p = sub.add_parser("render", help="render a sequence to vector frames and a GIF")
    p.add_argument("sequence", help="path to a sequence document")
    p.add_argument("--corrected", help="optional corrected document drawn over the original")
    p.add_argument("--out-dir", required=True, help="output directory")
    p.add_argument("--width", type=int, default=2500, help="render window width (default 2500)")
    p.add_argument("--height", type=int, default=1200, help="render window height (default 1200)")
    p.add_argument("--magnification", type=float, default=1.0, help="scale factor (default 1.0)")
    p.add_argument("--goalpost-offset", type=float, default=5.0, help="goalpost width offset (default 5)")
    p.add_argument("--goalpost-height", type=float, default=5.0, help="goalpost height (default 5)")
    p.add_argument("--interval-ms", type=int, default=200, help="animation frame interval (default 200)")
    p.add_argument("--ball-color", default="white", help="ball fill color (default white)")
    p.add_argument("--no-skip-last", action="store_true", help="also render the last frame")
    p.set_defaults(handler=_cmd_render)

    p = sub.add_parser("import", help="create an annotation session from detections and images")
    p.add_argument("--detections-dir", required=True, help="directory with 10 detection JSON files")
    p.add_argument("--images-dir", default=None, help="directory with 10 frame images")
    p.add_argument("--data-dir", required=True, help="session store directory")
    p.add_argument("--width", type=int, default=None, help="frame width (required without images)")
    p.add_argument("--height", type=int, default=None, help="frame height (required without images)")
    p.add_argument("--source-id", default=None, help="clip identifier")
    p.add_argument("--label", default="hit", choices=["hit", "miss"], help="outcome label")
    p.set_defaults(handler=_cmd_import)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--data-dir", required=True, help="session store directory")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui-dir", default=None, help="directory with built UI assets to serve at /")
    p.set_defaults(handler=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ValidationError, DocumentError, SessionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
