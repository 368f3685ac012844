"""The on-disk sequence format: versioned JSON, validated with field paths.

A document stores one ten-keyframe clip with normalized coordinates at full
float precision. Coordinates are expected near [-1, 1]; the validator allows
up to |4| so corrected poses reaching outside the frame still round-trip,
while raw pixel values (hundreds) are caught as unit mix-ups.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from keeperkit.model import (
    FRAME_COUNT,
    JOINT_ORDER,
    FrameDims,
    Keyframe,
    Point2,
    Sequence,
    Skeleton,
    VALID_LABELS,
    ValidationError,
)

SCHEMA_VERSION = 1
COORD_LIMIT = 4.0


class DocumentError(ValueError):
    """A sequence document failed validation. errors holds one entry per
    violation, each prefixed with the offending field path."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid sequence document: " + "; ".join(self.errors))


def _is_number(v: object) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _check_pair(v: object, path: str, errors: list[str]) -> bool:
    if not isinstance(v, list) or len(v) != 2:
        errors.append(f"{path}: must be a pair [x, y]")
        return False
    ok = True
    for axis, comp in enumerate(v):
        if not _is_number(comp):
            errors.append(f"{path}[{axis}]: must be a finite number, got {comp!r}")
            ok = False
        elif abs(comp) > COORD_LIMIT:
            errors.append(
                f"{path}[{axis}]: {comp!r} is outside the normalized range "
                f"(|value| must be <= {COORD_LIMIT}; pixel coordinates must be normalized first)"
            )
            ok = False
    return ok


def validate_obj(obj: object) -> list[str]:
    """Validate a decoded document. Returns all violations, field paths first."""
    errors: list[str] = []
    if not isinstance(obj, dict):
        return [f"document: must be a JSON object, got {type(obj).__name__}"]

    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        errors.append(f"schema_version: must be {SCHEMA_VERSION}, got {version!r}")

    source_id = obj.get("source_id")
    if not isinstance(source_id, str) or not source_id:
        errors.append(f"source_id: must be a non-empty string, got {source_id!r}")

    label = obj.get("label")
    if label not in VALID_LABELS:
        errors.append(f"label: must be one of {list(VALID_LABELS)}, got {label!r}")

    dims = obj.get("dims")
    if not isinstance(dims, dict):
        errors.append(f"dims: must be an object with width and height, got {dims!r}")
    else:
        for name in ("width", "height"):
            v = dims.get(name)
            if not isinstance(v, int) or isinstance(v, bool) or v <= 0:
                errors.append(f"dims.{name}: must be a positive integer, got {v!r}")

    frames = obj.get("frames")
    if not isinstance(frames, list):
        errors.append(f"frames: must be a list of {FRAME_COUNT} frames")
        return errors
    if len(frames) != FRAME_COUNT:
        errors.append(f"frames: expected exactly {FRAME_COUNT} frames, got {len(frames)}")

    prev_time: float | None = None
    for i, frame in enumerate(frames):
        path = f"frames[{i}]"
        if not isinstance(frame, dict):
            errors.append(f"{path}: must be an object")
            continue
        index = frame.get("index")
        if index != i:
            errors.append(f"{path}.index: must be {i}, got {index!r}")
        time = frame.get("time")
        if not _is_number(time) or time < 0:
            errors.append(f"{path}.time: must be a number >= 0, got {time!r}")
        else:
            if prev_time is not None and time <= prev_time:
                errors.append(
                    f"{path}.time: must be strictly greater than the previous "
                    f"frame's time ({time!r} <= {prev_time!r})"
                )
            prev_time = float(time)

        joints = frame.get("joints")
        if not isinstance(joints, dict):
            errors.append(f"{path}.joints: must be an object with all 13 joints")
        else:
            for jid in JOINT_ORDER:
                if jid.value not in joints:
                    errors.append(f"{path}.joints.{jid.value}: missing")
                else:
                    _check_pair(joints[jid.value], f"{path}.joints.{jid.value}", errors)
            known = {j.value for j in JOINT_ORDER}
            for name in joints:
                if name not in known:
                    errors.append(f"{path}.joints.{name}: unknown joint name")

        if "ball" not in frame:
            errors.append(f"{path}.ball: missing")
        else:
            _check_pair(frame["ball"], f"{path}.ball", errors)

        radius = frame.get("ball_radius")
        if radius is not None and (not _is_number(radius) or radius <= 0 or radius > COORD_LIMIT):
            errors.append(
                f"{path}.ball_radius: must be a number in (0, {COORD_LIMIT}], got {radius!r}"
            )
    return errors


def sequence_from_obj(obj: object) -> Sequence:
    errors = validate_obj(obj)
    if errors:
        raise DocumentError(errors)
    assert isinstance(obj, dict)
    try:
        return _build_sequence(obj)
    except ValidationError as exc:
        # constraints the schema walk cannot see, e.g. a head placed exactly
        # on the hip midpoint
        raise DocumentError([str(exc)]) from exc


def _build_sequence(obj: dict) -> Sequence:
    frames = []
    for i, frame in enumerate(obj["frames"]):
        joints = {
            jid: Point2(frame["joints"][jid.value][0], frame["joints"][jid.value][1])
            for jid in JOINT_ORDER
        }
        frames.append(
            Keyframe(
                index=i,
                time=float(frame["time"]),
                skeleton=Skeleton(joints),
                ball=Point2(frame["ball"][0], frame["ball"][1]),
                ball_radius=frame.get("ball_radius"),
            )
        )
    return Sequence(
        frames=tuple(frames),
        dims=FrameDims(obj["dims"]["width"], obj["dims"]["height"]),
        label=obj["label"],
        source_id=obj["source_id"],
    )


def sequence_to_obj(seq: Sequence) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "source_id": seq.source_id,
        "label": seq.label,
        "dims": {"width": seq.dims.width, "height": seq.dims.height},
        "frames": [
            {
                "index": f.index,
                "time": f.time,
                "joints": {jid.value: [f.skeleton[jid].x, f.skeleton[jid].y] for jid in JOINT_ORDER},
                "ball": [f.ball.x, f.ball.y],
                **({"ball_radius": f.ball_radius} if f.ball_radius is not None else {}),
            }
            for f in seq.frames
        ],
    }


def load_sequence(path: Path | str) -> Sequence:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DocumentError([f"cannot read {path}: {exc}"]) from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError([f"{path}: not valid JSON ({exc})"]) from exc
    return sequence_from_obj(obj)


def save_sequence(seq: Sequence, path: Path | str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(sequence_to_obj(seq), indent=2) + "\n")
