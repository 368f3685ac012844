#!/usr/bin/env python3
"""Generate the test clips under fixtures/ and freeze the optimizer traces.

Three staged misses, one per direction class. Every clip is checked before
it is written: the classifier, the goal-frame heuristic, and the blocking
joint must come out as intended, and the default optimizer settings must
converge. The displacement traces land in fixtures/golden_traces.json with
full float precision so regression tests can compare exactly.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from keeperkit.document import save_sequence
from keeperkit.goalframe import DirectionClass
from keeperkit.model import FrameDims, JointId, Keyframe, Point2, Sequence, Skeleton
from keeperkit.pipeline import correct_sequence

DIMS = FrameDims(1280, 720)
FIXTURES = ROOT / "fixtures"

# rest pose, keeper facing the camera; left-side joints at negative x
BASE = {
    JointId.HEAD: (0.0, -0.55),
    JointId.LEFT_SHOULDER: (-0.14, -0.38),
    JointId.RIGHT_SHOULDER: (0.14, -0.38),
    JointId.LEFT_ELBOW: (-0.22, -0.22),
    JointId.RIGHT_ELBOW: (0.22, -0.22),
    JointId.LEFT_WRIST: (-0.26, -0.06),
    JointId.RIGHT_WRIST: (0.26, -0.06),
    JointId.LEFT_HIP: (-0.09, -0.02),
    JointId.RIGHT_HIP: (0.09, -0.02),
    JointId.LEFT_KNEE: (-0.10, 0.28),
    JointId.RIGHT_KNEE: (0.10, 0.28),
    JointId.LEFT_ANKLE: (-0.11, 0.58),
    JointId.RIGHT_ANKLE: (0.11, 0.58),
}


def skeleton(cx: float, overrides: dict[JointId, tuple[float, float]] | None = None) -> Skeleton:
    pose = dict(BASE)
    if overrides:
        pose.update(overrides)
    return Skeleton({jid: Point2(x + cx, y) for jid, (x, y) in pose.items()})


def sequence(source_id: str, skeletons, balls, ball_radius: float) -> Sequence:
    frames = tuple(
        Keyframe(
            index=i,
            time=0.2 * i,
            skeleton=skeletons[i],
            ball=Point2(*balls[i]),
            ball_radius=ball_radius,
        )
        for i in range(10)
    )
    return Sequence(frames=frames, dims=DIMS, label="hit", source_id=source_id)


def same_direction_clip() -> Sequence:
    """Keeper steps toward the ball and raises the near arm, but not enough."""
    cx = [0.0, 0.02, 0.05, 0.08, 0.10, 0.12, 0.13, 0.14, 0.145, 0.15]
    skels = []
    for i in range(10):
        u = min(i, 4) / 4.0  # arm fully raised by the goal frame
        skels.append(
            skeleton(
                cx[i],
                {
                    JointId.RIGHT_ELBOW: (0.22, -0.22 - 0.28 * u),
                    JointId.RIGHT_WRIST: (0.26 - 0.02 * u, -0.06 - 0.56 * u),
                },
            )
        )
    balls = []
    ys = [-1.02, -0.93, -0.855, -0.79, -0.66]
    for i in range(10):
        x = -0.22 + 0.13 * i if i <= 4 else 0.30 + 0.02 * (i - 4)
        y = ys[i] if i <= 4 else -0.66 + 0.06 * (i - 4)
        balls.append((x, y))
    return sequence("staged-same-direction", skels, balls, ball_radius=0.02)


def opposite_direction_clip() -> Sequence:
    """Keeper glides the wrong way with arms up; the corrected pose mirrors."""
    cx = [0.0, -0.01, -0.03, -0.055, -0.08, -0.095, -0.105, -0.11, -0.113, -0.115]
    arms = {
        JointId.LEFT_ELBOW: (-0.22, -0.40),
        JointId.RIGHT_ELBOW: (0.22, -0.40),
        JointId.LEFT_WRIST: (-0.26, -0.59),
        JointId.RIGHT_WRIST: (0.26, -0.57),
    }
    skels = [skeleton(cx[i], arms) for i in range(10)]
    balls = []
    ys = [-1.0, -0.93, -0.86, -0.78, -0.61, -0.55, -0.50, -0.46, -0.43, -0.41]
    for i in range(10):
        x = -0.25 + 0.1125 * i if i <= 4 else 0.20 + 0.02 * (i - 4)
        balls.append((x, ys[i]))
    return sequence("staged-opposite-direction", skels, balls, ball_radius=0.018)


def minimal_movement_clip() -> Sequence:
    """Ball drops nearly straight in; the keeper only has to reach up."""
    cx = [0.0, 0.01, -0.005, 0.008, 0.0, -0.01, 0.005, 0.0, 0.008, -0.005]
    wrist_y = [-0.20, -0.34, -0.46, -0.56, -0.62, -0.62, -0.62, -0.62, -0.62, -0.62]
    elbow_y = [-0.22, -0.31, -0.40, -0.46, -0.50, -0.50, -0.50, -0.50, -0.50, -0.50]
    skels = [
        skeleton(
            cx[i],
            {
                JointId.LEFT_ELBOW: (-0.20, elbow_y[i]),
                JointId.RIGHT_ELBOW: (0.20, elbow_y[i]),
                JointId.LEFT_WRIST: (-0.16, wrist_y[i]),
                JointId.RIGHT_WRIST: (0.16, wrist_y[i]),
            },
        )
        for i in range(10)
    ]
    balls = []
    ys = [-1.05, -0.97, -0.90, -0.79, -0.66, -0.60, -0.55, -0.51, -0.48, -0.46]
    for i in range(10):
        x = 0.10 + 0.012 * i if i <= 4 else 0.148 + 0.01 * (i - 4)
        balls.append((x, ys[i]))
    return sequence("staged-minimal-movement", skels, balls, ball_radius=0.022)


CLIPS = {
    "same_direction": (same_direction_clip, DirectionClass.SAME_DIRECTION, False),
    "opposite_direction": (opposite_direction_clip, DirectionClass.OPPOSITE_DIRECTION, True),
    "minimal_movement": (minimal_movement_clip, DirectionClass.MINIMAL_MOVEMENT, False),
}


def main() -> int:
    FIXTURES.mkdir(exist_ok=True)
    golden: dict[str, dict] = {}
    for name, (build, expected_direction, expect_mirrored) in CLIPS.items():
        seq = build()
        result = correct_sequence(seq)
        goal = result.goal
        report = result.report

        assert goal.direction is expected_direction, (
            f"{name}: classified {goal.direction}, wanted {expected_direction}"
        )
        assert goal.goal_index == 4, f"{name}: goal frame {goal.goal_index}, wanted 4"
        assert goal.mirrored is expect_mirrored, f"{name}: mirrored={goal.mirrored}"
        assert goal.blocking_joint is JointId.RIGHT_WRIST, (
            f"{name}: blocking joint {goal.blocking_joint}"
        )
        assert report.converged, (
            f"{name}: did not converge, trace={list(report.displacement_trace)}"
        )
        assert report.displacement_trace[-1] < 1e-6
        corrected_pin = result.corrected.frames[4].skeleton[goal.blocking_joint]
        ball = seq.frames[4].ball
        assert corrected_pin.x == ball.x and corrected_pin.y == ball.y, f"{name}: pin failed"

        save_sequence(seq, FIXTURES / f"{name}.json")
        golden[name] = {
            "goal_index": goal.goal_index,
            "direction": goal.direction.value,
            "blocking_joint": goal.blocking_joint.value,
            "mirrored": goal.mirrored,
            "iterations_run": report.iterations_run,
            "converged": report.converged,
            "displacement_trace": list(report.displacement_trace),
        }
        print(
            f"{name}: direction={goal.direction.value} goal=4 "
            f"blocking={goal.blocking_joint.value} iterations={report.iterations_run} "
            f"final={report.displacement_trace[-1]:.3e}"
        )

    (FIXTURES / "golden_traces.json").write_text(json.dumps(golden, indent=2) + "\n")
    print(f"wrote {len(CLIPS)} clips and golden_traces.json to {FIXTURES}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
