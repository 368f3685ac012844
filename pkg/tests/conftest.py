import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

SRC = Path(__file__).resolve().parent.parent / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from keeperkit.model import (  # noqa: E402
    FrameDims,
    JointId,
    Keyframe,
    Point2,
    Sequence,
    Skeleton,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# Upright keeper pose in normalized, y-down coordinates. left_* joints sit at
# negative x (viewer left).
TEMPLATE_POSE: dict[JointId, tuple[float, float]] = {
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


def build_skeleton(dx: float = 0.0, dy: float = 0.0, pose: dict | None = None) -> Skeleton:
    base = pose if pose is not None else TEMPLATE_POSE
    return Skeleton({jid: Point2(x + dx, y + dy) for jid, (x, y) in base.items()})


def build_sequence(
    skeletons: list[Skeleton] | None = None,
    balls: list[tuple[float, float]] | None = None,
    dims: FrameDims = FrameDims(1280, 720),
    label: str = "hit",
    source_id: str = "test-clip",
) -> Sequence:
    if skeletons is None:
        skeletons = [build_skeleton() for _ in range(10)]
    if balls is None:
        balls = [(-0.5 + 0.1 * i, -0.3) for i in range(10)]
    frames = tuple(
        Keyframe(
            index=i,
            time=0.2 * i,
            skeleton=skeletons[i],
            ball=Point2(balls[i][0], balls[i][1]),
        )
        for i in range(10)
    )
    return Sequence(frames=frames, dims=dims, label=label, source_id=source_id)


def coords(lo: float = -1.0, hi: float = 1.0):
    return st.floats(min_value=lo, max_value=hi, allow_nan=False, allow_infinity=False)


@st.composite
def skeletons(draw, lo: float = -1.0, hi: float = 1.0):
    joints = {jid: Point2(draw(coords(lo, hi)), draw(coords(lo, hi))) for jid in JointId}
    head = joints[JointId.HEAD]
    mid_x = (joints[JointId.LEFT_HIP].x + joints[JointId.RIGHT_HIP].x) / 2.0
    mid_y = (joints[JointId.LEFT_HIP].y + joints[JointId.RIGHT_HIP].y) / 2.0
    # Keep the mirror axis well-defined so reflection error stays far below
    # the 1e-9 tolerances.
    if (head.x - mid_x) ** 2 + (head.y - mid_y) ** 2 < 1e-6:
        joints[JointId.HEAD] = Point2(head.x + 0.5, head.y + 0.5)
    return Skeleton(joints)


def frame_dims():
    return st.builds(
        FrameDims,
        st.integers(min_value=1, max_value=8192),
        st.integers(min_value=1, max_value=8192),
    )


@pytest.fixture
def template_sequence() -> Sequence:
    return build_sequence()
