"""Failure classification and the virtual goal frame.

A miss is classified by comparing the horizontal travel of the ball and of
the keeper between the first frame and the goal frame. The virtual goal frame
replaces the keeper's pose at the goal frame with one in which a chosen joint
sits exactly on the ball: the pose is mirrored first when the keeper dived
the wrong way, then rigidly translated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from keeperkit.model import (
    FRAME_COUNT,
    JOINT_ORDER,
    JointId,
    Point2,
    Sequence,
    Skeleton,
    ValidationError,
)

AXIS_EPSILON = 1e-9


class DirectionClass(str, Enum):
    SAME_DIRECTION = "same_direction"
    OPPOSITE_DIRECTION = "opposite_direction"
    MINIMAL_MOVEMENT = "minimal_movement"


@dataclass(frozen=True)
class DirectionThresholds:
    """Minimum horizontal travel, in normalized units, below which the ball
    or the keeper counts as not having moved."""

    ball_eps: float = 0.08
    keeper_eps: float = 0.05

    def __post_init__(self) -> None:
        if not self.ball_eps > 0 or not self.keeper_eps > 0:
            raise ValidationError("direction thresholds must be positive")


@dataclass(frozen=True)
class GoalRegion:
    """Axis-aligned goal mouth estimate in normalized coordinates."""

    left: float
    right: float
    top: float
    bottom: float

    def __post_init__(self) -> None:
        if not (self.left < self.right and self.top < self.bottom):
            raise ValidationError("goal region must have left < right and top < bottom")

    def contains(self, p: Point2) -> bool:
        return self.left <= p.x <= self.right and self.top <= p.y <= self.bottom

    def distance_to(self, p: Point2) -> float:
        dx = max(self.left - p.x, 0.0, p.x - self.right)
        dy = max(self.top - p.y, 0.0, p.y - self.bottom)
        return math.hypot(dx, dy)


@dataclass(frozen=True)
class GoalRegionConfig:
    """Margins used to grow the first-frame pose into a goal mouth estimate."""

    side_margin: float = 0.35
    top_margin: float = 0.20
    bottom_margin: float = 0.05


@dataclass(frozen=True)
class VirtualGoalFrame:
    """The synthesized target installed at the goal frame."""

    goal_index: int
    direction: DirectionClass
    blocking_joint: JointId
    mirrored: bool
    skeleton: Skeleton
    ball: Point2


def classify_direction(
    seq: Sequence,
    goal_index: int,
    thresholds: DirectionThresholds = DirectionThresholds(),
) -> DirectionClass:
    """Compare ball and keeper horizontal travel from frame 0 to the goal frame.

    The keeper's position is its hip midpoint. A ball that barely moved
    sideways means the keeper only had to stay put: minimal_movement. When
    the ball did travel, the save counts as same_direction only if the keeper
    committed the same way by a meaningful amount; everything else, including
    a keeper frozen on the line, is opposite_direction and gets mirrored.
    """
    _check_goal_index(goal_index)
    ball_dx = seq.frames[goal_index].ball.x - seq.frames[0].ball.x
    start_mid = seq.frames[0].skeleton.hip_midpoint()
    goal_mid = seq.frames[goal_index].skeleton.hip_midpoint()
    keeper_dx = goal_mid.x - start_mid.x
    if abs(ball_dx) < thresholds.ball_eps:
        return DirectionClass.MINIMAL_MOVEMENT
    if (ball_dx > 0) == (keeper_dx > 0) and abs(keeper_dx) >= thresholds.keeper_eps:
        return DirectionClass.SAME_DIRECTION
    return DirectionClass.OPPOSITE_DIRECTION


def mirror_skeleton(skeleton: Skeleton) -> Skeleton:
    """Reflect the pose across the head to hip-midpoint axis and swap
    left/right joint labels.

    The relabel makes the result a plausible pose for the keeper facing the
    other way rather than an anatomically inverted one. Applying the function
    twice returns the input up to floating point error.
    """
    head = skeleton[JointId.HEAD]
    mid = skeleton.hip_midpoint()
    ax, ay = mid.x - head.x, mid.y - head.y
    norm = math.hypot(ax, ay)
    if norm < AXIS_EPSILON:
        raise ValidationError("mirror axis degenerate: head and hip midpoint coincide")
    ux, uy = ax / norm, ay / norm
    mirrored: dict[JointId, Point2] = {}
    for jid in JOINT_ORDER:
        p = skeleton[jid]
        vx, vy = p.x - head.x, p.y - head.y
        dot = vx * ux + vy * uy
        rx = 2.0 * dot * ux - vx
        ry = 2.0 * dot * uy - vy
        mirrored[jid.mirrored] = Point2(head.x + rx, head.y + ry)
    return Skeleton(mirrored)


def select_blocking_joint(skeleton: Skeleton, ball: Point2) -> JointId:
    """The joint nearest the ball; canonical joint order breaks exact ties."""
    best = JOINT_ORDER[0]
    best_d = skeleton[best].distance_to(ball)
    for jid in JOINT_ORDER[1:]:
        d = skeleton[jid].distance_to(ball)
        if d < best_d:
            best, best_d = jid, d
    return best


def goal_region(seq: Sequence, config: GoalRegionConfig = GoalRegionConfig()) -> GoalRegion:
    """Estimate the goal mouth from the first-frame pose.

    The keeper starts on the line, so the mouth is the shoulder span grown
    sideways by a margin, from just above the head down to just below the
    ankles.
    """
    s = seq.frames[0].skeleton
    ls, rs = s[JointId.LEFT_SHOULDER], s[JointId.RIGHT_SHOULDER]
    mid_x = (ls.x + rs.x) / 2.0
    half = abs(ls.x - rs.x) / 2.0 + config.side_margin
    top = s[JointId.HEAD].y - config.top_margin
    bottom = max(s[JointId.LEFT_ANKLE].y, s[JointId.RIGHT_ANKLE].y) + config.bottom_margin
    return GoalRegion(mid_x - half, mid_x + half, top, bottom)


def choose_goal_index(
    seq: Sequence,
    region: GoalRegion | None = None,
    override: int | None = None,
) -> int:
    """Pick the goal frame: the moment the ball reaches the goal mouth.

    The first frame whose ball lies inside the region wins; if the ball never
    enters, the frame whose ball is nearest the region. Frame 0 is never a
    valid goal frame. An explicit override is validated and returned as is.
    """
    if override is not None:
        _check_goal_index(override)
        return override
    if region is None:
        region = goal_region(seq)
    for f in seq.frames[1:]:
        if region.contains(f.ball):
            return f.index
    best = min(seq.frames[1:], key=lambda f: (region.distance_to(f.ball), f.index))
    return best.index


def build_virtual_goal_frame(
    seq: Sequence,
    goal_index: int,
    joint_override: JointId | None = None,
    thresholds: DirectionThresholds = DirectionThresholds(),
) -> VirtualGoalFrame:
    """Synthesize the pose the keeper should have held at the goal frame.

    opposite_direction poses are mirrored before placement. The blocking
    joint, chosen on the placement-ready pose unless overridden, is pinned to
    the ball position exactly: the whole skeleton is rigidly translated and
    the blocking joint is then assigned the ball coordinates verbatim so no
    floating point residue survives.
    """
    _check_goal_index(goal_index)
    direction = classify_direction(seq, goal_index, thresholds)
    mirrored = direction is DirectionClass.OPPOSITE_DIRECTION
    pose = seq.frames[goal_index].skeleton
    if mirrored:
        pose = mirror_skeleton(pose)
    ball = seq.frames[goal_index].ball
    joint = joint_override if joint_override is not None else select_blocking_joint(pose, ball)
    anchor = pose[joint]
    translated = pose.translated(ball.x - anchor.x, ball.y - anchor.y)
    pinned = translated.with_joint(joint, Point2(ball.x, ball.y))
    return VirtualGoalFrame(
        goal_index=goal_index,
        direction=direction,
        blocking_joint=joint,
        mirrored=mirrored,
        skeleton=pinned,
        ball=ball,
    )


def _check_goal_index(goal_index: int) -> None:
    if not isinstance(goal_index, int) or isinstance(goal_index, bool):
        raise ValidationError(f"goal index must be an integer, got {goal_index!r}")
    if not 1 <= goal_index < FRAME_COUNT:
        raise ValidationError(
            f"goal index must be in 1..{FRAME_COUNT - 1}, got {goal_index}"
        )
