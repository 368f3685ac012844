"""Core domain types for keyframed goalkeeper clips.

Coordinates are normalized per frame: origin at the frame center, x divided by
half the width, y divided by half the height, y growing downward as in image
space. Points inside the frame land in [-1, 1]; annotations slightly outside
the frame are legal and survive round trips.

A clip is always reduced to exactly ten keyframes. Frame index, not wall time,
is the interpolation abscissa everywhere downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator, Mapping

FRAME_COUNT = 10

VALID_LABELS = ("hit", "miss")


class ValidationError(ValueError):
    """A domain value violated one of its invariants."""


class JointId(str, Enum):
    """The 13 tracked joints. Declaration order is the canonical order used
    for serialization, iteration, and deterministic tie-breaking."""

    HEAD = "head"
    LEFT_SHOULDER = "left_shoulder"
    RIGHT_SHOULDER = "right_shoulder"
    LEFT_ELBOW = "left_elbow"
    RIGHT_ELBOW = "right_elbow"
    LEFT_WRIST = "left_wrist"
    RIGHT_WRIST = "right_wrist"
    LEFT_HIP = "left_hip"
    RIGHT_HIP = "right_hip"
    LEFT_KNEE = "left_knee"
    RIGHT_KNEE = "right_knee"
    LEFT_ANKLE = "left_ankle"
    RIGHT_ANKLE = "right_ankle"

    @property
    def mirrored(self) -> "JointId":
        """The joint this one becomes under a left/right relabel."""
        return _MIRROR[self]


JOINT_ORDER: tuple[JointId, ...] = tuple(JointId)

_MIRROR: dict[JointId, JointId] = {JointId.HEAD: JointId.HEAD}
for _j in JOINT_ORDER:
    if _j.value.startswith("left_"):
        _MIRROR[_j] = JointId("right_" + _j.value[5:])
    elif _j.value.startswith("right_"):
        _MIRROR[_j] = JointId("left_" + _j.value[6:])


def _require_finite(value: float, what: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ValidationError(f"{what} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{what} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", _require_finite(self.x, "x"))
        object.__setattr__(self, "y", _require_finite(self.y, "y"))

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def translated(self, dx: float, dy: float) -> "Point2":
        return Point2(self.x + dx, self.y + dy)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class FrameDims:
    """Pixel dimensions of the source video frames."""

    width: int
    height: int

    def __post_init__(self) -> None:
        for name in ("width", "height"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v <= 0:
                raise ValidationError(f"{name} must be a positive integer, got {v!r}")


@dataclass(frozen=True)
class Skeleton:
    """A total mapping of all 13 joints to normalized positions.

    The head and the hip midpoint must not coincide exactly; they define the
    mirror axis used when the keeper dived the wrong way.
    """

    joints: Mapping[JointId, Point2]

    def __post_init__(self) -> None:
        fixed: dict[JointId, Point2] = {}
        for jid in JOINT_ORDER:
            if jid not in self.joints:
                raise ValidationError(f"skeleton missing joint {jid.value!r}")
            p = self.joints[jid]
            if not isinstance(p, Point2):
                raise ValidationError(f"joint {jid.value!r} must be a Point2, got {p!r}")
            fixed[jid] = p
        if len(self.joints) != len(JOINT_ORDER):
            extra = sorted(set(self.joints) - set(JOINT_ORDER), key=str)
            raise ValidationError(f"skeleton has unknown joints: {extra!r}")
        object.__setattr__(self, "joints", fixed)
        head = fixed[JointId.HEAD]
        mid = self.hip_midpoint()
        if head.x == mid.x and head.y == mid.y:
            raise ValidationError("head coincides with hip midpoint; mirror axis undefined")

    def __getitem__(self, joint: JointId) -> Point2:
        return self.joints[joint]

    def __iter__(self) -> Iterator[JointId]:
        return iter(JOINT_ORDER)

    def hip_midpoint(self) -> Point2:
        lh = self.joints[JointId.LEFT_HIP]
        rh = self.joints[JointId.RIGHT_HIP]
        return Point2((lh.x + rh.x) / 2.0, (lh.y + rh.y) / 2.0)

    def translated(self, dx: float, dy: float) -> "Skeleton":
        return Skeleton({j: p.translated(dx, dy) for j, p in self.joints.items()})

    def with_joint(self, joint: JointId, p: Point2) -> "Skeleton":
        updated = dict(self.joints)
        updated[joint] = p
        return Skeleton(updated)


@dataclass(frozen=True)
class Keyframe:
    """One annotated frame: keeper pose plus ball center, normalized."""

    index: int
    time: float
    skeleton: Skeleton
    ball: Point2
    ball_radius: float | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.index, int) or isinstance(self.index, bool):
            raise ValidationError(f"frame index must be an integer, got {self.index!r}")
        if not 0 <= self.index < FRAME_COUNT:
            raise ValidationError(
                f"frame index must be in 0..{FRAME_COUNT - 1}, got {self.index}"
            )
        t = _require_finite(self.time, "time")
        if t < 0:
            raise ValidationError(f"time must be >= 0, got {t!r}")
        object.__setattr__(self, "time", t)
        if self.ball_radius is not None:
            r = _require_finite(self.ball_radius, "ball_radius")
            if r <= 0:
                raise ValidationError(f"ball_radius must be > 0, got {r!r}")
            object.__setattr__(self, "ball_radius", r)


@dataclass(frozen=True)
class Sequence:
    """A ten-keyframe clip with its source geometry and outcome label."""

    frames: tuple[Keyframe, ...]
    dims: FrameDims
    label: str
    source_id: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "frames", tuple(self.frames))
        if len(self.frames) != FRAME_COUNT:
            raise ValidationError(
                f"sequence must have exactly {FRAME_COUNT} frames, got {len(self.frames)}"
            )
        for i, f in enumerate(self.frames):
            if not isinstance(f, Keyframe):
                raise ValidationError(f"frames[{i}] must be a Keyframe, got {f!r}")
            if f.index != i:
                raise ValidationError(f"frames[{i}] has index {f.index}, expected {i}")
            if i > 0 and not f.time > self.frames[i - 1].time:
                raise ValidationError(
                    f"frame times must be strictly increasing, frames[{i}] has "
                    f"time {f.time!r} after {self.frames[i - 1].time!r}"
                )
        if not isinstance(self.dims, FrameDims):
            raise ValidationError(f"dims must be FrameDims, got {self.dims!r}")
        if self.label not in VALID_LABELS:
            raise ValidationError(
                f"label must be one of {VALID_LABELS}, got {self.label!r}"
            )
        if not isinstance(self.source_id, str) or not self.source_id:
            raise ValidationError(f"source_id must be a non-empty string, got {self.source_id!r}")

    def with_frame(self, frame: Keyframe) -> "Sequence":
        updated = list(self.frames)
        updated[frame.index] = frame
        return replace(self, frames=tuple(updated))


def normalize_point(p: tuple[float, float], dims: FrameDims) -> Point2:
    """Map a pixel coordinate pair into the centered [-1, 1] frame space."""
    px = _require_finite(p[0], "pixel x")
    py = _require_finite(p[1], "pixel y")
    return Point2(
        (px - dims.width / 2.0) / (dims.width / 2.0),
        (py - dims.height / 2.0) / (dims.height / 2.0),
    )


def denormalize_point(p: Point2, dims: FrameDims) -> tuple[float, float]:
    """Exact inverse of normalize_point, back to pixel coordinates."""
    return (
        p.x * (dims.width / 2.0) + dims.width / 2.0,
        p.y * (dims.height / 2.0) + dims.height / 2.0,
    )


def sample_frame_indices(total_frames: int, n: int = FRAME_COUNT) -> list[int]:
    """Pick n evenly spaced frame indices from a clip of total_frames frames.

    Endpoints are always included. Raises when the clip has fewer frames than
    requested samples.
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ValidationError(f"n must be an integer >= 2, got {n!r}")
    if not isinstance(total_frames, int) or isinstance(total_frames, bool):
        raise ValidationError(f"total_frames must be an integer, got {total_frames!r}")
    if total_frames < n:
        raise ValidationError(
            f"clip too short: {total_frames} frames, need at least {n}"
        )
    # Exact .5 products cannot occur for the default n (parity of the
    # numerator forbids them), so round() never hits its banker's case.
    return [round(i * (total_frames - 1) / (n - 1)) for i in range(n)]
