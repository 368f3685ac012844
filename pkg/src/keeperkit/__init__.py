"""Toolkit for correcting keyframed goalkeeper motion so the keeper meets the ball.

The pipeline: ingest per-frame pose detections, annotate ten keyframes with a
human in the loop, classify how the save failed, synthesize a virtual goal
frame in which a chosen joint blocks the ball, then iteratively smooth the
remaining frames into that target with per-coordinate quadratic interpolation.
"""

from keeperkit.model import (
    FrameDims,
    JointId,
    Keyframe,
    Point2,
    Sequence,
    Skeleton,
    ValidationError,
    denormalize_point,
    normalize_point,
    sample_frame_indices,
)
from keeperkit.goalframe import (
    DirectionClass,
    DirectionThresholds,
    VirtualGoalFrame,
    build_virtual_goal_frame,
    classify_direction,
    mirror_skeleton,
    select_blocking_joint,
)
from keeperkit.optimizer import (
    OptimizerConfig,
    OptimizeReport,
    neighbor_indices,
    optimize,
    optimize_iteration,
    quadratic_interpolate,
)

__all__ = [
    "DirectionClass",
    "DirectionThresholds",
    "FrameDims",
    "JointId",
    "Keyframe",
    "OptimizeReport",
    "OptimizerConfig",
    "Point2",
    "Sequence",
    "Skeleton",
    "ValidationError",
    "VirtualGoalFrame",
    "build_virtual_goal_frame",
    "classify_direction",
    "denormalize_point",
    "mirror_skeleton",
    "neighbor_indices",
    "normalize_point",
    "optimize",
    "optimize_iteration",
    "quadratic_interpolate",
    "sample_frame_indices",
    "select_blocking_joint",
]
