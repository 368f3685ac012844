"""End-to-end correction: classify the miss, pick the goal frame, build the
virtual goal frame, run the optimizer. Shared by the CLI and the service."""

from __future__ import annotations

from dataclasses import dataclass

from keeperkit.goalframe import (
    DirectionThresholds,
    GoalRegionConfig,
    VirtualGoalFrame,
    build_virtual_goal_frame,
    choose_goal_index,
    goal_region,
)
from keeperkit.model import JointId, Sequence
from keeperkit.optimizer import OptimizeReport, OptimizerConfig, optimize


@dataclass(frozen=True)
class CorrectionResult:
    corrected: Sequence
    goal: VirtualGoalFrame
    report: OptimizeReport


def correct_sequence(
    seq: Sequence,
    goal_index: int | None = None,
    blocking_joint: JointId | None = None,
    config: OptimizerConfig = OptimizerConfig(),
    thresholds: DirectionThresholds = DirectionThresholds(),
    region_config: GoalRegionConfig = GoalRegionConfig(),
) -> CorrectionResult:
    g = choose_goal_index(seq, region=goal_region(seq, region_config), override=goal_index)
    goal = build_virtual_goal_frame(seq, g, joint_override=blocking_joint, thresholds=thresholds)
    corrected, report = optimize(seq, goal, config)
    return CorrectionResult(corrected=corrected, goal=goal, report=report)


def report_obj(result: CorrectionResult) -> dict:
    """The correction report in its serialized form."""
    return {
        "direction": result.goal.direction.value,
        "goal_index": result.goal.goal_index,
        "blocking_joint": result.goal.blocking_joint.value,
        "mirrored": result.goal.mirrored,
        "iterations_run": result.report.iterations_run,
        "converged": result.report.converged,
        "displacement_trace": list(result.report.displacement_trace),
    }
