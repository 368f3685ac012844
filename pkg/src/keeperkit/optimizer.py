"""Iterative per-coordinate quadratic smoothing toward the virtual goal frame.

Every joint coordinate is treated as a scalar function of frame index. Each
pass rewrites every frame except frame 0 and the goal frame G with the value
of the Lagrange quadratic through its two neighbor frames and the goal frame,
evaluated at the frame's own index.

Frames are swept in ascending index order and updated in place, so a frame
late in the sweep reads values already refreshed earlier in the same pass.
The in-place sweep contracts the per-pass displacement toward zero; a
simultaneous update that reads only the previous pass amplifies deviations
near the end of the clip (the extrapolation weights past G exceed 1 in
magnitude) and never settles. The traversal order is fixed, so results are
bit-for-bit reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Hashable, Sequence as Seq

from keeperkit.goalframe import VirtualGoalFrame
from keeperkit.model import (
    FRAME_COUNT,
    JOINT_ORDER,
    JointId,
    Point2,
    Sequence,
    Skeleton,
    ValidationError,
)

_BALL_KEY = "__ball__"


@dataclass(frozen=True)
class InterpolationNode:
    """One sample for quadratic interpolation: abscissa t (frame index as a
    real number) and ordinate v (one scalar coordinate)."""

    t: float
    v: float

    def __post_init__(self) -> None:
        for name in ("t", "v"):
            x = getattr(self, name)
            if not isinstance(x, (int, float)) or isinstance(x, bool) or not math.isfinite(x):
                raise ValidationError(f"interpolation node {name} must be finite, got {x!r}")


@dataclass(frozen=True)
class OptimizerConfig:
    iterations: int = 10
    convergence_tol: float = 1e-6
    interpolate_ball: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.iterations, int) or isinstance(self.iterations, bool):
            raise ValidationError(f"iterations must be an integer, got {self.iterations!r}")
        if self.iterations < 1:
            raise ValidationError(f"iterations must be >= 1, got {self.iterations}")
        tol = self.convergence_tol
        if not isinstance(tol, (int, float)) or isinstance(tol, bool) or not math.isfinite(tol):
            raise ValidationError(f"convergence_tol must be finite, got {tol!r}")
        if tol < 0:
            raise ValidationError(f"convergence_tol must be >= 0, got {tol!r}")


@dataclass(frozen=True)
class OptimizeReport:
    """Per-iteration maximum coordinate displacement, in normalized units."""

    displacement_trace: tuple[float, ...]
    iterations_run: int
    converged: bool


def _lagrange(t: float, ta: float, va: float, tb: float, vb: float, tg: float, vg: float) -> float:
    # Term order and grouping are frozen: golden traces depend on the exact
    # floating point evaluation sequence.
    wa = ((t - tg) * (t - tb)) / ((ta - tg) * (ta - tb))
    wb = ((t - ta) * (t - tg)) / ((tb - ta) * (tb - tg))
    wg = ((t - ta) * (t - tb)) / ((tg - ta) * (tg - tb))
    return va * wa + vb * wb + vg * wg


def quadratic_interpolate(
    a: InterpolationNode,
    b: InterpolationNode,
    g: InterpolationNode,
    t_i: float,
) -> float:
    """Evaluate the Lagrange quadratic through nodes a, b, g at t_i."""
    if a.t == b.t or a.t == g.t or b.t == g.t:
        raise ValidationError("degenerate interpolation nodes: abscissas must be distinct")
    if not isinstance(t_i, (int, float)) or isinstance(t_i, bool) or not math.isfinite(t_i):
        raise ValidationError(f"t_i must be finite, got {t_i!r}")
    return _lagrange(float(t_i), a.t, a.v, b.t, b.v, g.t, g.v)


def neighbor_indices(i: int, goal_index: int, n_frames: int = FRAME_COUNT) -> tuple[int, int]:
    """The two support frames used when rewriting frame i.

    Default is (i-1, i+1). When i is the last frame, or one of the defaults
    would be the goal frame, the pattern shifts to stay on valid frames; any
    remaining collision falls back to the two nearest indices not in {i, G},
    ties broken away from the goal frame.
    """
    for name, v in (("i", i), ("goal_index", goal_index), ("n_frames", n_frames)):
        if not isinstance(v, int) or isinstance(v, bool):
            raise ValidationError(f"{name} must be an integer, got {v!r}")
    last = n_frames - 1
    if not 1 <= goal_index <= last:
        raise ValidationError(f"goal_index must be in 1..{last}, got {goal_index}")
    if not 1 <= i <= last:
        raise ValidationError(f"i must be in 1..{last}, got {i}")
    if i == goal_index:
        raise ValidationError("frame i is the goal frame; it is never rewritten")

    if i == last or i + 1 == goal_index:
        cand = (i - 2, i - 1)
    elif i - 1 == goal_index:
        cand = (i + 1, i + 2)
    else:
        cand = (i - 1, i + 1)
    if (
        cand[0] != cand[1]
        and all(0 <= c <= last and c != i and c != goal_index for c in cand)
    ):
        return cand
    valid = [j for j in range(n_frames) if j != i and j != goal_index]
    if len(valid) < 2:
        raise ValidationError("fewer than two valid neighbor frames exist")
    valid.sort(key=lambda j: (abs(j - i), -abs(j - goal_index), j))
    lo, hi = sorted(valid[:2])
    return (lo, hi)


def _goal_skeleton(goal: VirtualGoalFrame | Skeleton) -> Skeleton:
    return goal.skeleton if isinstance(goal, VirtualGoalFrame) else goal


def _sweep(
    values: list[dict[Hashable, list[float]]],
    goal_index: int,
    keys: Seq[Hashable],
) -> float:
    """One ascending in-place pass. Returns the max per-coordinate change."""
    n = len(values)
    max_disp = 0.0
    for f in range(1, n):
        if f == goal_index:
            continue
        a, b = neighbor_indices(f, goal_index, n)
        t = float(f)
        ta, tb, tg = float(a), float(b), float(goal_index)
        frame = values[f]
        for key in keys:
            coords = frame[key]
            for axis in (0, 1):
                new = _lagrange(
                    t,
                    ta, values[a][key][axis],
                    tb, values[b][key][axis],
                    tg, values[goal_index][key][axis],
                )
                disp = abs(new - coords[axis])
                if disp > max_disp:
                    max_disp = disp
                coords[axis] = new
    return max_disp


def _track_to_values(track: Seq[Skeleton]) -> list[dict[Hashable, list[float]]]:
    return [{jid: [s[jid].x, s[jid].y] for jid in JOINT_ORDER} for s in track]


def _values_to_skeleton(frame: dict[Hashable, list[float]]) -> Skeleton:
    return Skeleton({jid: Point2(frame[jid][0], frame[jid][1]) for jid in JOINT_ORDER})


def optimize_iteration(
    track: Seq[Skeleton],
    goal_index: int,
    goal: VirtualGoalFrame | Skeleton,
) -> list[Skeleton]:
    """Run one smoothing pass over a skeleton track.

    The goal pose is installed at goal_index first (a no-op when the caller
    already did). Frames 0 and goal_index come back unchanged, by identity.
    """
    track = list(track)
    if not 1 <= goal_index < len(track):
        raise ValidationError(
            f"goal_index must be in 1..{len(track) - 1}, got {goal_index}"
        )
    goal_pose = _goal_skeleton(goal)
    track[goal_index] = goal_pose
    values = _track_to_values(track)
    _sweep(values, goal_index, JOINT_ORDER)
    out = [_values_to_skeleton(frame) for frame in values]
    out[0] = track[0]
    out[goal_index] = goal_pose
    return out


def optimize(
    seq: Sequence,
    goal: VirtualGoalFrame,
    cfg: OptimizerConfig = OptimizerConfig(),
) -> tuple[Sequence, OptimizeReport]:
    """Smooth the whole sequence into the virtual goal frame.

    Installs goal.skeleton at the goal frame, then sweeps until the maximum
    per-coordinate change in a pass drops below cfg.convergence_tol or the
    iteration cap is hit. Ball positions are reused untouched unless
    cfg.interpolate_ball is set, in which case the ball track is smoothed the
    same way (frames 0 and G stay fixed regardless).
    """
    g = goal.goal_index
    if not 1 <= g < len(seq.frames):
        raise ValidationError(f"goal_index must be in 1..{len(seq.frames) - 1}, got {g}")
    keys: list[Hashable] = list(JOINT_ORDER)
    values = _track_to_values([f.skeleton for f in seq.frames])
    values[g] = {jid: [goal.skeleton[jid].x, goal.skeleton[jid].y] for jid in JOINT_ORDER}
    if cfg.interpolate_ball:
        keys.append(_BALL_KEY)
        for f in seq.frames:
            values[f.index][_BALL_KEY] = [f.ball.x, f.ball.y]

    trace: list[float] = []
    converged = False
    for _ in range(cfg.iterations):
        disp = _sweep(values, g, keys)
        trace.append(disp)
        if disp < cfg.convergence_tol:
            converged = True
            break

    frames = list(seq.frames)
    for idx in range(len(frames)):
        if idx == 0:
            continue
        if idx == g:
            frames[idx] = replace(frames[idx], skeleton=goal.skeleton)
            continue
        new_skeleton = _values_to_skeleton(values[idx])
        if cfg.interpolate_ball:
            bx, by = values[idx][_BALL_KEY]
            frames[idx] = replace(frames[idx], skeleton=new_skeleton, ball=Point2(bx, by))
        else:
            frames[idx] = replace(frames[idx], skeleton=new_skeleton)
    corrected = replace(seq, frames=tuple(frames))
    report = OptimizeReport(
        displacement_trace=tuple(trace),
        iterations_run=len(trace),
        converged=converged,
    )
    return corrected, report
