"""End-to-end checks for every guarantee the toolkit advertises.

One test per guarantee. Each prints a single verdict line so a verbose run
reads as a checklist, and the assertion carries the same condition. Counts
and tolerances here are the contract; do not loosen them to make a red
check green.
"""

from __future__ import annotations

import json
import math
import os
import random
import struct
import subprocess
import sys
import time
from fractions import Fraction

from fastapi.testclient import TestClient

from conftest import FIXTURES, SRC, TEMPLATE_POSE, build_skeleton, build_sequence
from keeperkit.document import load_sequence
from keeperkit.goalframe import build_virtual_goal_frame, mirror_skeleton
from keeperkit.model import (
    JOINT_ORDER,
    FrameDims,
    Point2,
    Sequence,
    Skeleton,
    ValidationError,
    denormalize_point,
    normalize_point,
)
from keeperkit.optimizer import (
    InterpolationNode,
    OptimizerConfig,
    neighbor_indices,
    optimize,
    optimize_iteration,
    quadratic_interpolate,
)
from keeperkit.pipeline import correct_sequence, report_obj
from keeperkit.service import create_app


def _verdict(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[acceptance] {name}: {status}{suffix}")
    assert ok, f"{name}{suffix}"


def _bits(*values: float) -> bytes:
    return struct.pack(f"<{len(values)}d", *values)


def _skeleton_bits(s: Skeleton) -> bytes:
    flat: list[float] = []
    for jid in JOINT_ORDER:
        p = s[jid]
        flat.extend((p.x, p.y))
    return _bits(*flat)


def _random_sequence(rng: random.Random) -> Sequence:
    skels = []
    for _ in range(10):
        pose = {
            jid: (x + rng.uniform(-0.05, 0.05), y + rng.uniform(-0.05, 0.05))
            for jid, (x, y) in TEMPLATE_POSE.items()
        }
        skels.append(
            build_skeleton(dx=rng.uniform(-0.3, 0.3), dy=rng.uniform(-0.2, 0.2), pose=pose)
        )
    balls = [(rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)) for _ in range(10)]
    return build_sequence(skeletons=skels, balls=balls)


def _random_skeleton(rng: random.Random) -> Skeleton:
    while True:
        dx, dy = rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)
        joints = {
            jid: Point2(x + dx + rng.uniform(-0.35, 0.35), y + dy + rng.uniform(-0.35, 0.35))
            for jid, (x, y) in TEMPLATE_POSE.items()
        }
        try:
            return Skeleton(joints)
        except ValidationError:
            continue


def _fixture_clips() -> list[Sequence]:
    paths = sorted(p for p in FIXTURES.glob("*.json") if p.name != "golden_traces.json")
    return [load_sequence(p) for p in paths]


def test_endpoint_frames_never_move():
    """The first frame and the goal frame survive optimization bit for bit."""
    rng = random.Random(411)
    bad = None
    for trial in range(500):
        seq = _random_sequence(rng)
        g = rng.randrange(1, 10)
        goal = build_virtual_goal_frame(seq, g)
        cfg = OptimizerConfig(interpolate_ball=bool(trial % 2))
        corrected, _ = optimize(seq, goal, cfg)
        same = (
            _skeleton_bits(corrected.frames[0].skeleton) == _skeleton_bits(seq.frames[0].skeleton)
            and _skeleton_bits(corrected.frames[g].skeleton) == _skeleton_bits(goal.skeleton)
            and _bits(corrected.frames[0].ball.x, corrected.frames[0].ball.y)
            == _bits(seq.frames[0].ball.x, seq.frames[0].ball.y)
            and _bits(corrected.frames[g].ball.x, corrected.frames[g].ball.y)
            == _bits(seq.frames[g].ball.x, seq.frames[g].ball.y)
        )
        if not same:
            bad = f"trial {trial}, goal frame {g}"
            break
    _verdict(
        "endpoint frames stay bit-identical",
        bad is None,
        bad or "500 random sequences, both ball modes",
    )


def test_blocking_joint_meets_ball_exactly():
    """After correction the blocking joint sits on the ball, distance zero."""
    rng = random.Random(412)
    clips = _fixture_clips() + [_random_sequence(rng) for _ in range(100)]
    worst = 0.0
    for seq in clips:
        result = correct_sequence(seq)
        g = result.goal.goal_index
        pin = result.corrected.frames[g].skeleton[result.goal.blocking_joint]
        worst = max(worst, pin.distance_to(seq.frames[g].ball))
    _verdict(
        "blocking joint lands on the ball exactly",
        worst == 0.0,
        f"{len(clips)} clips, max distance {worst!r}",
    )


def test_quadratic_tracks_are_fixed_points():
    """A track already quadratic in the frame index passes through a sweep unchanged."""
    rng = random.Random(413)
    worst = 0.0
    for _ in range(100):
        g = rng.randrange(1, 10)
        track = None
        while track is None:
            coeffs = {
                (jid, axis): (
                    rng.uniform(-0.04, 0.04),
                    rng.uniform(-0.25, 0.25),
                    rng.uniform(-0.8, 0.8),
                )
                for jid in JOINT_ORDER
                for axis in range(2)
            }

            def value(jid, axis, i):
                a, b, c = coeffs[(jid, axis)]
                return (a * i + b) * i + c

            try:
                track = [
                    Skeleton({jid: Point2(value(jid, 0, i), value(jid, 1, i)) for jid in JOINT_ORDER})
                    for i in range(10)
                ]
            except ValidationError:
                track = None
        out = optimize_iteration(track, g, track[g])
        for i in range(10):
            for jid in JOINT_ORDER:
                worst = max(
                    worst,
                    abs(out[i][jid].x - track[i][jid].x),
                    abs(out[i][jid].y - track[i][jid].y),
                )
    _verdict(
        "quadratic tracks are sweep fixed points",
        worst <= 1e-9,
        f"max drift {worst:.3e} over 100 tracks",
    )


def test_fixture_clips_converge_and_match_recorded_traces():
    """Every staged clip converges under default settings and reproduces its
    recorded displacement trace."""
    golden = json.loads((FIXTURES / "golden_traces.json").read_text())
    problems = []
    if len(golden) != 3:
        problems.append(f"expected 3 recorded clips, found {len(golden)}")
    for name, expected in sorted(golden.items()):
        rep = report_obj(correct_sequence(load_sequence(FIXTURES / f"{name}.json")))
        trace = rep["displacement_trace"]
        if not (rep["converged"] and rep["iterations_run"] <= 10 and trace[-1] < 1e-6):
            problems.append(f"{name}: did not converge, trace={trace}")
            continue
        for key in ("goal_index", "direction", "blocking_joint", "mirrored", "iterations_run"):
            if rep[key] != expected[key]:
                problems.append(f"{name}: {key} {rep[key]!r} != {expected[key]!r}")
        want = expected["displacement_trace"]
        if len(trace) != len(want):
            problems.append(f"{name}: trace length {len(trace)} != {len(want)}")
        else:
            drift = max(abs(a - b) for a, b in zip(trace, want))
            if drift > 1e-9:
                problems.append(f"{name}: trace drift {drift:.3e}")
    _verdict(
        "fixture clips converge and match recorded traces",
        not problems,
        "; ".join(problems) or "3 clips, final displacement < 1e-6, trace drift <= 1e-9",
    )


def test_correction_runs_quickly():
    """A full default correction of a 10-frame clip finishes in under a second."""
    seq = load_sequence(FIXTURES / "same_direction.json")
    correct_sequence(seq)  # warm caches before timing
    best = math.inf
    for _ in range(3):
        start = time.perf_counter()
        correct_sequence(seq)
        best = min(best, time.perf_counter() - start)
    _verdict("full correction under one second", best < 1.0, f"best of 3: {best * 1000:.2f} ms")


def test_mirror_is_an_involutive_isometry():
    """Mirroring twice restores the pose; mirroring once preserves all
    inter-joint distances (modulo the left/right relabeling)."""
    rng = random.Random(414)
    pairs = [(a, b) for ai, a in enumerate(JOINT_ORDER) for b in JOINT_ORDER[ai + 1 :]]
    worst_inv = 0.0
    worst_iso = 0.0
    for _ in range(1000):
        s = _random_skeleton(rng)
        m = mirror_skeleton(s)
        mm = mirror_skeleton(m)
        for jid in JOINT_ORDER:
            worst_inv = max(worst_inv, abs(mm[jid].x - s[jid].x), abs(mm[jid].y - s[jid].y))
        for a, b in pairs:
            worst_iso = max(
                worst_iso,
                abs(m[a].distance_to(m[b]) - s[a.mirrored].distance_to(s[b.mirrored])),
            )
    _verdict(
        "mirroring is an involutive isometry",
        worst_inv <= 1e-9 and worst_iso <= 1e-9,
        f"1000 skeletons, involution {worst_inv:.3e}, isometry {worst_iso:.3e}",
    )


def test_pixel_round_trip_and_click_storage(tmp_path):
    """Pixel/normalized conversion round-trips, and the annotation service
    stores a click exactly as its normalized form."""
    rng = random.Random(415)
    dims_pool = [
        FrameDims(1280, 720),
        FrameDims(1920, 1080),
        FrameDims(640, 360),
        FrameDims(999, 555),
    ]
    worst = 0.0
    for _ in range(2000):
        dims = rng.choice(dims_pool)
        px = (rng.uniform(0, dims.width), rng.uniform(0, dims.height))
        n = normalize_point(px, dims)
        back = denormalize_point(n, dims)
        worst = max(worst, abs(back[0] - px[0]), abs(back[1] - px[1]))
        start = Point2(rng.uniform(-1, 1), rng.uniform(-1, 1))
        again = normalize_point(denormalize_point(start, dims), dims)
        worst = max(worst, abs(again.x - start.x), abs(again.y - start.y))

    dims = FrameDims(1280, 720)
    client = TestClient(create_app(tmp_path / "data"))
    created = client.post(
        "/api/v1/sessions",
        json={"width": dims.width, "height": dims.height, "source_id": "acc", "label": "miss"},
    ).json()
    sid, version = created["session_id"], created["version"]
    clicks: dict[str, list[float]] = {}
    for jid in JOINT_ORDER:
        pixel = [rng.uniform(0, dims.width), rng.uniform(0, dims.height)]
        clicks[jid.value] = pixel
        r = client.post(
            f"/api/v1/sessions/{sid}/frames/0/joints",
            json={"joint": jid.value, "pixel": pixel, "version": version},
        )
        version = r.json()["version"]
    stored = client.get(f"/api/v1/sessions/{sid}").json()["frames"][0]["skeleton"]
    exact = all(
        stored[name] == [normalize_point((p[0], p[1]), dims).x, normalize_point((p[0], p[1]), dims).y]
        for name, p in clicks.items()
    )
    _verdict(
        "pixel round trip and click storage",
        worst <= 1e-9 and exact,
        f"round-trip error {worst:.3e}, 13 service clicks stored exactly",
    )


def _det3(m: list[list[Fraction]]) -> Fraction:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def _vandermonde_fit(ts: list[float], vs: list[float], t: float) -> float:
    """Fit a quadratic by solving the 3x3 Vandermonde system with Cramer's
    rule in exact rational arithmetic, then evaluate it at t. Exact up to the
    single final rounding, so it can anchor a 1e-12 comparison."""
    rows = [[Fraction(x) * Fraction(x), Fraction(x), Fraction(1)] for x in ts]
    rhs = [Fraction(v) for v in vs]
    det = _det3(rows)
    coeffs = []
    for col in range(3):
        m = [row[:] for row in rows]
        for r in range(3):
            m[r][col] = rhs[r]
        coeffs.append(_det3(m) / det)
    x = Fraction(t)
    return float((coeffs[0] * x + coeffs[1]) * x + coeffs[2])


def test_interpolation_matches_vandermonde_solve():
    """The closed-form quadratic agrees with solving the Vandermonde system."""
    rng = random.Random(20260816)
    worst = 0.0
    for _ in range(10000):
        ts = [float(t) for t in rng.sample(range(10), 3)]
        vs = [rng.uniform(-1.5, 1.5) for _ in range(3)]
        t = rng.uniform(0.0, 9.0)
        want = _vandermonde_fit(ts, vs, t)
        got = quadratic_interpolate(
            InterpolationNode(ts[0], vs[0]),
            InterpolationNode(ts[1], vs[1]),
            InterpolationNode(ts[2], vs[2]),
            t,
        )
        worst = max(worst, abs(got - want))
    _verdict(
        "interpolation matches a Vandermonde solve",
        worst <= 1e-12,
        f"max |difference| {worst:.3e} over 10000 node triples",
    )


def test_neighbor_choice_matches_exhaustive_search():
    """The support-node rules agree with brute-force nearest-two search at
    every frame/goal combination."""
    mismatches = []
    for g in range(1, 10):
        for i in range(1, 10):
            if i == g:
                continue
            valid = [j for j in range(10) if j != i and j != g]
            want = tuple(sorted(sorted(valid, key=lambda j: (abs(j - i), -abs(j - g), j))[:2]))
            got = neighbor_indices(i, g)
            if got != want:
                mismatches.append(f"(i={i}, goal={g}): {got} != {want}")
    _verdict(
        "neighbor choice matches exhaustive search",
        not mismatches,
        "; ".join(mismatches) or "all 72 frame/goal pairs",
    )


def test_cli_reports_failures_by_field(tmp_path):
    """The command line exits nonzero on bad input and names the offending
    field on stderr."""
    env = {**os.environ, "PYTHONPATH": str(SRC)}

    def run(*args: str):
        return subprocess.run(
            [sys.executable, "-m", "keeperkit", *args],
            capture_output=True,
            text=True,
            env=env,
        )

    good = FIXTURES / "same_direction.json"
    checks: list[tuple[str, bool]] = []

    r = run("validate", str(good))
    checks.append(("valid document exits 0", r.returncode == 0 and "ok" in r.stdout))

    obj = json.loads(good.read_text())
    obj["frames"][2]["joints"]["head"] = [0.1]
    bad_head = tmp_path / "bad_head.json"
    bad_head.write_text(json.dumps(obj))
    r = run("validate", str(bad_head))
    checks.append(
        (
            "broken joint named on stderr",
            r.returncode == 1
            and r.stderr.startswith("error:")
            and "frames[2].joints.head" in r.stderr,
        )
    )

    obj = json.loads(good.read_text())
    del obj["frames"][5]["ball"]
    no_ball = tmp_path / "no_ball.json"
    no_ball.write_text(json.dumps(obj))
    r = run("validate", str(no_ball))
    checks.append(
        ("missing ball named on stderr", r.returncode == 1 and "frames[5].ball" in r.stderr)
    )

    r = run("correct", str(good), "--out", str(tmp_path / "out.json"), "--goal-frame", "0")
    checks.append(
        ("bad goal frame rejected", r.returncode == 1 and "goal" in r.stderr.lower())
    )

    r = run("validate", str(tmp_path / "missing.json"))
    checks.append(("unreadable file reported", r.returncode == 1 and "cannot read" in r.stderr))

    failed = [name for name, ok in checks if not ok]
    _verdict(
        "command line names offending fields",
        not failed,
        "; ".join(failed) or f"{len(checks)} invocations checked",
    )
