"""End-to-end acceptance checks.

Each test records one PASS/FAIL line through the ``accept`` fixture; the
session summary prints one line per criterion. Criteria that are not met
fail honestly with the measured numbers in the line.
"""

import itertools
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from localhom import datagen
from localhom.complexes import build_rips, filtration_is_valid, is_face_closed, local_vertex_sets
from localhom.geometry import PointCloud
from localhom.homology import boundary_of_order, cone_oracle_rank, image_rank, relative_betti
from localhom.oracles import dense_betti, relative_boundary
from localhom.pipeline import (Kind, ScheduleError, alpha_max, check_strict, estimate_dimension, manual_schedule,
                               parameter_schedule, theta1)
from localhom.pointio import write_points
from localhom.verify import random_instance

CIRCLE = (0.06, 0.5, 0.9, 1.4)
S2_SCHEDULE = (0.05, 0.35, 0.55, 0.65)
S3_SCHEDULE = (0.0075, 0.05, 0.06, 0.065)
SHIFT_SCHEDULE = (5.0, 25.0, 32.0, 36.0)


def wrong_n(report, truth):
    return sum(c for n, c in report.sphere_tallies.items() if n != truth)


def test_oracle_equivalence(accept):
    rng = np.random.default_rng(2024)
    t = time.perf_counter()
    count, agree, nonzero = 200, 0, 0
    for _ in range(count):
        pair = random_instance(rng).pair()
        img = image_rank(pair)
        if img == cone_oracle_rank(pair):
            agree += 1
        nonzero += any(img)
    secs = time.perf_counter() - t
    ok = agree == count and secs < 60
    accept(1, ok, f"image rank vs coning route: {agree}/{count} agree ({nonzero} with nonzero rank), {secs:.1f} s")
    assert ok


def test_relative_betti_matches_dense(accept):
    rng = np.random.default_rng(7)
    checked = mismatched = 0
    while checked < 120:
        pair = random_instance(rng).pair()
        if len(pair.A1) > 200:
            continue
        kmax = pair.dim_cap - 1
        checked += 1
        if relative_betti(pair) != dense_betti(pair.A1.simplices, pair.B1.simplices, kmax, None):
            mismatched += 1
    ok = mismatched == 0
    accept(2, ok, f"relative Betti vs dense elimination: {checked - mismatched}/{checked} exact")
    assert ok


def test_circle_golden(accept):
    t = time.perf_counter()
    rep = estimate_dimension(datagen.circle(60), manual_schedule(*CIRCLE), "all", truth=1)
    secs = time.perf_counter() - t
    ok = (rep.sphere_tallies == {1: 60} and rep.estimated_dimension == 1
          and rep.count(Kind.NON_SPHERE) == 0 and secs < 10)
    accept(3, ok, f"circle(60) at {CIRCLE}: tallies {rep.sphere_tallies}, "
                  f"non-sphere {rep.count(Kind.NON_SPHERE)}, {secs:.1f} s")
    assert ok


def test_sphere_cap_two(accept):
    cloud = datagen.sphere_cap(2, 1.43, 0.05, seed=0)
    t = time.perf_counter()
    rep = estimate_dimension(cloud, manual_schedule(*S2_SCHEDULE, k_max=2), "sparse:0.45", truth=2)
    secs = time.perf_counter() - t
    ok = rep.estimated_dimension == 2 and wrong_n(rep, 2) == 0 and rep.correct_ratio == 1.0 and secs < 1800
    accept(4, ok, f"S2 cap {cloud.n} pts: estimate {rep.estimated_dimension}, tallies {rep.sphere_tallies}, "
                  f"trivial {rep.count(Kind.TRIVIAL)}, non-sphere {rep.count(Kind.NON_SPHERE)}, {secs:.0f} s")
    assert ok


def test_sphere_cap_three(accept):
    cloud = datagen.sphere_cap(3, 0.13, 0.0125, seed=0)
    # base points nearest the pole, where the cap looks most like a full 3-ball
    polar = np.arccos(np.clip(cloud.points[:, 0], -1, 1))
    bases = [int(i) for i in np.argsort(polar)[:5]]
    t = time.perf_counter()
    rep = estimate_dimension(cloud, manual_schedule(*S3_SCHEDULE, k_max=3), "all", truth=3, base_points=bases)
    secs = time.perf_counter() - t
    ok = rep.estimated_dimension == 3 and wrong_n(rep, 3) == 0 and rep.correct_ratio == 1.0 and secs < 1800
    accept(4, ok, f"S3 cap {cloud.n} pts at {S3_SCHEDULE}: estimate {rep.estimated_dimension}, "
                  f"tallies {rep.sphere_tallies}, trivial {rep.count(Kind.TRIVIAL)}, "
                  f"skipped {rep.count(Kind.SKIPPED)} of {len(bases)}, {secs:.0f} s")
    assert ok


def test_shift_family(accept):
    cloud = datagen.shift_images()
    off = datagen.shift_offsets()
    # offsets near the middle of the 40 x 56 translation grid
    mid = np.array([19.5, 27.5])
    bases = [int(i) for i in np.argsort(np.linalg.norm(off - mid, axis=1))[:3]]
    t = time.perf_counter()
    rep = estimate_dimension(cloud, manual_schedule(*SHIFT_SCHEDULE, k_max=2), "all", truth=2, base_points=bases)
    secs = time.perf_counter() - t
    top = rep.sphere_tallies.get(2, 0)
    share = top / rep.valid if rep.valid else 0.0
    ok = rep.estimated_dimension == 2 and share >= 0.7 and secs < 600
    accept(5, ok, f"shift family {cloud.n} pts at {SHIFT_SCHEDULE}: estimate {rep.estimated_dimension}, "
                  f"tallies {rep.sphere_tallies}, skipped {rep.count(Kind.SKIPPED)} of {len(bases)}, {secs:.0f} s")
    assert ok


def _random_cloud(rng, n_max=10, d_max=3):
    n = int(rng.integers(2, n_max + 1))
    return PointCloud(rng.uniform(-1, 1, (n, int(rng.integers(1, d_max + 1)))))


def _brute_cliques(cloud, t, cap):
    out = set()
    for k in range(1, min(cap + 1, cloud.n) + 1):
        for s in itertools.combinations(range(cloud.n), k):
            if all(np.linalg.norm(cloud.points[a] - cloud.points[b]) <= t for a, b in itertools.combinations(s, 2)):
                out.add(s)
    return out


def _boundary_squares_to_zero(order):
    mat = boundary_of_order(order)
    for col in mat.columns:
        acc = set()
        for i in col:
            acc ^= set(mat.columns[i])
        if acc:
            return False
    return True


def _relative_squares_to_zero(A, B, kmax):
    for k in range(1, kmax + 1):
        d1, _, _ = relative_boundary(A, B, k)
        d2, _, _ = relative_boundary(A, B, k + 1)
        if d1.size and d2.size and np.any((d1.astype(int) @ d2.astype(int)) % 2):
            return False
    return True


def test_property_suites(accept):
    rng = np.random.default_rng(99)
    trials = 100
    passed = dict.fromkeys(["vertex chain", "face closure", "clique oracle", "boundary squared",
                            "filtration", "reorder"], 0)
    for _ in range(trials):
        cloud = _random_cloud(rng)
        p = int(rng.integers(cloud.n))
        a = float(rng.uniform(0.02, 0.3))
        e1 = 3 * a + float(rng.uniform(0.0, 0.8))
        e2 = e1 + float(rng.uniform(0.01, 0.8))
        r = e2 + float(rng.uniform(0.01, 0.8))
        va1, vb1, va2, vb2 = (set(map(int, v)) for v in local_vertex_sets(cloud, p, a, e1, e2, r))
        passed["vertex chain"] += vb1 <= va1 <= va2 and vb1 <= vb2 <= va2

        t = float(rng.uniform(0.1, 2.0))
        rips = build_rips(cloud, range(cloud.n), t, 3)
        passed["face closure"] += is_face_closed(rips.simplices)
        passed["clique oracle"] += set(rips.simplices) == _brute_cliques(cloud, t, 3)

        pair = random_instance(rng).pair()
        passed["boundary squared"] += (_boundary_squares_to_zero(pair.A2.simplices)
                                       and _relative_squares_to_zero(pair.A1.simplices, pair.B1.simplices, 2)
                                       and _relative_squares_to_zero(pair.A2.simplices, pair.B2.simplices, 2))
        passed["filtration"] += filtration_is_valid(pair)
        passed["reorder"] += image_rank(pair.reordered(rng)) == image_rank(pair)
    ok = all(v == trials for v in passed.values())
    accept(6, ok, ", ".join(f"{k} {v}/{trials}" for k, v in passed.items()))
    assert ok


def test_schedule_invariants(accept):
    rng = np.random.default_rng(5)
    valid = rejected = 0
    for _ in range(1000):
        rho = float(10 ** rng.uniform(-3, 3))
        eps = float(rng.uniform(1e-6, 1.0)) * rho / 58
        s = parameter_schedule(eps, rho)
        ok = theta1(eps, rho) <= s.alpha <= alpha_max(eps, rho)
        ok = ok and s.eta1 >= 9 * s.alpha + 4 * eps and s.eta2 >= s.eta1 + 12 * s.alpha + 6 * eps
        ok = ok and s.r >= s.eta1 + s.eta2 and eps < s.eta1 < rho and eps < s.eta2 < rho
        try:
            check_strict(eps, rho, s.alpha, s.eta1, s.eta2, s.r)
        except ScheduleError:
            ok = False
        valid += ok
        try:
            parameter_schedule(rho / 58 * float(rng.uniform(1.0, 10.0)), rho)
        except ScheduleError:
            rejected += 1
    ok = valid == 1000 and rejected == 1000
    accept(7, ok, f"strict schedules valid {valid}/1000, coarse sampling rejected {rejected}/1000")
    assert ok


def test_cli_json_deterministic(accept, tmp_path):
    pts = tmp_path / "circle.csv"
    write_points(datagen.circle(60), pts)
    args = [sys.executable, "-m", "localhom", "estimate", str(pts), "--alpha", "0.06", "--eta1", "0.5",
            "--eta2", "0.9", "--r", "1.4", "--base", "sparse:0.3", "--seed", "17"]
    runs = [subprocess.run(args, capture_output=True, check=True).stdout for _ in range(2)]
    ok = runs[0] == runs[1] and json.loads(runs[0])["estimated_dimension"] == 1
    accept(8, ok, f"two estimate runs byte-identical: {runs[0] == runs[1]} ({len(runs[0])} bytes)")
    assert ok
