"""The eleven acceptance criteria, one test each.

Run ``pytest tests/test_acceptance.py``; the terminal summary lists one
PASS/FAIL line per criterion.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from orbitfix.descent import NO_POINT, DescentConfig, GridDomain, NestedFamily, ObjectiveFunction, cantor_intersect, ekeland_descent
from orbitfix.finite_topology import (
    FiniteSetMap,
    brute_force_topologies,
    enumerate_orbits,
    enumerate_topologies,
    sweep,
)
from orbitfix.gallery import MoorePoint, moore_plane_scenario, rational_line, run_moore, run_rationals, run_two_origins
from orbitfix.orbit_engine import STRICT_FIXED_POINT, VIOLATION
from orbitfix.premetric import PASS, REFUTED, SUPPORTED, Premetric, sigma_p_length, tends_to_zero
from orbitfix.remetrize import IterationSystem, a1_a2_check, tau_p_equivalence_test

import oracles

ABS = Premetric(lambda x, y: abs(x - y))


@pytest.fixture(scope="module")
def three_point_sweep():
    start = time.perf_counter()
    spaces = list(enumerate_topologies(3))
    summary = sweep(spaces)
    return spaces, summary, time.perf_counter() - start


@pytest.mark.criterion(1, "topology counts 1, 4, 29, 355 from the brute-force filter, matched by the enumerator, < 10 s")
def test_topology_counts():
    start = time.perf_counter()
    for n, expected in zip((1, 2, 3, 4), (1, 4, 29, 355)):
        oracle = set(brute_force_topologies(n))
        assert len(oracle) == expected
        assert {s.opens for s in enumerate_topologies(n)} == oracle
    # the set-based filter agrees on the small cases
    for n in (1, 2, 3):
        assert len(oracles.topologies(n)) == (1, 4, 29)[n - 1]
    assert time.perf_counter() - start < 10


@pytest.mark.criterion(2, "non-witness reduction agrees with exhaustive cover enumeration on 29 spaces x 512 maps x all orbits, < 5 min")
def test_cover_reduction_soundness(three_point_sweep):
    spaces, summary, elapsed = three_point_sweep
    assert len(spaces) == 29
    assert summary.maps == 29 * 512
    assert summary.orbits > 0
    assert summary.tau_agree == summary.orbits
    assert summary.cover_agree == summary.orbits
    assert not summary.disagreements
    assert elapsed < 300


@pytest.mark.criterion(3, "closed graph + cover condition always yield a fixed point on the 3-point sweep")
def test_fixed_point_theorem_sweep(three_point_sweep):
    _, summary, _ = three_point_sweep
    assert summary.theorem_premises > 0
    assert summary.violations == []


@pytest.mark.criterion(4, "rationals from x1 = 1: p-contractive, limit exactly 0, strict fixed point, |x_k| = 2^-k")
def test_rationals():
    r = run_rationals(seed=0, max_steps=40)
    assert r["p_contractive"] == SUPPORTED
    assert isinstance(r["accumulation_point"], Fraction) and r["accumulation_point"] == 0
    assert r["classification"] == STRICT_FIXED_POINT
    assert [abs(x) for x in r["orbit"]] == [Fraction(1, 2 ** k) for k in range(41)]


@pytest.mark.criterion(5, "two origins: both origins are candidates, tails below 1e-6, violation at both")
def test_two_origins():
    r = run_two_origins(seed=0)
    assert {str(c) for c in r["accumulation_candidates"]} == {"A", "B"}
    for label in ("A", "B"):
        o = r["origins"][label]
        assert o["tail_max_p"] < 1e-6
        assert o["classification"] == VIOLATION
    assert r["origins"]["A"]["witness"] == r["accumulation_candidates"][1]


@pytest.mark.criterion(6, "Ekeland on x^2, step 2^-12: x <= 1/2 + 2^-10, exact prefix bounds, length <= 1")
def test_ekeland_square():
    f = ObjectiveFunction(lambda x: x * x, GridDomain(-2, 2, Fraction(1, 4096)), lower_bound=0)
    cert = ekeland_descent(f, ABS, Fraction(1), DescentConfig(seed=0))
    assert cert.point <= Fraction(1, 2) + Fraction(1, 1024)
    pts = cert.orbit
    for n in range(1, len(pts) + 1):
        length = sigma_p_length(ABS, pts[:n])
        assert isinstance(length, (int, Fraction))
        assert length <= f(pts[0]) - f(pts[n - 1])
    assert cert.sigma_length <= 1


@pytest.mark.criterion(7, "Ekeland on |x|: zero steps, residual 0")
def test_ekeland_abs():
    f = ObjectiveFunction(abs, GridDomain(-2, 2, Fraction(1, 4096)), lower_bound=0)
    cert = ekeland_descent(f, ABS, Fraction(1), DescentConfig(seed=0))
    assert cert.steps == 0 and cert.point == 1 and cert.residual == 0


@pytest.mark.criterion(8, "Moore plane: diagonal p ~ 2^(1-k) -> 0, strict fixed point at (0,0), axis points at p = 1")
def test_moore():
    r = run_moore(seed=0)
    inst, _ = moore_plane_scenario()
    origin = MoorePoint(0, 0)
    values = [inst.p(origin, MoorePoint(Fraction(1, 2 ** k), Fraction(1, 2 ** k))) for k in range(1, 40)]
    for k, v in enumerate(values, 1):
        assert Fraction(1, 2) < v / Fraction(2, 2 ** k) <= 1
    assert tends_to_zero(values, 1e-6)
    assert tends_to_zero(r["diagonal_p_to_origin"], 1e-6)
    assert r["classification_at_origin"] == STRICT_FIXED_POINT
    assert all(v == 1 for v in r["axis_p_to_origin"].values())
    assert inst.p(origin, MoorePoint(Fraction(-7, 3), 0)) == 1


@pytest.mark.criterion(9, "1000 random finite metric instances: tau-check and p-check agree")
def test_metric_equivalence():
    rng = np.random.default_rng(2024)
    checked = 0
    for _ in range(1000):
        n = int(rng.integers(1, 5))
        pts = rng.random((n, 2))
        dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        images = [[y for y in range(n) if rng.random() < 0.5] or [int(rng.integers(n))] for _ in range(n)]
        smap = FiniteSetMap.from_lists(images)
        for start in range(n):
            for orbit in enumerate_orbits(smap, start):
                assert tau_p_equivalence_test(dist, smap, orbit)
                checked += 1
    assert checked >= 1000


@pytest.mark.criterion(10, "remetrization: x/2 passes with sup 2^-i to 1e-12, identity fails A1 with witness")
def test_remetrize():
    O = [j / 64 for j in range(65)]
    half = a1_a2_check(IterationSystem(lambda x: x / 2, lambda x, y: abs(x - y), domain=O, neighborhood=O), 0.0)
    assert half.a1.status == half.a2.status == half.uniform_cover.status == PASS
    assert max(abs(s - 2.0 ** -i) for i, s in enumerate(half.sup_series)) <= 1e-12
    assert half.conclusion
    ident = a1_a2_check(IterationSystem(lambda x: x, lambda x, y: abs(x - y), domain=O, neighborhood=O), 0.0)
    assert ident.a1.status == REFUTED and ident.a1.witness is not None
    assert not ident.conclusion


@pytest.mark.criterion(11, "nested rational intervals around sqrt 2 give no accumulation point")
def test_cantor_sqrt2():
    def bounds(i):
        s = 10 ** i
        a = Fraction(math.isqrt(2 * s * s), s)
        return a, a + Fraction(1, s)

    res = cantor_intersect(NestedFamily.intervals(bounds), rational_line(), cap=40)
    assert res.point is None
    assert res.status == NO_POINT
