import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from orbitfix.finite_topology import FiniteSetMap, FiniteSpace, enumerate_orbits, is_tau_contractive
from orbitfix.gallery import rationals_halving_scenario
from orbitfix.orbit_engine import (
    EMPTY_VALUE,
    INCONCLUSIVE,
    STRICT_FIXED_POINT,
    VIOLATION,
    Orbit,
    OrbitEnded,
    SetValuedMap,
    classify_fixed_point,
    find_accumulation_point,
    generate_orbit,
    monitor_p_contractive,
    orbit_dump,
    probe_star_property,
)
from orbitfix.premetric import REFUTED, SUPPORTED, Premetric

ABS = Premetric(lambda x, y: abs(x - y))


def test_stationary_orbit():
    smap = SetValuedMap.from_finite({0: [0]})
    orbit = generate_orbit(smap, 0, max_steps=10)
    assert orbit.points == [0] * 11 and not orbit.ended


def test_empty_start_ends_immediately():
    smap = SetValuedMap.from_finite({})
    orbit = generate_orbit(smap, 5, max_steps=10)
    assert orbit.points == [5] and orbit.ended
    with pytest.raises(OrbitEnded):
        monitor_p_contractive(orbit, ABS, smap)


def test_rationals_greedy_max_step_halves():
    _, smap = rationals_halving_scenario()
    orbit = generate_orbit(smap, Fraction(1), "greedy-max-step", max_steps=30, seed=4)
    assert orbit.points == [Fraction(1, 2 ** k) for k in range(31)]
    assert orbit.certify(smap)


def test_policies_validate():
    smap = SetValuedMap.from_finite({0: [0]})
    with pytest.raises(ValueError):
        generate_orbit(smap, 0, policy="random-walk")
    with pytest.raises(ValueError):
        generate_orbit(smap, 0, policy="greedy-min-f")


def test_greedy_min_f_respects_slack():
    smap = SetValuedMap(lambda x, b, rng: [x - 1, x - 2, x - 3])
    orbit = generate_orbit(smap, 0, "greedy-min-f", max_steps=3, objective=lambda v: v,
                           slack=lambda i: 1)
    assert orbit.points == [0, -2, -4, -6]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32), st.sampled_from(["first-sample", "greedy-max-step"]))
def test_orbit_is_deterministic_and_certified(seed, policy):
    _, smap = rationals_halving_scenario()
    a = generate_orbit(smap, Fraction(3, 7), policy, max_steps=12, seed=seed)
    b = generate_orbit(smap, Fraction(3, 7), policy, max_steps=12, seed=seed)
    assert a.points == b.points
    assert a.certify(smap)


# -- accumulation and contractivity ---------------------------------------------

def test_accumulation_examples():
    geo = [Fraction(1, 2 ** k) for k in range(40)]
    found = find_accumulation_point(geo, ABS, [Fraction(0)], 1e-6)
    assert [c.point for c in found] == [0]
    assert find_accumulation_point(list(range(1, 40)), ABS, [Fraction(0)], 1e-6) == []
    assert find_accumulation_point(geo[:3], ABS, [Fraction(0)], 1e-6) == []


def test_monitor_rationals_supported():
    inst, smap = rationals_halving_scenario()
    orbit = generate_orbit(smap, Fraction(1), "greedy-max-step", max_steps=40)
    rep = monitor_p_contractive(orbit, inst.p, smap, candidate_pool=inst.pool)
    assert rep.verdict == SUPPORTED and rep.limit == 0
    assert rep.p_sups == [Fraction(1, 2 ** k) for k in range(41)]


def test_monitor_whole_interval_refuted():
    grid = [Fraction(j, 16) for j in range(17)]
    smap = SetValuedMap(lambda x, b, rng: grid[:b], predicate=lambda x, y: 0 <= y <= 1)
    orbit = generate_orbit(smap, Fraction(1, 2), "first-sample", max_steps=30)
    rep = monitor_p_contractive(orbit, ABS, smap)
    assert rep.verdict == REFUTED
    assert min(rep.p_sups) >= Fraction(1, 2)


def test_monitor_monotone_in_budget():
    inst, smap = rationals_halving_scenario()
    orbit = generate_orbit(smap, Fraction(1), "greedy-max-step", max_steps=40)
    verdicts = [monitor_p_contractive(orbit, inst.p, smap, budget=b, candidate_pool=inst.pool).verdict
                for b in (1, 2, 8, 64)]
    for a, b in zip(verdicts, verdicts[1:]):
        assert not (a == SUPPORTED and b == REFUTED)


def _metric_instance(rng, n):
    pts = [(rng.random(), rng.random()) for _ in range(n)]
    dist = [[math.dist(a, b) for b in pts] for a in pts]
    images = [[y for y in range(n) if rng.random() < 0.5] or [rng.randrange(n)] for _ in range(n)]
    return dist, images


def test_tau_contractive_orbits_are_reported_p_contractive():
    rng = random.Random(11)
    checked = 0
    for _ in range(200):
        n = rng.randint(1, 4)
        dist, images = _metric_instance(rng, n)
        fmap = FiniteSetMap.from_lists(images)
        p = Premetric(lambda x, y: dist[x][y])
        smap = SetValuedMap.from_finite(dict(enumerate(images)))
        for orbit in enumerate_orbits(fmap, 0):
            if not is_tau_contractive(FiniteSpace.discrete(n), fmap, orbit).holds:
                continue
            # the orbit is eventually the fixed point c with S(c) = {c}
            rep = monitor_p_contractive(Orbit(orbit.prefix(40)), p, smap)
            assert rep.verdict == SUPPORTED
            checked += 1
    assert checked > 0


# -- star properties ------------------------------------------------------------

def test_star1_rationals_supported():
    inst, smap = rationals_halving_scenario()
    orbit = generate_orbit(smap, Fraction(1), "greedy-max-step", max_steps=40)
    assert probe_star_property(smap, orbit, Fraction(0), "star1", inst.p).verdict == SUPPORTED


def test_star_sublevel_constant_witness():
    # S_f(x) = {y : f(y) < f(x)} with f(x) = x on a grid; y in S(xbar) stays in S(x_i) for x_i near xbar from above
    grid = [Fraction(j, 64) for j in range(-64, 65)]
    smap = SetValuedMap(lambda x, b, rng: [y for y in grid if y < x][:b], predicate=lambda x, y: y < x)
    orbit = [Fraction(1, 2 ** k) for k in range(40)]
    rep = probe_star_property(smap, orbit, Fraction(0), "star", ABS, budget=200)
    assert rep.verdict == SUPPORTED
    rep1 = probe_star_property(smap, orbit, Fraction(0), "star1", ABS, budget=200)
    assert rep1.verdict == SUPPORTED


def test_star1_refuted_with_predicate():
    orbit = [Fraction(1, 2 ** k) for k in range(40)]
    smap = SetValuedMap(lambda x, b, rng: [Fraction(5)] if x == 0 else [x / 2],
                        predicate=lambda x, y: y == 5 if x == 0 else y == x / 2)
    rep = probe_star_property(smap, orbit, Fraction(0), "star1", ABS)
    assert rep.verdict == REFUTED and rep.witness == 5


def test_star_variant_checked():
    with pytest.raises(ValueError):
        probe_star_property(SetValuedMap.from_finite({}), [0], 0, "star2", ABS)


# -- classification ----------------------------------------------------------------

def test_classification_examples():
    _, smap = rationals_halving_scenario()
    assert classify_fixed_point(smap, Fraction(0), ABS).kind == STRICT_FIXED_POINT
    assert classify_fixed_point(SetValuedMap.from_finite({}), 1, ABS).kind == EMPTY_VALUE
    swap = SetValuedMap.from_finite({"A": ["B"], "B": ["A"]})
    p = Premetric(lambda x, y: 0 if x == y else 1)
    cls = classify_fixed_point(swap, "A", p)
    assert cls.kind == VIOLATION and cls.witness == "B"
    unknown = SetValuedMap(lambda x, b, rng: [])
    assert classify_fixed_point(unknown, 0, ABS).kind == INCONCLUSIVE


@given(st.lists(st.integers(-3, 3), max_size=6), st.integers(-3, 3))
def test_strict_and_violation_exclusive(image, x):
    smap = SetValuedMap.from_finite({x: image})
    kinds = {classify_fixed_point(smap, x, ABS, seed=s).kind for s in range(3)}
    assert not {STRICT_FIXED_POINT, VIOLATION} <= kinds
    if image and set(image) == {x}:
        assert kinds == {STRICT_FIXED_POINT}


def test_orbit_dump_format():
    lines = orbit_dump([Fraction(1), Fraction(1, 2)], lambda x: x * x, [Fraction(1), Fraction(1, 2)])
    assert lines == ["0\t1\t1\t1", "1\t1/2\t1/4\t1/2"]
