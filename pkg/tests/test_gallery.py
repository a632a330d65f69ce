from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from orbitfix.gallery import (
    OMEGA,
    ORIGIN_A,
    ORIGIN_B,
    HausdorffPairError,
    MoorePoint,
    OrdinalPoint,
    TwoOriginPoint,
    construct_double_limit_sequence,
    hausdorff_counterexample_map,
    interval_base,
    moore_in_base,
    moore_index,
    moore_plane_scenario,
    ordinal_scenario,
    rationals_halving_scenario,
    run_moore,
    run_ordinal,
    run_rationals,
    run_two_origins,
    two_origins_base,
    two_origins_premetric,
)
from orbitfix.orbit_engine import (
    STRICT_FIXED_POINT,
    VIOLATION,
    classify_fixed_point,
    find_accumulation_point,
    generate_orbit,
    monitor_p_contractive,
    probe_star_property,
)
from orbitfix.premetric import SUPPORTED, Premetric, audit_axioms, tends_to_zero

R = TwoOriginPoint.real


# -- two origins ---------------------------------------------------------------

def test_two_origin_points():
    with pytest.raises(ValueError):
        R(0)
    with pytest.raises(ValueError):
        TwoOriginPoint(origin="C")
    with pytest.raises(ValueError):
        TwoOriginPoint(x=Fraction(1), origin="A")


def test_two_origin_premetric_values():
    p = two_origins_premetric().p
    assert p(R(3), R(1)) == 2
    assert p(ORIGIN_A, ORIGIN_B) == 1 == p(ORIGIN_B, ORIGIN_A)
    assert p(R(Fraction(-1, 4)), ORIGIN_A) == Fraction(1, 4) == p(ORIGIN_B, R(Fraction(-1, 4)))
    assert p(ORIGIN_A, ORIGIN_A) == 0


@pytest.mark.parametrize("radii", ["harmonic", "dyadic"])
def test_two_origins_audit(radii):
    assert audit_axioms(two_origins_premetric(radii), seed=2).passed


@pytest.mark.parametrize("radii", ["harmonic", "dyadic"])
def test_double_limit_sequence(radii):
    inst = two_origins_premetric(radii)
    seq = construct_double_limit_sequence(inst, ORIGIN_A, ORIGIN_B, two_origins_base(ORIGIN_A, radii),
                                          two_origins_base(ORIGIN_B, radii), 40)
    assert all(a != b for a, b in zip(seq, seq[1:]))
    assert ORIGIN_A not in seq and ORIGIN_B not in seq
    found = {c.point for c in find_accumulation_point(seq, inst.p, inst.pool, 1e-6)}
    assert found == {ORIGIN_A, ORIGIN_B}
    assert inst.converges(seq, ORIGIN_A) and inst.converges(seq, ORIGIN_B)


def test_hausdorff_pair_rejected():
    with pytest.raises(HausdorffPairError):
        construct_double_limit_sequence(None, Fraction(0), Fraction(1), interval_base(0), interval_base(1), 10)
    with pytest.raises(ValueError):
        construct_double_limit_sequence(None, ORIGIN_A, ORIGIN_A, two_origins_base(ORIGIN_A),
                                        two_origins_base(ORIGIN_A), 10)


@pytest.mark.parametrize("variant", ["p", "tau"])
def test_counterexample_map(variant):
    inst = two_origins_premetric()
    seq = construct_double_limit_sequence(inst, ORIGIN_A, ORIGIN_B, two_origins_base(ORIGIN_A),
                                          two_origins_base(ORIGIN_B), 40)
    smap = hausdorff_counterexample_map(seq, ORIGIN_A, ORIGIN_B, variant)
    for o, other in ((ORIGIN_A, ORIGIN_B), (ORIGIN_B, ORIGIN_A)):
        cls = classify_fixed_point(smap, o, inst.p)
        assert cls.kind == VIOLATION and cls.witness == other
    orbit = generate_orbit(smap, seq[0], max_steps=len(seq) - 1)
    assert orbit.points == seq
    rep = monitor_p_contractive(orbit, inst.p, smap, candidate_pool=inst.pool)
    assert rep.verdict == SUPPORTED
    star = probe_star_property(smap, orbit, ORIGIN_A, "star1", inst.p)
    # only the variant that adds both origins to every S(x_i) keeps S(A) = {B} along the orbit
    assert (star.verdict == SUPPORTED) == (variant == "p")


def test_run_two_origins():
    r = run_two_origins(seed=0)
    assert r["non_hausdorff_witness"] == ["A", "B"]
    for o in r["origins"].values():
        assert o["classification"] == VIOLATION and o["tail_max_p"] < 1e-6


# -- rationals -------------------------------------------------------------------

def test_rationals_scenario():
    inst, smap = rationals_halving_scenario()
    assert smap.sample(Fraction(0), 10) == [0]
    assert smap.contains(Fraction(1), Fraction(1, 2)) and not smap.contains(Fraction(1), Fraction(3, 4))
    assert classify_fixed_point(smap, Fraction(0), inst.p).kind == STRICT_FIXED_POINT


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 60))
def test_rationals_length_closed_form(n):
    r = run_rationals(max_steps=n)
    assert r["sigma_length"] == 1 - Fraction(1, 2 ** n)
    assert r["halving_exact"]


def test_run_rationals():
    r = run_rationals(seed=5)
    assert r["p_contractive"] == SUPPORTED
    assert r["accumulation_point"] == 0 and isinstance(r["accumulation_point"], Fraction)
    assert r["classification"] == STRICT_FIXED_POINT


# -- Moore plane ---------------------------------------------------------------

def test_moore_point_validation():
    with pytest.raises(ValueError):
        MoorePoint(0, -1)


def test_moore_values():
    inst, smap = moore_plane_scenario()
    p = inst.p
    origin = MoorePoint(0, 0)
    for k in range(1, 30):
        v = p(origin, MoorePoint(Fraction(1, 2 ** k), Fraction(1, 2 ** k)))
        assert v == Fraction(1, 2 ** k - 1)
        assert Fraction(1, 2 ** k) < v <= Fraction(2, 2 ** k)
    for t in (1, -3, Fraction(1, 2 ** 40)):
        assert p(origin, MoorePoint(t, 0)) == 1
    assert smap.sample(origin, 4) == [origin]
    assert classify_fixed_point(smap, origin, p).kind == STRICT_FIXED_POINT


def test_moore_orbit():
    inst, smap = moore_plane_scenario()
    orbit = generate_orbit(smap, MoorePoint(1, 0), max_steps=6)
    h = Fraction(1, 2)
    assert orbit.points == [MoorePoint(1, 0), MoorePoint(h, h), MoorePoint(h, 0), MoorePoint(h / 2, h / 2),
                            MoorePoint(h / 2, 0), MoorePoint(h / 4, h / 4), MoorePoint(h / 4, 0)]
    r = run_moore()
    assert r["p_contractive"] == SUPPORTED and r["accumulation_point"] == MoorePoint(0, 0)


def test_moore_base_membership():
    c = MoorePoint(0, 0)
    # tangent disc of radius 1/n at (0, 1/n) plus the point itself
    assert moore_in_base(c, 3, MoorePoint(0, Fraction(1, 2)))
    assert not moore_in_base(c, 5, MoorePoint(0, Fraction(1, 2)))
    assert moore_index(c, c) is None
    interior = MoorePoint(1, 1)
    assert moore_in_base(interior, 9, MoorePoint(1, 1 + Fraction(1, 10)))
    assert not moore_in_base(interior, 11, MoorePoint(1, 1 + Fraction(1, 10)))


@settings(max_examples=200)
@given(st.fractions(-4, 4, max_denominator=64), st.fractions(0, 4, max_denominator=64),
       st.fractions(-4, 4, max_denominator=64), st.fractions(0, 4, max_denominator=64))
def test_moore_axiom_i(a, b, c, d):
    p = moore_plane_scenario()[0].p
    u, v = MoorePoint(a, b), MoorePoint(c, d)
    assert (p(u, v) == 0) == (u == v)
    assert p(u, v) >= 0


def test_reversed_orientation_breaks_axiom_ii():
    # inf{1/n : u in L_n(v)} sees a tangential sequence as close to (0,0) although it never enters the discs
    inst, _ = moore_plane_scenario()
    reversed_p = Premetric(lambda u, v: inst.p(v, u))
    origin = MoorePoint(0, 0)
    seq = [MoorePoint(Fraction(1, 2 ** k), Fraction(1, 8 ** k)) for k in range(1, 40)]
    assert tends_to_zero([reversed_p(origin, z) for z in seq], 1e-6)
    assert not inst.converges(seq, origin)
    assert all(inst.p(origin, z) == 1 for z in seq)


# -- ordinals ------------------------------------------------------------------------

def test_ordinal_scenario():
    space, S, T = ordinal_scenario(2)
    assert S.sample(OMEGA, 5) == [] and S.is_known_empty(OMEGA)
    assert T.sample(OMEGA, 5) == [OMEGA]
    assert OrdinalPoint(0, 3) in space and OrdinalPoint(2, 0) in space and OrdinalPoint(2, 1) not in space
    assert repr(OMEGA) == "w" and OMEGA.is_limit
    with pytest.raises(ValueError):
        OrdinalPoint(-1, 0)
    with pytest.raises(ValueError):
        ordinal_scenario(0)


def test_ordinal_orbit_converges_to_omega():
    r = run_ordinal(max_steps=400)
    assert r["converges_to_omega"]
    assert r["S_classification"] == "empty_value"
    assert r["T_classification"] == STRICT_FIXED_POINT
    space, _, _ = ordinal_scenario(2)
    assert not space.converges([OrdinalPoint(0, k) for k in range(1, 30)], OMEGA)
