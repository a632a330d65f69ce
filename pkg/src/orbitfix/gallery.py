"""Concrete spaces and maps: worked examples and counterexample constructions.

All reals here are :class:`fractions.Fraction` values, so membership in
neighbourhood sets is decided exactly.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

from .orbit_engine import (
    SetValuedMap,
    classify_fixed_point,
    find_accumulation_point,
    generate_orbit,
    monitor_p_contractive,
    orbit_dump,
    probe_star_property,
)
from .premetric import Premetric, Probe, PSpaceInstance, base_convergence, sigma_p_length

__all__ = [
    "TwoOriginPoint",
    "ORIGIN_A",
    "ORIGIN_B",
    "MoorePoint",
    "OrdinalPoint",
    "OrdinalSpace",
    "LocalBase",
    "HausdorffPairError",
    "rational_line",
    "interval_base",
    "two_origins_premetric",
    "two_origins_base",
    "construct_double_limit_sequence",
    "hausdorff_counterexample_map",
    "rationals_halving_scenario",
    "moore_plane_scenario",
    "moore_in_base",
    "moore_index",
    "ordinal_scenario",
    "run_rationals",
    "run_two_origins",
    "run_moore",
    "run_ordinal",
    "SCENARIOS",
]


class HausdorffPairError(ValueError):
    """The two points have disjoint neighbourhoods, so no double limit exists."""


def _dyadic(rng: random.Random, lo: int = -8, hi: int = 8, depth: int = 10) -> Fraction:
    return Fraction(rng.randint(lo << depth, hi << depth), 1 << depth)


# --------------------------------------------------------------------------
# neighbourhood bases

@dataclass(frozen=True)
class LocalBase:
    """A nested countable base at one point.

    ``contains(n, y)`` tests ``y in L_n``; ``candidates(n)`` lists some points
    of ``L_n`` in preference order.
    """

    center: Any
    contains: Callable[[int, Any], bool]
    candidates: Callable[[int], Iterable]


def _radius(n: int, kind: str) -> Fraction:
    return Fraction(1, n) if kind == "harmonic" else Fraction(1, 1 << n)


def interval_base(c, radii: str = "harmonic") -> LocalBase:
    c = Fraction(c)

    def contains(n, y):
        return isinstance(y, (int, Fraction)) and abs(Fraction(y) - c) < _radius(n, radii)

    def candidates(n):
        r = _radius(n, radii)
        for d in (2, 3, 4, 5):
            yield c + r / d
            yield c - r / d

    return LocalBase(c, contains, candidates)


def rational_line(radii: str = "harmonic", depth: int = 64) -> PSpaceInstance:
    """The rationals with ``p(x, y) = |x - y|`` and interval neighbourhoods."""
    p = Premetric(lambda x, y: abs(x - y), exact=True, name="|x-y|")

    def in_base(center, n, y):
        return abs(Fraction(y) - Fraction(center)) < _radius(n, radii)

    probes = [
        Probe("2^-n -> 0", tuple(Fraction(1, 1 << k) for k in range(48)), Fraction(0)),
        Probe("1 + (-1)^n 2^-n -> 1", tuple(1 + Fraction((-1) ** k, 1 << k) for k in range(48)), Fraction(1)),
        Probe("constant 3/7", tuple([Fraction(3, 7)] * 16), Fraction(3, 7)),
    ]
    return PSpaceInstance(
        name="rational-line",
        p=p,
        converges=base_convergence(in_base, depth),
        sample_points=lambda k, rng: [_dyadic(rng) for _ in range(k)],
        probes=probes,
        pool=[Fraction(0)],
    )


# --------------------------------------------------------------------------
# line with two origins

@dataclass(frozen=True)
class TwoOriginPoint:
    """A nonzero real, or one of the two origins ``A`` / ``B``."""

    x: Fraction | None = None
    origin: str | None = None

    def __post_init__(self):
        if (self.x is None) == (self.origin is None):
            raise ValueError("give exactly one of a real value or an origin label")
        if self.origin is not None and self.origin not in ("A", "B"):
            raise ValueError("origin label must be 'A' or 'B'")
        if self.x is not None:
            if self.x == 0:
                raise ValueError("0 is not a point of the line with two origins; use A or B")
            object.__setattr__(self, "x", Fraction(self.x))

    @classmethod
    def real(cls, x) -> "TwoOriginPoint":
        return cls(x=Fraction(x))

    @property
    def is_origin(self) -> bool:
        return self.origin is not None

    def __repr__(self):
        return self.origin if self.is_origin else f"Real({self.x})"

    def __str__(self):
        return self.origin if self.is_origin else str(self.x)


ORIGIN_A = TwoOriginPoint(origin="A")
ORIGIN_B = TwoOriginPoint(origin="B")


def _two_origin_p(u: TwoOriginPoint, v: TwoOriginPoint) -> Fraction:
    if u == v:
        return Fraction(0)
    if u.is_origin and v.is_origin:
        return Fraction(1)
    if u.is_origin:
        return abs(v.x)
    if v.is_origin:
        return abs(u.x)
    return abs(u.x - v.x)


def _two_origin_in_base(radii: str):
    def in_base(center: TwoOriginPoint, n: int, y: TwoOriginPoint) -> bool:
        r = _radius(n, radii)
        if center.is_origin:
            return y == center or (not y.is_origin and abs(y.x) < r)
        if y.is_origin:
            return False
        return abs(y.x - center.x) < min(r, abs(center.x))

    return in_base


def two_origins_base(center: TwoOriginPoint, radii: str = "harmonic") -> LocalBase:
    in_base = _two_origin_in_base(radii)

    def candidates(n):
        r = _radius(n, radii)
        if center.is_origin:
            for d in (2, 3, 4, 5):
                yield TwoOriginPoint.real(r / d)
                yield TwoOriginPoint.real(-r / d)
        else:
            r = min(r, abs(center.x))
            for d in (2, 3, 4, 5):
                yield TwoOriginPoint.real(center.x + r / d)
                yield TwoOriginPoint.real(center.x - r / d)

    return LocalBase(center, lambda n, y: in_base(center, n, y), candidates)


def two_origins_premetric(radii: str = "harmonic", depth: int | None = None,
                          probe_length: int = 2048) -> PSpaceInstance:
    """Line with two origins; ``radii`` is ``"harmonic"`` (1/n) or ``"dyadic"`` (2^-n)."""
    if radii not in ("harmonic", "dyadic"):
        raise ValueError("radii must be 'harmonic' or 'dyadic'")
    if depth is None:
        depth = 64 if radii == "harmonic" else 10
    p = Premetric(_two_origin_p, exact=True, name="two-origins")
    harmonic = tuple(TwoOriginPoint.real(Fraction(1, k)) for k in range(1, probe_length + 1))
    geometric = tuple(TwoOriginPoint.real(Fraction((-1) ** k, 1 << k)) for k in range(1, 48))
    probes = [
        Probe("1/n -> A", harmonic, ORIGIN_A),
        Probe("1/n -> B", harmonic, ORIGIN_B),
        Probe("(-1)^n 2^-n -> A", geometric, ORIGIN_A),
        Probe("3 + 2^-n -> 3", tuple(TwoOriginPoint.real(3 + Fraction(1, 1 << k)) for k in range(48)),
              TwoOriginPoint.real(3)),
    ]
    seq = construct_double_limit_sequence(None, ORIGIN_A, ORIGIN_B, two_origins_base(ORIGIN_A, radii),
                                          two_origins_base(ORIGIN_B, radii), 40)
    probes.append(Probe("double limit -> A", tuple(seq), ORIGIN_A))
    probes.append(Probe("double limit -> B", tuple(seq), ORIGIN_B))

    def sample_points(k, rng):
        out = [ORIGIN_A, ORIGIN_B]
        while len(out) < k:
            v = _dyadic(rng)
            if v:
                out.append(TwoOriginPoint.real(v))
        return out

    inst = PSpaceInstance(
        name=f"two-origins-{radii}",
        p=p,
        converges=base_convergence(_two_origin_in_base(radii), depth),
        sample_points=sample_points,
        probes=probes,
        pool=[ORIGIN_A, ORIGIN_B],
        tail_tol=1e-3,
    )
    return inst


# --------------------------------------------------------------------------
# double-limit sequence and the non-Hausdorff map

def _first_exit(a_base: LocalBase, b_base: LocalBase, x, cap: int = 1 << 62) -> int:
    """Least level n with ``x`` outside ``L_n`` and ``W_n`` jointly (bases are nested)."""
    inside = lambda n: a_base.contains(n, x) and b_base.contains(n, x)
    if not inside(1):
        return 1
    lo, hi = 1, 2
    while inside(hi):
        lo, hi = hi, hi * 2
        if hi > cap:
            raise ValueError(f"{x!r} lies in every base set; the space is not T1 at this pair")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if inside(mid):
            lo = mid
        else:
            hi = mid
    return hi


def construct_double_limit_sequence(instance, a, b, base_a: LocalBase, base_b: LocalBase,
                                    length: int) -> list:
    """A sequence converging to both ``a`` and ``b``.

    Each term is taken from ``L_k`` and ``W_k`` at the first level ``k``
    that excludes the previous term, so consecutive terms differ and the
    levels grow without bound.
    """
    if a == b:
        raise ValueError("need two distinct points")
    seq = []
    level = 1
    for _ in range(length):
        prev = seq[-1] if seq else None
        pick = None
        for y in base_a.candidates(level):
            if y in (a, b) or y == prev:
                continue
            if base_a.contains(level, y) and base_b.contains(level, y):
                pick = y
                break
        if pick is None:
            raise HausdorffPairError(f"no common point found in level-{level} neighbourhoods of {a!r} and {b!r}")
        seq.append(pick)
        level = _first_exit(base_a, base_b, pick)
    if instance is not None:
        p = instance.p
        if any(p.is_zero(p(seq[i + 1], seq[i])) for i in range(len(seq) - 1)):
            raise AssertionError("consecutive terms coincide")
    return seq


def hausdorff_counterexample_map(sequence: Sequence, a, b, variant: str = "p") -> SetValuedMap:
    """The map that swaps two inseparable limits and walks along ``sequence``.

    ``S(a) = {b}``, ``S(b) = {a}``, ``S(x_i) = {x_{i+1}}`` (with ``a`` and
    ``b`` added when ``variant == "p"``) and ``S(x) = sequence`` elsewhere.
    Only a finite prefix is available, so the final term is sent to
    ``{a, b}``.
    """
    if variant not in ("p", "tau"):
        raise ValueError("variant must be 'p' or 'tau'")
    seq = list(sequence)
    images = {a: [b], b: [a]}
    for i, x in enumerate(seq):
        if i + 1 < len(seq):
            images[x] = [seq[i + 1]] + ([a, b] if variant == "p" else [])
        else:
            images[x] = [a, b]

    def image(x):
        return images.get(x, seq)

    return SetValuedMap(
        sampler=lambda x, budget, rng: image(x)[:budget],
        predicate=lambda x, y: y in image(x),
        known_empty=lambda x: False,
        exhaustive=True,
        name=f"non-Hausdorff swap ({variant})",
    )


# --------------------------------------------------------------------------
# rationals

def rationals_halving_scenario(grid: int = 8):
    """``S(x) = {y in Q : 0 <= y <= |x|/2}`` on the rationals."""
    inst = rational_line()

    def sampler(x, budget, rng):
        top = abs(Fraction(x)) / 2
        out = [top]
        if top:
            out.append(Fraction(0))
            out += [top * j / grid for j in range(1, grid)]
            while len(out) < budget:
                out.append(top * Fraction(rng.randint(0, 1 << 16), 1 << 16))
        seen, uniq = set(), []
        for y in out:
            if y not in seen:
                seen.add(y)
                uniq.append(y)
        return uniq[:budget]

    smap = SetValuedMap(
        sampler=sampler,
        predicate=lambda x, y: 0 <= y <= abs(Fraction(x)) / 2,
        known_empty=lambda x: False,
        exhaustive=False,
        name="0 <= y <= |x|/2",
    )
    return inst, smap


# --------------------------------------------------------------------------
# Moore plane

@dataclass(frozen=True, order=True)
class MoorePoint:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))
        if self.y < 0:
            raise ValueError("the Moore plane is the closed upper half-plane")

    def __repr__(self):
        return f"({self.x}, {self.y})"


def _largest_n_below(q: Fraction) -> int:
    """Largest integer n >= 0 with n*n < q (q > 0)."""
    c = math.ceil(q)
    return math.isqrt(c - 1) if c >= 1 else 0


def moore_index(center: MoorePoint, v: MoorePoint) -> int | None:
    """Largest n with ``v in L_n(center)``; None when ``v == center`` (every level)."""
    if v == center:
        return None
    dx, dy = v.x - center.x, v.y - center.y
    if center.y > 0:
        r2 = dx * dx + dy * dy
        return _largest_n_below(1 / r2)
    # tangent disc of radius 1/n centred at (x, 1/n): n * (dx^2 + y^2) < 2 y
    if v.y == 0:
        return 0
    r2 = dx * dx + v.y * v.y
    return math.ceil(2 * v.y / r2) - 1


def moore_in_base(center: MoorePoint, n: int, v: MoorePoint) -> bool:
    k = moore_index(center, v)
    return k is None or n <= k


def _moore_p(u: MoorePoint, v: MoorePoint) -> Fraction:
    """Base index of ``v`` around ``u``: inf{1/n : v in L_n(u)}, capped at 1."""
    k = moore_index(u, v)
    if k is None:
        return Fraction(0)
    return Fraction(1, k) if k >= 1 else Fraction(1)


def moore_plane_scenario(depth: int = 32):
    p = Premetric(_moore_p, exact=True, name="moore-base-index")
    origin = MoorePoint(0, 0)
    diag = tuple(MoorePoint(Fraction(1, 1 << k), Fraction(1, 1 << k)) for k in range(48))
    probes = [
        Probe("diagonal -> (0,0)", diag, origin),
        Probe("(1+2^-k, 1) -> (1,1)", tuple(MoorePoint(1 + Fraction(1, 1 << k), 1) for k in range(48)),
              MoorePoint(1, 1)),
        Probe("(3, 2^-k) -> (3, 0)",
              tuple(MoorePoint(3, Fraction(1, 1 << k)) for k in range(48)), MoorePoint(3, 0)),
    ]

    def sample_points(k, rng):
        out = [origin]
        while len(out) < k:
            x = _dyadic(rng)
            y = abs(_dyadic(rng)) if rng.random() < 0.7 else Fraction(0)
            out.append(MoorePoint(x, y))
        return out

    inst = PSpaceInstance(
        name="moore-plane",
        p=p,
        converges=base_convergence(moore_in_base, depth),
        sample_points=sample_points,
        probes=probes,
        pool=[origin],
    )

    def image(pt: MoorePoint):
        if pt.y == 0:
            return [MoorePoint(pt.x / 2, pt.x / 2)]
        return [MoorePoint(pt.x, 0)]

    smap = SetValuedMap(
        sampler=lambda pt, budget, rng: image(pt)[:budget],
        predicate=lambda pt, q: q in image(pt),
        known_empty=lambda pt: False,
        exhaustive=True,
        name="moore map",
    )
    return inst, smap


# --------------------------------------------------------------------------
# ordinals below omega * K

@dataclass(frozen=True, order=True)
class OrdinalPoint:
    """The ordinal ``omega * k + m``."""

    k: int
    m: int

    def __post_init__(self):
        if self.k < 0 or self.m < 0:
            raise ValueError("ordinal coordinates are nonnegative")

    @property
    def is_limit(self) -> bool:
        return self.m == 0 and self.k > 0

    def __repr__(self):
        if self.k == 0:
            return str(self.m)
        head = "w" if self.k == 1 else f"w*{self.k}"
        return head if self.m == 0 else f"{head}+{self.m}"


OMEGA = OrdinalPoint(1, 0)


@dataclass(frozen=True)
class OrdinalSpace:
    """Countable truncation ``[0, omega * K]`` with the order topology."""

    K: int
    depth: int = 64

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("truncation K must be at least 1")

    def __contains__(self, pt) -> bool:
        return isinstance(pt, OrdinalPoint) and (pt.k < self.K or pt == OrdinalPoint(self.K, 0))

    def in_base(self, center: OrdinalPoint, n: int, y: OrdinalPoint) -> bool:
        if not center.is_limit:
            return y == center
        return OrdinalPoint(center.k - 1, n) < y <= center

    def converges(self, sequence, x) -> bool:
        return base_convergence(self.in_base, self.depth)(sequence, x)


def ordinal_scenario(K: int = 2):
    """Maps S and T on ``M = {1, 2, ...}`` together with ``omega``."""
    space = OrdinalSpace(K)

    def in_m_or_omega(x):
        return x == OMEGA or (x.k == 0 and x.m >= 1)

    def s_image(x, budget):
        if in_m_or_omega(x):
            if x == OMEGA:
                return []
            return [OrdinalPoint(0, x.m + j) for j in range(1, budget)] + [OMEGA]
        return [OrdinalPoint(0, j) for j in range(1, budget + 1)]

    def s_contains(x, y):
        if in_m_or_omega(x):
            return in_m_or_omega(y) and y > x
        return y.k == 0 and y.m >= 1

    S = SetValuedMap(
        sampler=lambda x, budget, rng: s_image(x, budget)[:budget],
        predicate=s_contains,
        known_empty=lambda x: x == OMEGA,
        exhaustive=False,
        name="S (ordinal)",
    )
    T = SetValuedMap(
        sampler=lambda x, budget, rng: ([x] if x == OMEGA else s_image(x, budget))[:budget],
        predicate=lambda x, y: y == x if x == OMEGA else s_contains(x, y),
        known_empty=lambda x: False,
        exhaustive=False,
        name="T (ordinal)",
    )
    return space, S, T


# --------------------------------------------------------------------------
# end-to-end pipelines (one JSON-ready report per scenario)

def run_rationals(seed: int = 0, max_steps: int = 40, tol: float = 1e-6) -> dict:
    inst, smap = rationals_halving_scenario()
    p = inst.p
    orbit = generate_orbit(smap, Fraction(1), "greedy-max-step", max_steps=max_steps, seed=seed)
    mon = monitor_p_contractive(orbit, p, smap, tolerance=tol, candidate_pool=inst.pool, seed=seed)
    xbar = mon.limit
    cls = classify_fixed_point(smap, xbar, p, seed=seed) if xbar is not None else None
    star = probe_star_property(smap, orbit, xbar, "star1", p, tolerance=tol, seed=seed) if xbar is not None else None
    pts = orbit.points
    return {
        "scenario": "rationals",
        "orbit": pts,
        "halving_exact": all(abs(x) == Fraction(1, 1 << k) for k, x in enumerate(pts)),
        "sigma_length": sigma_p_length(p, pts),
        "p_contractive": mon.verdict,
        "accumulation_point": xbar,
        "classification": cls.kind if cls else None,
        "star1": star.verdict if star else None,
        "orbit_dump": orbit_dump(pts, None, mon.p_sups),
    }


def run_two_origins(seed: int = 0, length: int = 40, tol: float = 1e-6, radii: str = "harmonic",
                    variant: str = "p") -> dict:
    inst = two_origins_premetric(radii)
    p = inst.p
    seq = construct_double_limit_sequence(inst, ORIGIN_A, ORIGIN_B, two_origins_base(ORIGIN_A, radii),
                                          two_origins_base(ORIGIN_B, radii), length)
    smap = hausdorff_counterexample_map(seq, ORIGIN_A, ORIGIN_B, variant)
    # stop at the last constructed term; beyond it the map is a finite-horizon stand-in
    orbit = generate_orbit(smap, seq[0], "first-sample", max_steps=len(seq) - 1, seed=seed)
    cands = find_accumulation_point(orbit, p, inst.pool, tol)
    mon = monitor_p_contractive(orbit, p, smap, tolerance=tol, candidate_pool=inst.pool, seed=seed)
    tail = orbit.points[len(orbit.points) // 2:]
    per_origin = {}
    for o in (ORIGIN_A, ORIGIN_B):
        cls = classify_fixed_point(smap, o, p, seed=seed)
        star = probe_star_property(smap, orbit, o, "star1", p, tolerance=tol, seed=seed)
        per_origin[str(o)] = {
            "tail_max_p": max(p(o, x) for x in tail),
            "classification": cls.kind,
            "witness": cls.witness,
            "star1": star.verdict,
        }
    found = [c.point for c in cands]
    return {
        "scenario": "two-origins",
        "radii": radii,
        "variant": variant,
        "sequence": seq,
        "accumulation_candidates": found,
        "p_contractive": mon.verdict,
        "origins": per_origin,
        "non_hausdorff_witness": [str(ORIGIN_A), str(ORIGIN_B)]
        if ORIGIN_A in found and ORIGIN_B in found else None,
        "orbit_dump": orbit_dump(orbit.points, None, mon.p_sups),
    }


def run_moore(seed: int = 0, max_steps: int = 96, tol: float = 1e-6) -> dict:
    inst, smap = moore_plane_scenario()
    p = inst.p
    origin = MoorePoint(0, 0)
    orbit = generate_orbit(smap, MoorePoint(1, 0), "first-sample", max_steps=max_steps, seed=seed)
    diagonal = [x for x in orbit.points if x.y > 0]
    mon = monitor_p_contractive(orbit, p, smap, tolerance=tol, candidate_pool=inst.pool, seed=seed)
    cls = classify_fixed_point(smap, origin, p, seed=seed)
    axis = [Fraction(t) for t in (1, -1, Fraction(1, 2), Fraction(1, 1 << 20))]
    return {
        "scenario": "moore",
        "orbit": orbit.points,
        "diagonal_p_to_origin": [p(origin, x) for x in diagonal],
        "p_contractive": mon.verdict,
        "accumulation_point": mon.limit,
        "classification_at_origin": cls.kind,
        "axis_p_to_origin": {str(t): p(origin, MoorePoint(t, 0)) for t in axis},
        "orbit_dump": orbit_dump(orbit.points, None, mon.p_sups),
    }


def run_ordinal(seed: int = 0, max_steps: int = 400, K: int = 2) -> dict:
    space, S, T = ordinal_scenario(K)
    # classification only compares points for equality
    same = Premetric(lambda x, y: 0 if x == y else 1, name="equality")
    orbit = generate_orbit(S, OrdinalPoint(0, 1), "first-sample", max_steps=max_steps, seed=seed)
    return {
        "scenario": "ordinal",
        "orbit_head": orbit.points[:5],
        "orbit_last": orbit.last,
        "converges_to_omega": space.converges(orbit.points, OMEGA),
        "S_at_omega": S.sample(OMEGA, 8, seed),
        "S_classification": classify_fixed_point(S, OMEGA, same, seed=seed).kind,
        "T_at_omega": T.sample(OMEGA, 8, seed),
        "T_classification": classify_fixed_point(T, OMEGA, same, seed=seed).kind,
    }


SCENARIOS = {
    "rationals": run_rationals,
    "two-origins": run_two_origins,
    "moore": run_moore,
    "ordinal": run_ordinal,
}
