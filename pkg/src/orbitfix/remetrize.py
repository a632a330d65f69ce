"""Metric-case checks: equivalence of the two contractivity notions, LOEV
conditions, topological contractions, and the hypotheses (A1)/(A2) under
which a map is a Banach contraction for some equivalent metric.

The equivalent metric itself is never built; reports only state whether the
hypotheses were verified on the samples.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .finite_topology import FiniteSetMap, FiniteSpace, OrbitDescriptor, bits, is_tau_contractive
from .orbit_engine import Orbit, SetValuedMap, find_accumulation_point, probe_star_property
from .premetric import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    REFUTED,
    SUPPORTED,
    Premetric,
    p_sup,
    tail_window,
    tends_to_zero,
)

__all__ = [
    "IterationSystem",
    "Check",
    "RemetrizationReport",
    "exact_p_contractive",
    "tau_p_equivalence_test",
    "loev_condition_check",
    "t_contractive_test",
    "a1_a2_check",
    "uniform_cover_condition_check",
]


@dataclass
class Check:
    status: str
    witness: Any = None
    detail: str = ""

    def as_dict(self):
        return {"status": self.status, "witness": self.witness, "detail": self.detail}


@dataclass
class IterationSystem:
    """A single-valued map with the samples it is checked on.

    Metric mode needs ``d`` and ``domain``; ``neighborhood`` is the sample of
    the neighbourhood O of the fixed point.  Exact mode sets ``space`` to a
    :class:`FiniteSpace` and ``f`` to a callable on point indices.
    """

    f: Callable
    d: Callable | None = None
    domain: Sequence = ()
    neighborhood: Sequence = ()
    space: FiniteSpace | None = None
    perturb: Callable | None = None
    name: str = "f"

    def __post_init__(self):
        if self.d is None:
            return
        pts = list(self.domain)[:12]
        for x, y in itertools.product(pts, repeat=2):
            if abs(self.d(x, y) - self.d(y, x)) > 1e-12:
                raise ValueError(f"d is not symmetric at ({x}, {y})")
            for z in pts:
                if self.d(x, y) > self.d(x, z) + self.d(z, y) + 1e-12:
                    raise ValueError(f"triangle inequality fails at ({x}, {z}, {y})")

    def iterate(self, x, steps: int) -> list:
        out = [x]
        for _ in range(steps):
            out.append(self.f(out[-1]))
        return out


@dataclass
class RemetrizationReport:
    xbar: Any
    a1: Check
    a2: Check
    continuity: Check
    t_contraction: Check
    uniform_cover: Check
    sup_series: list = field(default_factory=list)

    @property
    def conclusion(self) -> bool:
        return all(c.status == PASS for c in (self.continuity, self.a1, self.a2))

    def as_dict(self) -> dict:
        return {
            "xbar": self.xbar,
            "A1": self.a1.as_dict(),
            "A2": self.a2.as_dict(),
            "continuity": self.continuity.as_dict(),
            "t_contraction": self.t_contraction.as_dict(),
            "uniform_cover": self.uniform_cover.as_dict(),
            "sup_series": list(self.sup_series),
            "conclusion": "remetrizable (hypotheses verified on samples)" if self.conclusion else None,
            "remetrizable": self.conclusion,
        }


# --------------------------------------------------------------------------
# finite metric carriers

def _check_metric(dist) -> np.ndarray:
    dist = np.asarray(dist, dtype=float)
    n = dist.shape[0]
    if dist.shape != (n, n) or np.any(np.diag(dist) != 0) or not np.allclose(dist, dist.T):
        raise ValueError("distance matrix must be square, symmetric, zero on the diagonal")
    off = dist[~np.eye(n, dtype=bool)]
    if np.any(off <= 0):
        raise ValueError("distinct points must have positive distance")
    if np.any(dist[:, None, :] > dist[:, :, None] + dist[None, :, :] + 1e-12):
        raise ValueError("triangle inequality fails")
    return dist


def exact_p_contractive(dist, smap: FiniteSetMap, orbit: OrbitDescriptor) -> bool:
    """p-contractivity of an eventually periodic orbit in a finite metric space.

    A finite metric space is discrete, so a convergent subsequence is
    eventually constant at some point c of the cycle, and the sup-distance
    along it is the constant ``max_{y in S(c)} d(y, c)``.
    """
    dist = _check_metric(dist)
    orbit.validate(smap)
    for c in set(orbit.cycle):
        if max(dist[y, c] for y in bits(smap.image(c))) == 0:
            return True
    return False


def tau_p_equivalence_test(dist, smap: FiniteSetMap, orbit: OrbitDescriptor) -> bool:
    dist = _check_metric(dist)
    space = FiniteSpace.discrete(dist.shape[0])
    return is_tau_contractive(space, smap, orbit).holds == exact_p_contractive(dist, smap, orbit)


# --------------------------------------------------------------------------
# LOEV conditions

def loev_condition_check(orbit, smap: SetValuedMap, d: Premetric, tolerance: float = 1e-6,
                         refute_floor: float = 1e-3, budget: int = 64, candidate_pool: Sequence = (),
                         seed: int = 0) -> dict:
    """Per-condition verdicts for (a) property (star), (b) Cauchy, (c) sup-distance -> 0."""
    points = orbit.points if isinstance(orbit, Orbit) else list(orbit)
    out = {}

    loop = None
    for x in points:
        inside = smap.contains(x, x)
        if inside is None:
            inside = x in smap.sample(x, budget, seed)
        if inside:
            loop = x
            break
    if loop is not None:
        out["a"] = Check(REFUTED, loop, "x belongs to S(x)")
    else:
        cands = find_accumulation_point(points, d, candidate_pool, tolerance)
        if not cands:
            out["a"] = Check(INCONCLUSIVE, None, "no accumulation candidate to probe persistence at")
        else:
            probes = [(c.point, probe_star_property(smap, points, c.point, "star1", d, budget, tolerance, seed))
                      for c in cands]
            bad = [(c, pr) for c, pr in probes if pr.verdict == REFUTED]
            if bad:
                out["a"] = Check(REFUTED, {"xbar": bad[0][0], "y": bad[0][1].witness}, bad[0][1].detail)
            elif all(pr.verdict == SUPPORTED for _, pr in probes):
                out["a"] = Check(SUPPORTED, None, "; ".join(pr.detail for _, pr in probes))
            else:
                out["a"] = Check(INCONCLUSIVE, None, "; ".join(pr.detail for _, pr in probes))

    tail = points[-tail_window(len(points)):]
    diam = max((d(u, v) for u, v in itertools.combinations(tail, 2)), default=0)
    if len(points) >= 4 and diam < tolerance:
        out["b"] = Check(PASS, None, f"tail diameter {diam}")
    elif diam > refute_floor and len(points) >= 4:
        out["b"] = Check(REFUTED, diam, "tail diameter stays large")
    else:
        out["b"] = Check(INCONCLUSIVE, diam)

    sups = [p_sup(d, smap.sample(x, budget, seed + i), x, budget) for i, x in enumerate(points)]
    if tends_to_zero(sups, tolerance):
        out["c"] = Check(PASS, None, f"last sup-distance {sups[-1]}")
    elif min(sups[len(sups) // 2:], default=0) >= refute_floor:
        out["c"] = Check(REFUTED, min(sups[len(sups) // 2:]), "sup-distance bounded below")
    else:
        out["c"] = Check(INCONCLUSIVE, sups[-1])
    out["sup_distances"] = sups
    return out


# --------------------------------------------------------------------------
# topological contractions

def _exact_t_contractive(space: FiniteSpace, f: Callable[[int], int], pairs) -> Check:
    opens = space.sorted_opens()
    for a, b in pairs:
        seen, state, order = {}, (a, b), []
        while state not in seen:
            seen[state] = len(order)
            order.append(state)
            state = (f(state[0]), f(state[1]))
        cycle = order[seen[state]:]
        for u, v in cycle:
            both = (1 << u) | (1 << v)
            cover = [w for w in opens if w & both != both]
            union = 0
            for w in cover:
                union |= w
            if union == space.full:
                return Check(FAIL, {"pair": (a, b), "iterates": (u, v), "cover": [bits(w) for w in cover]},
                             "this cover never holds both iterates at once")
    return Check(PASS, None, "every eventual iterate pair shares a member of every open cover")


def t_contractive_test(system: IterationSystem, pairs: Sequence | None = None, horizon: int = 64,
                       tolerance: float = 1e-9) -> Check:
    """Exact on finite spaces; on metric carriers ``d(f^i a, f^i b) -> 0`` stands in for the cover condition."""
    if system.space is not None:
        n = system.space.n
        pairs = list(pairs) if pairs is not None else list(itertools.combinations(range(n), 2))
        return _exact_t_contractive(system.space, system.f, pairs)
    if system.d is None:
        raise ValueError("metric mode needs d")
    if pairs is None:
        pairs = list(itertools.combinations(list(system.domain)[:16], 2))
    worst, witness = 0.0, None
    for a, b in pairs:
        ta, tb = system.iterate(a, horizon), system.iterate(b, horizon)
        gaps = [system.d(u, v) for u, v in zip(ta, tb)]
        late = max(gaps[-tail_window(len(gaps)):])
        if late > worst:
            worst, witness = late, (a, b)
    if worst <= tolerance:
        return Check(PASS, None, f"max late iterate gap {worst}")
    return Check(FAIL, {"pair": witness, "gap": worst}, "iterates of this pair stay apart")


# --------------------------------------------------------------------------
# (A1), (A2), uniform cover

def _settle(values: Sequence[float], eps: float) -> int | None:
    """First index from which every value is at most ``eps``."""
    n = len(values)
    for i in range(n - 1, -1, -1):
        if values[i] > eps:
            return i + 1 if i + 1 < n else None
    return 0


def _settled_by(values, eps, limit) -> bool:
    n = _settle(values, eps)
    return n is not None and n <= limit


def _continuity(system: IterationSystem, points, steps) -> Check:
    perturb = system.perturb or (lambda x, h: x + h)
    for x in points:
        fx = system.f(x)
        gaps = [system.d(system.f(perturb(x, h)), fx) for h in steps]
        if not (gaps[-1] <= 1e-6 and gaps[-1] <= gaps[0]):
            return Check(FAIL, {"x": x, "gaps": gaps}, "image does not follow small perturbations")
    return Check(PASS, None, f"spot-checked at {len(points)} point(s)")


def uniform_cover_condition_check(system: IterationSystem, horizon: int = 64, tolerance: float = 1e-9) -> Check:
    """Diameter of ``f^i(O)`` must tend to 0 (ε-ball surrogate for the uniform cover condition)."""
    O = list(system.neighborhood)
    if len(O) < 2:
        return Check(INCONCLUSIVE, None, "need at least two neighbourhood samples")
    orbits = [system.iterate(x, horizon) for x in O]
    diams = [max(system.d(orbits[a][i], orbits[b][i]) for a, b in itertools.combinations(range(len(O)), 2))
             for i in range(horizon + 1)]
    if tends_to_zero(diams, tolerance):
        return Check(PASS, diams[-1], "diameters of iterated O shrink to 0")
    return Check(FAIL, diams[-1], "diameter of iterated O stays positive")


def a1_a2_check(system: IterationSystem, xbar=None, epsilon_schedule: Sequence[float] = (1e-1, 1e-3, 1e-6, 1e-9),
                horizon: int = 64, divergence_bound: float = 1e12,
                continuity_steps: Sequence[float] = (1e-3, 1e-6, 1e-9)) -> RemetrizationReport:
    if system.d is None:
        raise ValueError("a1_a2_check needs a metric")
    d = system.d
    domain = list(system.domain)
    if xbar is None:
        xbar = system.iterate(domain[0], horizon)[-1]
    settle_limit = horizon - tail_window(horizon + 1)

    a1 = Check(PASS, None, f"{len(domain)} sample point(s), eps down to {min(epsilon_schedule)}")
    for x in domain:
        dist = [d(y, xbar) for y in system.iterate(x, horizon)]
        if max(dist) > divergence_bound:
            a1 = Check(REFUTED, {"x": x, "distance": max(dist)}, "iterates diverge")
            break
        bad = next((e for e in epsilon_schedule if not _settled_by(dist, e, settle_limit)), None)
        if bad is not None:
            a1 = Check(REFUTED, {"x": x, "eps": bad, "last_distance": dist[-1]},
                       "iterates do not settle near the candidate")
            break

    O = list(system.neighborhood) or domain
    trajectories = np.array([[d(y, xbar) for y in system.iterate(x, horizon)] for x in O], dtype=float)
    sup_series = trajectories.max(axis=0).tolist()
    a2 = Check(PASS, None, "one index works for every sampled point of O")
    for e in epsilon_schedule:
        if not _settled_by(sup_series, e, settle_limit):
            a2 = Check(REFUTED, {"eps": e, "sup": sup_series[-1]}, "no uniform index over O")
            break

    cont_points = [xbar] + domain[:8]
    continuity = _continuity(system, cont_points, continuity_steps)
    pairs = list(itertools.combinations(domain[:8], 2)) or [(domain[0], domain[0])]
    # A1 at eps puts late iterates of any pair within 2 eps of each other
    t_check = t_contractive_test(system, pairs, horizon, tolerance=2 * min(epsilon_schedule) * (1 + 1e-9))
    uniform = uniform_cover_condition_check(system, horizon)
    return RemetrizationReport(xbar, a1, a2, continuity, t_check, uniform, sup_series)
