"""Orbits of set-valued maps and the monitors run along them.

Images S(x) are generally infinite, so a map is given by a sampler and,
when possible, an exact membership predicate.  Monitors work on the
recorded prefix of an orbit and answer in three values.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .premetric import (
    DEFAULT_TOL,
    INCONCLUSIVE,
    REFUTED,
    SUPPORTED,
    Premetric,
    p_sup,
    tail_window,
    tends_to_zero,
)

__all__ = [
    "SetValuedMap",
    "StepRecord",
    "Orbit",
    "AccumulationCandidate",
    "ContractivityReport",
    "StarProbe",
    "FixedPointClass",
    "OrbitEnded",
    "POLICIES",
    "generate_orbit",
    "find_accumulation_point",
    "monitor_p_contractive",
    "probe_star_property",
    "classify_fixed_point",
    "orbit_dump",
    "STRICT_FIXED_POINT",
    "EMPTY_VALUE",
    "VIOLATION",
]

STRICT_FIXED_POINT = "strict_fixed_point"
EMPTY_VALUE = "empty_value"
VIOLATION = "violation"

POLICIES = ("first-sample", "greedy-min-f", "greedy-max-step")


class OrbitEnded(ValueError):
    """The orbit reached a point with empty image; infinite-orbit monitors do not apply."""


@dataclass
class SetValuedMap:
    """A set-valued map given by a sampler.

    ``sampler(x, budget, rng)`` returns a finite list of points of S(x).
    ``predicate(x, y)`` decides ``y in S(x)`` exactly when available.
    ``known_empty(x)`` returns True/False when emptiness is certified,
    None otherwise.  ``exhaustive`` means the sampler returns all of S(x)
    whenever the budget allows it, so an empty sample certifies emptiness.
    """

    sampler: Callable[[Any, int, random.Random], list]
    predicate: Callable[[Any, Any], bool] | None = None
    known_empty: Callable[[Any], bool | None] | None = None
    exhaustive: bool = False
    name: str = "S"

    def sample(self, x, budget: int = 64, seed: int | random.Random = 0) -> list:
        rng = seed if isinstance(seed, random.Random) else random.Random(seed)
        ys = self.sampler(x, budget, rng)
        return list(ys)[:budget]

    def contains(self, x, y) -> bool | None:
        return None if self.predicate is None else bool(self.predicate(x, y))

    def is_known_empty(self, x) -> bool | None:
        return None if self.known_empty is None else self.known_empty(x)

    @classmethod
    def from_finite(cls, images: dict, name: str = "S") -> "SetValuedMap":
        """Map with explicitly listed finite images; missing keys map to the empty set."""
        images = {k: list(v) for k, v in images.items()}
        return cls(
            sampler=lambda x, budget, rng: images.get(x, [])[:budget],
            predicate=lambda x, y: y in images.get(x, ()),
            known_empty=lambda x: not images.get(x),
            exhaustive=True,
            name=name,
        )


@dataclass
class StepRecord:
    candidates: list
    chosen: Any
    rationale: str


@dataclass
class Orbit:
    points: list
    choice_log: list = field(default_factory=list)
    ended: bool = False

    def __len__(self):
        return len(self.points)

    @property
    def last(self):
        return self.points[-1]

    def certify(self, smap: SetValuedMap) -> bool:
        """Replay the membership predicate on every logged step."""
        if smap.predicate is None:
            return all(r.chosen in r.candidates for r in self.choice_log)
        return all(smap.contains(x, r.chosen) for x, r in zip(self.points, self.choice_log))


@dataclass(frozen=True)
class AccumulationCandidate:
    point: Any
    indices: tuple


@dataclass
class ContractivityReport:
    p_sups: list
    verdict: str
    limit: Any = None
    indices: tuple = ()
    candidates: list = field(default_factory=list)


@dataclass
class StarProbe:
    verdict: str
    witness: Any = None
    detail: str = ""


@dataclass
class FixedPointClass:
    kind: str
    witness: Any = None


def generate_orbit(smap: SetValuedMap, x1, policy: str = "first-sample", max_steps: int = 50,
                   seed: int = 0, budget: int = 64, objective: Callable | None = None,
                   key: Callable | None = None, slack: Callable[[int], Any] | None = None) -> Orbit:
    """Iterate ``x_{i+1} in S(x_i)`` choosing from a sample of each image.

    ``greedy-min-f`` takes the first sampled candidate whose objective value
    is within ``slack(i)`` of the sampled minimum (``slack`` defaults to 0).
    ``greedy-max-step`` takes the candidate maximal under ``key``
    (identity by default), i.e. the farthest admissible move along the
    carrier's order.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    if policy == "greedy-min-f" and objective is None:
        raise ValueError("greedy-min-f requires an objective")
    rng = random.Random(seed)
    orbit = Orbit([x1])
    for i in range(max_steps):
        x = orbit.last
        cands = smap.sample(x, budget, rng)
        if not cands:
            orbit.ended = True
            break
        if policy == "first-sample":
            y, why = cands[0], "first sample"
        elif policy == "greedy-max-step":
            y = max(cands, key=key or (lambda v: v))
            why = "maximal candidate"
        else:
            values = [objective(c) for c in cands]
            best = min(values)
            eps = slack(i) if slack is not None else 0
            j = next(j for j, v in enumerate(values) if v <= best + eps)
            y, why = cands[j], f"within {eps} of sampled min {best}"
        orbit.points.append(y)
        orbit.choice_log.append(StepRecord(cands, y, why))
    return orbit


def _hits(points: Sequence, p: Premetric, c, tol: float) -> list[int]:
    start = len(points) // 2
    return [i for i in range(start, len(points)) if p(c, points[i]) < tol]


def find_accumulation_point(orbit, p: Premetric, candidate_pool: Sequence = (),
                            tolerance: float = DEFAULT_TOL, min_length: int = 8,
                            min_hits: int = 3, tail_candidates: int = 3) -> list[AccumulationCandidate]:
    """Points approached by a subsequence of the orbit.

    Candidates are the pool followed by the last few orbit points.  One is
    kept when at least ``min_hits`` indices in the second half of the orbit
    lie within ``tolerance`` of it.  Candidates mutually within tolerance
    are merged, keeping the earlier one, so several survivors signal limits
    that ``p`` keeps apart.
    """
    points = orbit.points if isinstance(orbit, Orbit) else list(orbit)
    if len(points) < min_length:
        return []
    cands = list(candidate_pool)
    for x in reversed(points[-tail_candidates:]):
        if all(x != c for c in cands):
            cands.append(x)
    found: list[AccumulationCandidate] = []
    for c in cands:
        idx = _hits(points, p, c, tolerance)
        if len(idx) < min_hits:
            continue
        if any(p(c, f.point) < tolerance and p(f.point, c) < tolerance for f in found):
            continue
        found.append(AccumulationCandidate(c, tuple(idx)))
    return found


def _p_sups(points, p, smap, budget, seed):
    out = []
    for i, x in enumerate(points):
        sample = smap.sample(x, budget, seed + i)
        out.append(p_sup(p, sample, x, budget))
    return out


def monitor_p_contractive(orbit: Orbit, p: Premetric, smap: SetValuedMap, budget: int = 64,
                          tolerance: float = 1e-6, candidate_pool: Sequence = (), seed: int = 0,
                          refute_floor: float = 1e-3) -> ContractivityReport:
    """Look for a convergent subsequence along which ``p_{S(x)}(x) -> 0``.

    Sampled sup values are lower bounds, so the verdict is ``refuted`` only
    when they stay at or above ``refute_floor`` over the whole second half
    of the orbit.
    """
    if isinstance(orbit, Orbit) and orbit.ended:
        raise OrbitEnded(f"orbit ended at {orbit.last!r}")
    points = orbit.points
    sups = _p_sups(points, p, smap, budget, seed)
    cands = find_accumulation_point(points, p, candidate_pool, tolerance)
    for c in cands:
        dist = [p(c.point, points[i]) for i in c.indices]
        along = [sups[i] for i in c.indices]
        if tends_to_zero(dist, tolerance) and tends_to_zero(along, tolerance):
            return ContractivityReport(sups, SUPPORTED, c.point, c.indices, cands)
    half = sups[len(sups) // 2:]
    if half and min(half) >= refute_floor:
        return ContractivityReport(sups, REFUTED, None, (), cands)
    return ContractivityReport(sups, INCONCLUSIVE, None, (), cands)


def _approach(points, p, xbar, tol):
    return [i for i in range(len(points) // 2, len(points)) if p(xbar, points[i]) < tol]


def probe_star_property(smap: SetValuedMap, orbit, xbar, variant: str = "star1",
                        p: Premetric | None = None, budget: int = 64, tolerance: float = 1e-6,
                        seed: int = 0, min_hits: int = 2) -> StarProbe:
    """Probe image persistence along the subsequence approaching ``xbar``.

    ``variant="star1"``: each sampled ``y in S(xbar)``, ``y != xbar``, must
    itself lie in ``S(x_i)`` along the subsequence.  ``variant="star"``:
    points of ``S(x_i)`` must approach ``y``.  Refutation needs exact
    information (a predicate, or exhaustive finite images) along the whole
    probed tail.
    """
    if variant not in ("star", "star1"):
        raise ValueError("variant must be 'star' or 'star1'")
    points = orbit.points if isinstance(orbit, Orbit) else list(orbit)
    if p is None:
        raise ValueError("a premetric is required to locate the subsequence")
    sub = _approach(points, p, xbar, tolerance)
    if not sub:
        return StarProbe(INCONCLUSIVE, None, "no subsequence approaches the candidate")
    ys = [y for y in smap.sample(xbar, budget, seed) if y != xbar]
    if not ys:
        return StarProbe(SUPPORTED, None, "vacuous: no sampled image point other than the candidate")
    rng = random.Random(seed)
    last = sub[-tail_window(len(sub)):]
    for y in ys:
        if variant == "star1":
            member = []
            for i in sub:
                known = smap.contains(points[i], y)
                if known is None:
                    known = y in smap.sample(points[i], budget, rng)
                    exact = smap.exhaustive
                else:
                    exact = True
                member.append((i, known, exact))
            hits = [i for i, k, _ in member if k]
            if len(hits) >= min_hits and any(i in last for i in hits):
                continue
            if not hits and all(e for _, _, e in member):
                return StarProbe(REFUTED, y, "y is outside S(x_i) along the whole probed tail")
            return StarProbe(INCONCLUSIVE, y, "membership not established along the tail")
        else:
            gaps = []
            for i in sub:
                near = smap.sample(points[i], budget, rng)
                if smap.contains(points[i], y):
                    near.append(y)
                gaps.append(min((p(y, z) for z in near), default=float("inf")))
            if tends_to_zero(gaps, tolerance):
                continue
            if smap.exhaustive and min(gaps[-len(last):]) >= tolerance:
                return StarProbe(REFUTED, y, "image points stay away from y along the tail")
            return StarProbe(INCONCLUSIVE, y, "no sampled approach to y")
    return StarProbe(SUPPORTED, None, f"{len(ys)} image point(s) persist along {len(sub)} indices")


def classify_fixed_point(smap: SetValuedMap, xbar, p: Premetric, tolerance: float = 0.0,
                         budget: int = 64, seed: int = 0) -> FixedPointClass:
    if smap.is_known_empty(xbar):
        return FixedPointClass(EMPTY_VALUE)
    ys = smap.sample(xbar, budget, seed)
    if not ys:
        if smap.exhaustive:
            return FixedPointClass(EMPTY_VALUE)
        return FixedPointClass(INCONCLUSIVE, None)
    for y in ys:
        if p(y, xbar) > tolerance:
            return FixedPointClass(VIOLATION, y)
    return FixedPointClass(STRICT_FIXED_POINT)


def orbit_dump(points: Sequence, f: Callable | None = None, p_sups: Sequence | None = None) -> list[str]:
    """One tab-separated record per step: index, point, f-value, p_sup estimate."""
    lines = []
    for i, x in enumerate(points):
        fv = "" if f is None else str(f(x))
        ps = "" if p_sups is None or i >= len(p_sups) else str(p_sups[i])
        lines.append(f"{i}\t{x}\t{fv}\t{ps}")
    return lines
