"""Descent solvers built on set-valued orbits.

* ``strong_min_descent`` iterates the strict sublevel map and then tries to
  break the candidate with adversarial minimizing sequences.
* ``ekeland_descent`` iterates ``S(x) = {y : p(y, x) < f(x) - f(y)}`` until
  the image is empty, tracking the p-length of the path.
* ``cantor_intersect`` follows nested closed sets and looks for a point
  common to all of them.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from .orbit_engine import (
    EMPTY_VALUE,
    SetValuedMap,
    classify_fixed_point,
    find_accumulation_point,
    generate_orbit,
    monitor_p_contractive,
)
from .premetric import INCONCLUSIVE, Premetric, PSpaceInstance, sigma_p_length, tends_to_zero

__all__ = [
    "GridDomain",
    "ObjectiveFunction",
    "DescentConfig",
    "MinimizationCertificate",
    "NestedFamily",
    "CantorResult",
    "CaristiReport",
    "ImproperObjective",
    "UnboundedBelow",
    "InvariantViolation",
    "sublevel_map",
    "ekeland_map",
    "strong_min_descent",
    "ekeland_descent",
    "caristi_check",
    "cantor_intersect",
    "CERTIFIED",
    "NOT_CERTIFIED",
]

CERTIFIED = "certified"
NOT_CERTIFIED = "not certified"


class ImproperObjective(ValueError):
    """The objective is +inf on every sampled point."""


class UnboundedBelow(RuntimeError):
    pass


class InvariantViolation(AssertionError):
    pass


@dataclass(frozen=True)
class GridDomain:
    """Rational grid ``lo, lo + step, ..., hi``."""

    lo: Fraction
    hi: Fraction
    step: Fraction

    def __post_init__(self):
        for name in ("lo", "hi", "step"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.step <= 0 or self.hi < self.lo:
            raise ValueError("need step > 0 and hi >= lo")

    def __len__(self):
        return int((self.hi - self.lo) / self.step) + 1

    def points(self) -> list[Fraction]:
        return [self.lo + j * self.step for j in range(len(self))]

    def sample(self, budget: int, rng: random.Random) -> list[Fraction]:
        n = len(self)
        if budget >= n:
            return self.points()
        idx = sorted(rng.sample(range(n), budget))
        return [self.lo + j * self.step for j in idx]

    def exhausted_by(self, budget: int) -> bool:
        return budget >= len(self)


@dataclass
class ObjectiveFunction:
    """Extended-real objective with a domain sampler.

    ``domain`` is either a :class:`GridDomain` or a callable
    ``(budget, rng) -> list``.  ``lower_bound`` is an analytic lower bound,
    when one is known.
    """

    f: Callable[[Any], Any]
    domain: Any
    lower_bound: Any = None
    name: str = "f"

    def __call__(self, x):
        return self.f(x)

    def sample(self, budget: int, rng: random.Random) -> list:
        if isinstance(self.domain, GridDomain):
            return self.domain.sample(budget, rng)
        return list(self.domain(budget, rng))

    def exhaustive(self, budget: int) -> bool:
        return isinstance(self.domain, GridDomain) and self.domain.exhausted_by(budget)

    def check_proper(self, budget: int, rng: random.Random) -> None:
        if all(math.isinf(self.f(x)) for x in self.sample(budget, rng)):
            raise ImproperObjective(f"{self.name} is +inf on every sampled point")


@dataclass
class DescentConfig:
    eps0: Any = Fraction(1, 1 << 20)
    tolerance: float = 0.0
    budget: int = 1 << 15
    max_steps: int = 200
    seed: int = 0
    floor: float = -1e12
    probes: int = 4
    probe_radius: Any = None
    monitor_tolerance: float = 1e-6

    def __post_init__(self):
        if self.budget < 1 or self.max_steps < 0:
            raise ValueError("budget must be positive and max_steps nonnegative")
        if self.eps0 < 0 or self.tolerance < 0:
            raise ValueError("slack and tolerance must be nonnegative")

    def slack(self, i: int):
        # summable: sum_i eps0 * 2^-i = 2 * eps0
        e = self.eps0
        return e / (1 << i) if isinstance(e, (int, Fraction)) else e * 2.0 ** -i


@dataclass
class MinimizationCertificate:
    point: Any
    value: Any
    orbit: list
    sigma_length: Any
    residual: Any
    steps: int
    evaluations: int
    length_bound_ok: bool = True
    strong_minimum: str | None = None
    classification: str | None = None
    lower_bound: Any = None
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "point": self.point,
            "value": self.value,
            "orbit_length": len(self.orbit),
            "sigma_length": self.sigma_length,
            "residual": self.residual,
            "steps": self.steps,
            "evaluations": self.evaluations,
            "length_bound_ok": self.length_bound_ok,
            "strong_minimum": self.strong_minimum,
            "classification": self.classification,
            "lower_bound": self.lower_bound,
            "notes": list(self.notes),
        }


def sublevel_map(f: ObjectiveFunction, budget: int = 1 << 15) -> SetValuedMap:
    """``S_f(x) = {y : f(y) < f(x)}`` over the sampled domain."""

    def sampler(x, b, rng):
        fx = f(x)
        return [y for y in f.sample(b, rng) if f(y) < fx]

    return SetValuedMap(
        sampler=sampler,
        predicate=lambda x, y: f(y) < f(x),
        exhaustive=f.exhaustive(budget),
        name=f"S_{f.name}",
    )


def ekeland_map(f: ObjectiveFunction, p: Premetric, budget: int = 1 << 15) -> SetValuedMap:
    """``S(x) = {y : p(y, x) < f(x) - f(y)}`` over the sampled domain."""

    def sampler(x, b, rng):
        fx = f(x)
        return [y for y in f.sample(b, rng) if p(y, x) < fx - f(y)]

    return SetValuedMap(
        sampler=sampler,
        predicate=lambda x, y: p(y, x) < f(x) - f(y),
        exhaustive=f.exhaustive(budget),
        name=f"ekeland({f.name})",
    )


def _check_floor(f, x, config):
    if f(x) < config.floor:
        raise UnboundedBelow(f"objective fell to {f(x)} below floor {config.floor} at {x!r}")


def ekeland_descent(f: ObjectiveFunction, p: Premetric, x1, config: DescentConfig | None = None) -> MinimizationCertificate:
    config = config or DescentConfig()
    rng = random.Random(config.seed)
    f.check_proper(config.budget, rng)
    if math.isinf(f(x1)):
        raise ValueError("starting point must lie in dom f")
    smap = ekeland_map(f, p, config.budget)
    orbit = [x1]
    length = 0
    evaluations = 0
    for i in range(config.max_steps):
        x = orbit[-1]
        cands = smap.sample(x, config.budget, rng)
        evaluations += config.budget
        if not cands:
            break
        values = [f(y) for y in cands]
        best = min(values)
        eps = config.slack(i)
        y = next(c for c, v in zip(cands, values) if v <= best + eps)
        if not f(y) < f(x):
            raise InvariantViolation("objective did not strictly decrease")
        length += p(y, x)
        orbit.append(y)
        _check_floor(f, y, config)
        if length > f(x1) - f(y):
            raise InvariantViolation(f"p-length {length} exceeds f(x1) - f(x_n) = {f(x1) - f(y)}")
    xbar = orbit[-1]
    fx = f(xbar)
    residual = 0
    for y in f.sample(config.budget, rng):
        gap = fx - f(y) - p(y, xbar)
        if gap > residual:
            residual = gap
    cert = MinimizationCertificate(
        point=xbar, value=fx, orbit=orbit, sigma_length=sigma_p_length(p, orbit),
        residual=residual, steps=len(orbit) - 1, evaluations=evaluations,
        lower_bound=f.lower_bound,
    )
    bound = f(x1) - fx
    cert.length_bound_ok = cert.sigma_length <= bound
    if f.lower_bound is not None:
        cert.length_bound_ok &= cert.sigma_length <= f(x1) - f.lower_bound
    if residual > config.tolerance:
        cert.notes.append("stopped at the step limit with improving samples left")
    if f.exhaustive(config.budget) and residual <= config.tolerance:
        cert.classification = EMPTY_VALUE
    else:
        cert.classification = INCONCLUSIVE
    return cert


def _minimizing_probes(f, points, xbar, p, levels, rng):
    """Sequences z_j with f(z_j) at most ``levels[j]`` above the sampled minimum."""
    fvals = {x: f(x) for x in points}
    m = min(fvals.values())
    probes = {"far": [], "near": [], "random": [], "alternating": []}
    for j, delta in enumerate(levels):
        level_set = [x for x in points if fvals[x] - m <= delta]
        far = max(level_set, key=lambda z: p(xbar, z))
        near = min((z for z in level_set if z != xbar), key=lambda z: p(xbar, z), default=xbar)
        probes["far"].append(far)
        probes["near"].append(near)
        probes["random"].append(rng.choice(level_set))
        probes["alternating"].append(far if j % 2 else near)
    return probes


def _strong_min_probe(f, points, xbar, p, config, rng):
    """Adversarial check that every sampled minimizing sequence approaches ``xbar``.

    Levels run from the spread of sampled values down to the last gap above
    the sampled minimum, so each level set is distinct.  The finest level
    set has to fit inside a ball of ``probe_radius`` around ``xbar``.
    """
    fvals = sorted({f(x) for x in points if not math.isinf(f(x))})
    m = fvals[0]
    minimizers = [x for x in points if f(x) == m]
    if config.probe_radius is None:
        gaps = sorted({p(xbar, z) for z in points if z != xbar})
        radius = 4 * gaps[0] if gaps else 0
    else:
        radius = config.probe_radius
    if any(p(xbar, z) > radius for z in minimizers):
        return NOT_CERTIFIED, "another sampled minimizer lies outside the probe radius"
    if len(fvals) < 2:
        return NOT_CERTIFIED, "objective is constant on the samples"
    top, finest = fvals[-1] - m, fvals[1] - m
    levels, delta = [], top
    while delta >= finest and len(levels) < 64:
        levels.append(delta)
        delta = delta / 2
    if not levels or levels[-1] != finest:
        levels.append(finest)
    probes = dict(itertools.islice(_minimizing_probes(f, points, xbar, p, levels, rng).items(), config.probes))
    escaped = []
    for name, zs in probes.items():
        dist = [p(xbar, z) for z in zs]
        if dist[-1] > radius:
            escaped.append((name, zs[-1]))
    if escaped:
        return NOT_CERTIFIED, f"minimizing sequence {escaped[0][0]!r} ends at {escaped[0][1]!r}"
    return CERTIFIED, f"{len(probes)} probe sequences end within {radius} of the candidate"


def strong_min_descent(f: ObjectiveFunction, instance: PSpaceInstance, x1,
                       config: DescentConfig | None = None) -> MinimizationCertificate:
    config = config or DescentConfig()
    rng = random.Random(config.seed)
    f.check_proper(config.budget, rng)
    p = instance.p
    smap = sublevel_map(f, config.budget)
    orbit = generate_orbit(smap, x1, policy="greedy-min-f", max_steps=config.max_steps,
                           seed=config.seed, budget=config.budget, objective=f, slack=config.slack)
    pts = orbit.points
    for a, b in zip(pts, pts[1:]):
        if not f(b) < f(a):
            raise InvariantViolation("objective values along the orbit must strictly decrease")
    notes = ["p-side evidence only: open-cover contractivity is not checkable on this carrier"]
    if orbit.ended:
        xbar = orbit.last
        cls = classify_fixed_point(smap, xbar, p, budget=config.budget, seed=config.seed).kind
    else:
        report = monitor_p_contractive(orbit, p, smap, budget=min(config.budget, 256),
                                       tolerance=config.monitor_tolerance, candidate_pool=instance.pool,
                                       seed=config.seed)
        notes.append(f"p-contractive: {report.verdict}")
        xbar = report.limit if report.limit is not None else orbit.last
        cls = classify_fixed_point(smap, xbar, p, budget=config.budget, seed=config.seed).kind
    cert = MinimizationCertificate(
        point=xbar, value=f(xbar), orbit=pts, sigma_length=sigma_p_length(p, pts),
        residual=0, steps=len(pts) - 1, evaluations=config.budget * len(pts),
        classification=cls, lower_bound=f.lower_bound,
    )
    samples = f.sample(config.budget, rng)
    if xbar not in samples:
        samples.append(xbar)
    fx = f(xbar)
    cert.residual = max([fx - f(y) for y in samples if f(y) < fx], default=0)
    if cert.residual > 0:
        cert.strong_minimum = INCONCLUSIVE
        notes.append("sampled values below the candidate remain")
    else:
        cert.strong_minimum, why = _strong_min_probe(f, samples, xbar, p, config, rng)
        notes.append(why)
    cert.notes = notes
    return cert


# --------------------------------------------------------------------------
# Caristi

@dataclass
class CaristiReport:
    premise_holds: bool
    witness: Any = None
    fixed_point: Any = None
    is_fixed: bool | None = None
    all_samples_fixed: bool | None = None
    certificate: MinimizationCertificate | None = None


def caristi_check(T: Callable, f: ObjectiveFunction, p: Premetric, samples: Sequence,
                  tolerance: float = 0.0, config: DescentConfig | None = None) -> CaristiReport:
    """Check ``f(Tx) + p(Tx, x) <= f(x)`` on samples, then descend from the first one."""
    for x in samples:
        tx = T(x)
        if f(tx) + p(tx, x) > f(x):
            return CaristiReport(False, witness={"x": x, "Tx": tx, "lhs": f(tx) + p(tx, x), "rhs": f(x)})
    cert = ekeland_descent(f, p, samples[0], config)
    xbar = cert.point
    return CaristiReport(
        premise_holds=True,
        fixed_point=xbar,
        is_fixed=p(T(xbar), xbar) <= tolerance,
        all_samples_fixed=all(p(T(x), x) <= tolerance for x in samples),
        certificate=cert,
    )


# --------------------------------------------------------------------------
# Cantor

@dataclass
class NestedFamily:
    """Closed sets ``C_1 ⊇ C_2 ⊇ ...`` given by membership and samplers.

    ``contains(i, x)`` tests ``x in C_i`` (1-based), ``sample(i, budget, rng)``
    lists points of ``C_i``.  ``pool`` holds external limit candidates.
    """

    contains: Callable[[int, Any], bool]
    sample: Callable[[int, int, random.Random], list]
    pool: list = field(default_factory=list)
    name: str = "C"

    def spot_check(self, depth: int, budget: int, rng: random.Random):
        """First sampled point of some ``C_{i+1}`` outside ``C_i``, or None."""
        for i in range(1, depth):
            for y in self.sample(i + 1, budget, rng):
                if not self.contains(i, y):
                    return {"set": i + 1, "point": y}
        return None

    @classmethod
    def intervals(cls, bounds: Callable[[int], tuple], pool=(), name="intervals") -> "NestedFamily":
        """Family of closed rational intervals ``[a_i, b_i]``; samples start with the endpoints."""

        def contains(i, x):
            a, b = bounds(i)
            return a <= x <= b

        def sample(i, budget, rng):
            a, b = bounds(i)
            out = [a, b, (a + b) / 2]
            while len(out) < budget:
                out.append(a + (b - a) * Fraction(rng.randint(0, 1 << 12), 1 << 12))
            return out[:budget]

        return cls(contains, sample, list(pool), name)


@dataclass
class CantorResult:
    point: Any
    status: str
    orbit: list
    depths: list
    membership: dict


NO_POINT = "no accumulation point within budget"


def _depth(family, x, cap):
    """``sup{m : x in C_m}`` by linear search; ``cap`` stands for infinity."""
    k = 0
    while k < cap and family.contains(k + 1, x):
        k += 1
    return k


def cantor_intersect(family: NestedFamily, instance: PSpaceInstance, config: DescentConfig | None = None,
                     cap: int = 64, budget: int = 16, probe_depth: int | None = None) -> CantorResult:
    """Build the orbit that keeps jumping one set deeper and look for a common point.

    Depth searches stop at ``cap``; a point reaching it is only a candidate
    and must still pass every predicate up to ``probe_depth`` (``2 * cap``
    by default) before it is returned.
    """
    config = config or DescentConfig(max_steps=cap)
    probe_depth = 2 * cap if probe_depth is None else probe_depth
    rng = random.Random(config.seed)
    p = instance.p
    bad = family.spot_check(min(cap, 16), budget, random.Random(config.seed))
    if bad is not None:
        raise ValueError(f"family is not nested: {bad['point']!r} is in C_{bad['set']} but not C_{bad['set'] - 1}")
    first = family.sample(1, budget, rng)
    if not first:
        return CantorResult(None, "inconclusive: cannot witness nonempty C_1", [], [], {})
    orbit = [first[0]]
    depths = [_depth(family, orbit[0], cap)]
    status = None
    for _ in range(config.max_steps):
        k = depths[-1]
        if k >= cap:
            break
        nxt = [y for y in family.sample(k + 1, budget, rng)
               if all(family.contains(j, y) for j in range(1, k + 2))]
        if not nxt:
            status = f"inconclusive: cannot witness nonempty C_{k + 1}"
            break
        fresh = [c for c in nxt if c != orbit[-1]] or nxt
        scored = [(_depth(family, c, cap), j) for j, c in enumerate(fresh)]
        d, j = max(scored, key=lambda t: (t[0], -t[1]))
        orbit.append(fresh[j])
        depths.append(d)
    cands = [orbit[-1]] if depths[-1] >= cap else []
    for c in find_accumulation_point(orbit, p, family.pool + list(instance.pool),
                                     tolerance=config.monitor_tolerance, min_length=4):
        if all(c.point != d for d in cands):
            cands.append(c.point)
    membership = {}
    for c in cands:
        ok = all(family.contains(j, c) for j in range(1, probe_depth + 1))
        membership[str(c)] = ok
        if ok:
            return CantorResult(c, "found", orbit, depths, membership)
    return CantorResult(None, status or NO_POINT, orbit, depths, membership)
