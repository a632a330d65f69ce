"""Generalized distances without symmetry or triangle inequality.

A p-space couples a premetric ``p`` with the convergence of an underlying
first countable topology.  Convergence is only ever observed on finite
prefixes, so every check here is a finite-horizon reading and reports are
three-valued.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

__all__ = [
    "DEFAULT_TOL",
    "PASS",
    "FAIL",
    "INCONCLUSIVE",
    "SUPPORTED",
    "REFUTED",
    "Premetric",
    "Probe",
    "PSpaceInstance",
    "AxiomStatus",
    "AxiomReport",
    "SigmaCauchyVerdict",
    "tail_window",
    "tends_to_zero",
    "base_convergence",
    "audit_axioms",
    "p_sup",
    "sigma_p_length",
    "is_sigma_p_cauchy",
]

DEFAULT_TOL = 1e-9

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
SUPPORTED, REFUTED = "supported", "refuted"


@dataclass(frozen=True)
class Premetric:
    """Wraps a distance callable ``fn(x, y) -> value >= 0``.

    ``exact`` marks carriers whose values are exact (Fractions, integers);
    for those, zero means exactly zero.  Float carriers treat anything at
    most ``tol`` as zero.
    """

    fn: Callable[[Any, Any], Any]
    exact: bool = True
    tol: float = DEFAULT_TOL
    name: str = "p"

    def __call__(self, x, y):
        return self.fn(x, y)

    def is_zero(self, value) -> bool:
        return value == 0 if self.exact else abs(value) <= self.tol


@dataclass(frozen=True)
class Probe:
    """A declared convergent sequence with its intended limit."""

    name: str
    sequence: tuple
    limit: Any


@dataclass
class PSpaceInstance:
    """Carrier, premetric and a convergence oracle built from a neighbourhood base.

    ``converges(sequence, x)`` answers whether a finite prefix is read as
    converging to ``x``.  ``sample_points(k, rng)`` draws carrier points for
    pair checks.  ``probes`` are the registered convergent sequences.
    """

    name: str
    p: Premetric
    converges: Callable[[Sequence, Any], bool]
    sample_points: Callable[[int, random.Random], list] | None = None
    probes: list = field(default_factory=list)
    pool: list = field(default_factory=list)
    tail_tol: float = 1e-6


@dataclass
class AxiomStatus:
    status: str
    witness: Any = None
    checked: int = 0


@dataclass
class AxiomReport:
    axioms: dict

    @property
    def passed(self) -> bool:
        return all(s.status == PASS for s in self.axioms.values())

    def failed(self) -> list[str]:
        return [k for k, s in self.axioms.items() if s.status == FAIL]

    def as_dict(self) -> dict:
        return {k: {"status": s.status, "witness": s.witness, "checked": s.checked}
                for k, s in self.axioms.items()}


@dataclass(frozen=True)
class SigmaCauchyVerdict:
    verdict: str
    partial_length: Any


def tail_window(n: int, fraction: float = 0.25) -> int:
    return max(1, int(n * fraction))


def tends_to_zero(values: Sequence, tol: float = DEFAULT_TOL, fraction: float = 0.25) -> bool:
    """Finite-horizon reading of ``values -> 0``.

    The maximum over the last window must be below ``tol`` and no larger
    than the maximum over the preceding window.
    """
    values = list(values)
    if len(values) < 2:
        return False
    w = tail_window(len(values), fraction)
    last = max(values[-w:])
    before = values[-2 * w:-w] or values[:1]
    return last < tol and last <= max(before)


def base_convergence(in_base: Callable[[Any, int, Any], bool], depth: int,
                     fraction: float = 0.25) -> Callable[[Sequence, Any], bool]:
    """Convergence oracle from a nested base ``in_base(center, level, point)``.

    A prefix converges to ``x`` when its last window lies in the level-k
    neighbourhood of ``x`` for every level k up to ``depth``.
    """

    def converges(sequence, x) -> bool:
        seq = list(sequence)
        if not seq:
            return False
        tail = seq[-tail_window(len(seq), fraction):]
        return all(in_base(x, k, y) for k in range(1, depth + 1) for y in tail)

    return converges


def _interleave(a: Sequence, b: Sequence) -> list:
    out = []
    for u, v in zip(a, b):
        out += [u, v]
    return out


def audit_axioms(instance: PSpaceInstance, probes: Sequence[Probe] | None = None,
                 pair_budget: int = 200, tail_tol: float | None = None, seed: int = 0) -> AxiomReport:
    """Check the p-space axioms on sampled pairs and declared probe sequences.

    Besides the probes themselves, each probe is also checked in the two
    rearranged forms that keep convergence: interleaved with its limit, and
    with consecutive entries swapped.  Axiom (ii) is also exercised against
    every other declared limit, which is how a double limit gets accepted.
    """
    p = instance.p
    probes = list(instance.probes if probes is None else probes)
    if tail_tol is None:
        tail_tol = instance.tail_tol
    rng = random.Random(seed)
    report = {}

    # (i) on sampled pairs
    pts = instance.sample_points(pair_budget, rng) if instance.sample_points else []
    pts += [pr.limit for pr in probes]
    checked, witness = 0, None
    for x in pts:
        checked += 1
        if p(x, x) < 0 or not p.is_zero(p(x, x)):
            witness = {"x": x, "y": x, "p": p(x, x)}
            break
    if witness is None:
        pairs = list(itertools.combinations(pts, 2))
        rng.shuffle(pairs)
        for x, y in pairs[:pair_budget]:
            if x == y:
                continue
            checked += 1
            for a, b in ((x, y), (y, x)):
                v = p(a, b)
                if v < 0 or p.is_zero(v):
                    witness = {"x": a, "y": b, "p": v}
                    break
            if witness:
                break
    if witness is not None:
        report["i"] = AxiomStatus(FAIL, witness, checked)
    else:
        report["i"] = AxiomStatus(PASS if checked else INCONCLUSIVE, None, checked)

    for pr in probes:
        if not instance.converges(pr.sequence, pr.limit):
            raise ValueError(f"probe {pr.name!r}: declared limit is rejected by the convergence oracle")

    limits = []
    for pr in probes:
        if all(pr.limit != q for q in limits):
            limits.append(pr.limit)

    statuses = {k: AxiomStatus(INCONCLUSIVE) for k in ("ii", "iii", "ii'", "iii'")}

    def mark(key, ok, witness):
        st = statuses[key]
        st.checked += 1
        if not ok and st.status != FAIL:
            st.status, st.witness = FAIL, witness
        elif ok and st.status == INCONCLUSIVE:
            st.status = PASS

    for pr in probes:
        seq = list(pr.sequence)
        variants = [(pr.name, seq)]
        variants.append((pr.name + ":interleaved", _interleave([pr.limit] * len(seq), seq)))
        swapped = []
        for j in range(0, len(seq) - 1, 2):
            swapped += [seq[j + 1], seq[j]]
        variants.append((pr.name + ":swapped", swapped))
        for vname, s in variants:
            if len(s) < 2:
                continue
            to_limit = [p(pr.limit, y) for y in s]
            forward = [p(s[j + 1], s[j]) for j in range(len(s) - 1)]
            backward = [p(s[j], s[j + 1]) for j in range(len(s) - 1)]
            # every variant converges to the declared limit
            mark("ii'", tends_to_zero(to_limit, tail_tol) or _all_zero(p, to_limit),
                 {"probe": vname, "limit": pr.limit, "tail": to_limit[-3:]})
            mark("iii", tends_to_zero(forward, tail_tol) or _all_zero(p, forward),
                 {"probe": vname, "tail": forward[-3:]})
            mark("iii'", tends_to_zero(backward, tail_tol) or _all_zero(p, backward),
                 {"probe": vname, "tail": backward[-3:]})
            for lim in limits:
                dist = [p(lim, y) for y in s]
                if tends_to_zero(dist, tail_tol) or _all_zero(p, dist):
                    mark("ii", instance.converges(s, lim), {"probe": vname, "limit": lim})
    report.update(statuses)
    return AxiomReport(report)


def _all_zero(p: Premetric, values) -> bool:
    values = list(values)
    w = tail_window(len(values))
    return bool(values) and all(p.is_zero(v) for v in values[-w:])


def p_sup(p: Premetric, set_sampler, x, budget: int):
    """Lower estimate of ``sup_{y in C} p(y, x)`` from the first ``budget`` samples.

    ``set_sampler`` is an iterable or a zero-argument callable returning a
    fresh iterator; using a prefix-stable order makes the estimate monotone
    in ``budget``.  An empty sample gives 0.
    """
    it = set_sampler() if callable(set_sampler) else iter(set_sampler)
    best = 0
    for y in itertools.islice(it, budget):
        v = p(y, x)
        if v > best:
            best = v
    return best


def sigma_p_length(p: Premetric, prefix: Sequence):
    """Sum of ``p(x_{i+1}, x_i)`` over consecutive pairs."""
    if not prefix:
        raise ValueError("empty segment")
    return sum((p(prefix[i + 1], prefix[i]) for i in range(len(prefix) - 1)), 0)


def is_sigma_p_cauchy(p: Premetric, prefix: Sequence, tail_tolerance: float = 1e-6,
                      divergence_bound: float = 1e6, min_length: int = 8) -> SigmaCauchyVerdict:
    """Semi-decision of finite p-length on a prefix.

    ``supported`` when the increments over the last window sum to less than
    ``tail_tolerance``; ``refuted`` once the partial length exceeds
    ``divergence_bound``.
    """
    steps = [p(prefix[i + 1], prefix[i]) for i in range(len(prefix) - 1)]
    total = sum(steps, 0)
    if total > divergence_bound:
        return SigmaCauchyVerdict(REFUTED, total)
    if len(prefix) < min_length:
        return SigmaCauchyVerdict(INCONCLUSIVE, total)
    tail_mass = sum(steps[-tail_window(len(steps)):], 0)
    if tail_mass < tail_tolerance:
        return SigmaCauchyVerdict(SUPPORTED, total)
    return SigmaCauchyVerdict(INCONCLUSIVE, total)


def absolute_difference(x, y):
    return abs(x - y)


def as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)
