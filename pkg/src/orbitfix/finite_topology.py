"""Exact verification of cover-based orbit properties on finite spaces.

Subsets of ``{0, ..., n-1}`` are encoded as integer bitmasks throughout:
bit ``x`` is set iff point ``x`` belongs to the subset.

Open covers quantify over arbitrary subfamilies of the topology, which is
exponential.  Every cover-quantified condition handled here has the form
"every open cover has a member U such that P(U)", and it holds iff the opens
*failing* P do not themselves cover the space (the non-witness reduction).
``exhaustive_cover_check`` keeps the brute-force reading around so the
reduction can be validated against it.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

__all__ = [
    "FiniteSpace",
    "FiniteSetMap",
    "OrbitDescriptor",
    "CoverVerdict",
    "SeparationFlags",
    "FixedPointRecord",
    "NotAnOrbitError",
    "FiniteOrbitError",
    "MAX_POINTS",
    "enumerate_topologies",
    "brute_force_topologies",
    "separation_class",
    "minimal_base",
    "converges_to",
    "witness_mask",
    "is_tau_contractive",
    "exhaustive_cover_check",
    "strong_accumulation_points",
    "is_closed_graph",
    "graph_complement_is_open",
    "cover_condition",
    "check_fixed_point_theorem",
    "enumerate_orbits",
    "enumerate_maps",
    "dumps_instance",
    "loads_instance",
    "SweepSummary",
    "sweep",
]

MAX_POINTS = 4
LARGE_POINTS = 5


class NotAnOrbitError(ValueError):
    """Raised when a descriptor violates x_{i+1} in S(x_i)."""


class FiniteOrbitError(ValueError):
    """Raised when an orbit reaches a point with empty image.

    Such an orbit is finite and ends there, so the infinite-orbit notions
    (contractivity, accumulation) do not apply.
    """


def bits(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def mask_of(points: Iterable[int]) -> int:
    m = 0
    for p in points:
        m |= 1 << p
    return m


@dataclass(frozen=True)
class FiniteSpace:
    n: int
    opens: frozenset

    def __post_init__(self):
        full = self.full
        opens = frozenset(self.opens)
        object.__setattr__(self, "opens", opens)
        if 0 not in opens or full not in opens:
            raise ValueError("topology must contain the empty set and the whole space")
        for u in opens:
            if u & ~full:
                raise ValueError(f"open set {bits(u)} has points outside 0..{self.n - 1}")
        for u, v in itertools.combinations(opens, 2):
            if u | v not in opens or u & v not in opens:
                raise ValueError(f"not closed under union/intersection: {bits(u)}, {bits(v)}")

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "FiniteSpace":
        return cls(n, frozenset(mask_of(s) for s in sets))

    @classmethod
    def discrete(cls, n: int) -> "FiniteSpace":
        return cls(n, frozenset(range(1 << n)))

    @classmethod
    def indiscrete(cls, n: int) -> "FiniteSpace":
        return cls(n, frozenset({0, (1 << n) - 1}))

    @classmethod
    def sierpinski(cls) -> "FiniteSpace":
        # point 0 is the open point
        return cls(2, frozenset({0, 0b01, 0b11}))

    def sorted_opens(self) -> list[int]:
        return sorted(self.opens, key=lambda u: (bin(u).count("1"), u))

    def is_open(self, mask: int) -> bool:
        return mask in self.opens

    def is_closed(self, mask: int) -> bool:
        return (self.full & ~mask) in self.opens


@dataclass(frozen=True)
class FiniteSetMap:
    """A set-valued map on a finite space; ``images[x]`` is the bitmask of S(x)."""

    images: tuple

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(m) for m in self.images))

    @classmethod
    def from_lists(cls, images: Sequence[Iterable[int]]) -> "FiniteSetMap":
        return cls(tuple(mask_of(s) for s in images))

    @property
    def n(self) -> int:
        return len(self.images)

    def image(self, x: int) -> int:
        return self.images[x]

    def contains(self, x: int, y: int) -> bool:
        return bool(self.images[x] >> y & 1)

    def graph(self) -> set[tuple[int, int]]:
        return {(x, y) for x in range(self.n) for y in bits(self.images[x])}

    def fixed_points(self) -> list[int]:
        return [x for x in range(self.n) if self.contains(x, x)]


@dataclass(frozen=True)
class OrbitDescriptor:
    """An eventually periodic sequence ``tail + cycle + cycle + ...``.

    The cycle is reduced to its minimal period on construction.
    """

    tail: tuple
    cycle: tuple

    def __post_init__(self):
        tail = tuple(self.tail)
        cycle = tuple(self.cycle)
        if not cycle:
            raise ValueError("cycle must be nonempty")
        k = len(cycle)
        for d in range(1, k + 1):
            if k % d == 0 and cycle == cycle[:d] * (k // d):
                cycle = cycle[:d]
                break
        object.__setattr__(self, "tail", tail)
        object.__setattr__(self, "cycle", cycle)

    @classmethod
    def stationary(cls, x: int) -> "OrbitDescriptor":
        return cls((), (x,))

    def __getitem__(self, i: int) -> int:
        if i < len(self.tail):
            return self.tail[i]
        return self.cycle[(i - len(self.tail)) % len(self.cycle)]

    @property
    def span(self) -> int:
        """Number of indices after which the sequence repeats with period len(cycle)."""
        return len(self.tail) + len(self.cycle)

    def points(self) -> list[int]:
        return list(self.tail + self.cycle)

    def prefix(self, length: int) -> list[int]:
        return [self[i] for i in range(length)]

    def validate(self, smap: FiniteSetMap) -> None:
        for i in range(self.span):
            x, y = self[i], self[i + 1]
            if smap.image(x) == 0:
                raise FiniteOrbitError(f"S({x}) is empty: the orbit ends at {x}")
            if not smap.contains(x, y):
                raise NotAnOrbitError(f"step {i}: {y} is not in S({x})")


@dataclass(frozen=True)
class CoverVerdict:
    holds: bool
    failing_cover: frozenset | None = None


@dataclass(frozen=True)
class SeparationFlags:
    t0: bool
    t1: bool
    hausdorff: bool
    discrete: bool


@dataclass
class FixedPointRecord:
    closed_graph: bool
    cover_condition: bool
    fixed_points: list = field(default_factory=list)

    @property
    def conclusion(self) -> int | None:
        return self.fixed_points[0] if self.fixed_points else None

    @property
    def consistent(self) -> bool:
        return not (self.closed_graph and self.cover_condition and not self.fixed_points)


# --------------------------------------------------------------------------
# enumeration

def _check_n(n: int, allow_large: bool) -> None:
    cap = LARGE_POINTS if allow_large else MAX_POINTS
    if not 1 <= n <= cap:
        raise ValueError(f"n={n} outside supported range 1..{cap}"
                         + ("" if allow_large else " (n=5 needs allow_large=True)"))
    if n > MAX_POINTS:
        warnings.warn(f"enumerating topologies on {n} points is slow", RuntimeWarning, stacklevel=3)


def enumerate_topologies(n: int, allow_large: bool = False) -> Iterator[FiniteSpace]:
    """Yield every labeled topology on ``n`` points exactly once.

    Finite topologies correspond one-to-one with preorders: the row of a
    point is its minimal open neighbourhood.  We enumerate transitive
    reflexive relations and take their up-closed sets as opens.
    """
    _check_n(n, allow_large)
    others = [[y for y in range(n) if y != x] for x in range(n)]
    choices = [[(1 << x) | mask_of(c) for r in range(n) for c in itertools.combinations(others[x], r)]
               for x in range(n)]
    subsets = range(1 << n)
    for rows in itertools.product(*choices):
        if any(rows[y] & ~rows[x] for x in range(n) for y in bits(rows[x])):
            continue
        opens = frozenset(u for u in subsets
                          if all(rows[x] & ~u == 0 for x in bits(u)))
        yield FiniteSpace(n, opens)


def brute_force_topologies(n: int) -> list[frozenset]:
    """Filter all families of subsets containing the empty set and the whole set."""
    if not 1 <= n <= MAX_POINTS:
        raise ValueError("brute force is only feasible for n <= 4")
    full = (1 << n) - 1
    middle = list(range(1, full))
    found = []
    for choice in range(1 << len(middle)):
        fam = {0, full}
        fam.update(m for j, m in enumerate(middle) if choice >> j & 1)
        if all(u | v in fam and u & v in fam for u in fam for v in fam):
            found.append(frozenset(fam))
    return found


def enumerate_maps(n: int, nonempty: bool = False) -> Iterator[FiniteSetMap]:
    lo = 1 if nonempty else 0
    for images in itertools.product(range(lo, 1 << n), repeat=n):
        yield FiniteSetMap(images)


def enumerate_orbits(smap: FiniteSetMap, start: int) -> Iterator[OrbitDescriptor]:
    """All infinite orbits from ``start`` whose points before the repeat are distinct.

    Each one is a path ``start -> ... -> v`` in the graph of S together with
    a closing edge from ``v`` back to a point on the path.
    """
    n = smap.n

    def extend(path):
        last = path[-1]
        for y in bits(smap.image(last)):
            if y in path:
                j = path.index(y)
                yield OrbitDescriptor(tuple(path[:j]), tuple(path[j:]))
            elif len(path) < n:
                yield from extend(path + [y])

    yield from extend([start])


# --------------------------------------------------------------------------
# basic topology

def minimal_base(space: FiniteSpace) -> list[int]:
    """Smallest open neighbourhood of each point."""
    m = [space.full] * space.n
    for u in space.opens:
        for x in bits(u):
            m[x] &= u
    return m


def separation_class(space: FiniteSpace) -> SeparationFlags:
    n, full = space.n, space.full
    m = minimal_base(space)
    t0 = all(m[x] != m[y] for x, y in itertools.combinations(range(n), 2))
    t1 = all(space.is_closed(1 << x) for x in range(n))
    hausdorff = all(
        any(u >> x & 1 and v >> y & 1 and not u & v for u in space.opens for v in space.opens)
        for x, y in itertools.combinations(range(n), 2)
    )
    discrete = len(space.opens) == 1 << n and full in space.opens
    return SeparationFlags(t0, t1, hausdorff, discrete)


def converges_to(space: FiniteSpace, sequence, x: int) -> bool:
    """Eventual containment of a periodic sequence in the minimal neighbourhood of ``x``.

    A plain list is read as the repeating block of a periodic sequence.
    """
    cycle = sequence.cycle if isinstance(sequence, OrbitDescriptor) else tuple(sequence)
    mx = minimal_base(space)[x]
    return all(mx >> c & 1 for c in cycle)


# --------------------------------------------------------------------------
# cover-quantified conditions

def witness_mask(space: FiniteSpace, opens: Sequence[int], pairs: Iterable[tuple[int, int]]) -> int:
    """Bitmask over ``opens`` of those U with ``a in U`` and ``B subset U`` for some (a, B)."""
    pairs = list(pairs)
    w = 0
    for j, u in enumerate(opens):
        if any(u >> a & 1 and not b & ~u for a, b in pairs):
            w |= 1 << j
    return w


def _reduce(space: FiniteSpace, opens: Sequence[int], wmask: int) -> CoverVerdict:
    non_witness = [u for j, u in enumerate(opens) if not wmask >> j & 1]
    union = 0
    for u in non_witness:
        union |= u
    if union == space.full:
        return CoverVerdict(False, frozenset(non_witness))
    return CoverVerdict(True, None)


def exhaustive_cover_check(space: FiniteSpace, opens: Sequence[int], wmask: int) -> bool:
    """Brute force: every subfamily of ``opens`` covering X contains a witness."""
    k = len(opens)
    for fam in range(1 << k):
        union = 0
        for j in range(k):
            if fam >> j & 1:
                union |= opens[j]
        if union == space.full and not fam & wmask:
            return False
    return True


def _orbit_pairs(smap: FiniteSetMap, orbit: OrbitDescriptor):
    return [(x, smap.image(x)) for x in set(orbit.points())]


def is_tau_contractive(space: FiniteSpace, smap: FiniteSetMap, orbit: OrbitDescriptor) -> CoverVerdict:
    """Every open cover has U and an orbit point x_i with x_i in U, S(x_i) in U."""
    orbit.validate(smap)
    opens = space.sorted_opens()
    return _reduce(space, opens, witness_mask(space, opens, _orbit_pairs(smap, orbit)))


def cover_condition(space: FiniteSpace, smap: FiniteSetMap, orbit: OrbitDescriptor) -> CoverVerdict:
    """Every open cover has U and i with S(x_i) in U and x_{i+2} in U."""
    orbit.validate(smap)
    opens = space.sorted_opens()
    pairs = {(orbit[i + 2], smap.image(orbit[i])) for i in range(orbit.span)}
    return _reduce(space, opens, witness_mask(space, opens, pairs))


def strong_accumulation_points(space: FiniteSpace, smap: FiniteSetMap, orbit: OrbitDescriptor) -> set[int]:
    orbit.validate(smap)
    m = minimal_base(space)
    found = set()
    for xbar in range(space.n):
        nb = m[xbar]
        if any(nb >> c & 1 and not smap.image(c) & ~nb for c in orbit.cycle):
            found.add(xbar)
    return found


def is_closed_graph(space: FiniteSpace, smap: FiniteSetMap) -> bool:
    m = minimal_base(space)
    n = space.n
    for a in range(n):
        for b in range(n):
            if smap.contains(a, b):
                continue
            # the basic box m(a) x m(b) must miss the graph
            if any(smap.image(x) & m[b] for x in bits(m[a])):
                return False
    return True


def graph_complement_is_open(space: FiniteSpace, smap: FiniteSetMap) -> bool:
    """Independent check: the complement equals the union of open boxes inside it."""
    n = space.n
    complement = {(a, b) for a in range(n) for b in range(n)} - smap.graph()
    covered = set()
    for u in space.opens:
        for v in space.opens:
            box = {(a, b) for a in bits(u) for b in bits(v)}
            if box <= complement:
                covered |= box
    return covered == complement


def check_fixed_point_theorem(space: FiniteSpace, smap: FiniteSetMap, orbit: OrbitDescriptor) -> FixedPointRecord:
    return FixedPointRecord(
        closed_graph=is_closed_graph(space, smap),
        cover_condition=cover_condition(space, smap, orbit).holds,
        fixed_points=smap.fixed_points(),
    )


# --------------------------------------------------------------------------
# exhaustive sweeps

@dataclass
class SweepSummary:
    """Tallies from running every check over spaces x maps x orbits."""

    spaces: int = 0
    maps: int = 0
    orbits: int = 0
    tau_agree: int = 0
    cover_agree: int = 0
    graph_agree: int = 0
    theorem_premises: int = 0
    disagreements: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.disagreements and not self.violations

    def merge(self, other: "SweepSummary") -> "SweepSummary":
        return SweepSummary(
            self.spaces + other.spaces, self.maps + other.maps, self.orbits + other.orbits,
            self.tau_agree + other.tau_agree, self.cover_agree + other.cover_agree,
            self.graph_agree + other.graph_agree, self.theorem_premises + other.theorem_premises,
            self.disagreements + other.disagreements, self.violations + other.violations,
        )

    def as_dict(self) -> dict:
        return {
            "spaces": self.spaces, "maps": self.maps, "orbits": self.orbits,
            "tau_agree": self.tau_agree, "cover_agree": self.cover_agree,
            "graph_agree": self.graph_agree, "theorem_premises": self.theorem_premises,
            "disagreements": self.disagreements[:20], "violations": self.violations[:20],
            "consistent": self.consistent,
        }


def sweep(spaces: Iterable[FiniteSpace], maps: Callable[[int], Iterable[FiniteSetMap]] | None = None,
          keep: int = 20) -> SweepSummary:
    """Compare reductions with brute force and test the fixed-point theorem.

    ``maps(n)`` yields the maps to try on an n-point space (all of them by
    default).  Each space is independent, so partial summaries can be
    computed in parallel and merged.
    """
    out = SweepSummary()
    for space in spaces:
        out.spaces += 1
        opens = space.sorted_opens()
        oracle: dict[int, bool] = {}

        def brute(wmask):
            if wmask not in oracle:
                oracle[wmask] = exhaustive_cover_check(space, opens, wmask)
            return oracle[wmask]

        for smap in (maps(space.n) if maps else enumerate_maps(space.n)):
            out.maps += 1
            closed = is_closed_graph(space, smap)
            if closed == graph_complement_is_open(space, smap):
                out.graph_agree += 1
            elif len(out.disagreements) < keep:
                out.disagreements.append({"kind": "closed_graph", "instance": dumps_instance(space, smap)})
            fixed = smap.fixed_points()
            for start in range(space.n):
                for orbit in enumerate_orbits(smap, start):
                    out.orbits += 1
                    tau = _reduce(space, opens, witness_mask(space, opens, _orbit_pairs(smap, orbit)))
                    pairs = {(orbit[i + 2], smap.image(orbit[i])) for i in range(orbit.span)}
                    cw = witness_mask(space, opens, pairs)
                    cov = _reduce(space, opens, cw)
                    if tau.holds == brute(witness_mask(space, opens, _orbit_pairs(smap, orbit))):
                        out.tau_agree += 1
                    elif len(out.disagreements) < keep:
                        out.disagreements.append({"kind": "tau", "instance": dumps_instance(space, smap, orbit)})
                    if cov.holds == brute(cw):
                        out.cover_agree += 1
                    elif len(out.disagreements) < keep:
                        out.disagreements.append({"kind": "cover", "instance": dumps_instance(space, smap, orbit)})
                    if closed and cov.holds:
                        out.theorem_premises += 1
                        if not fixed:
                            out.violations.append(dumps_instance(space, smap, orbit))
    return out


# --------------------------------------------------------------------------
# text format

def dumps_instance(space: FiniteSpace, smap: FiniteSetMap | None = None,
                   orbit: OrbitDescriptor | None = None) -> str:
    lines = [f"n {space.n}"]
    for u in space.sorted_opens():
        lines.append(" ".join(["open"] + [str(p) for p in bits(u)]))
    if smap is not None:
        for x in range(space.n):
            lines.append(" ".join([f"map {x} :"] + [str(p) for p in bits(smap.image(x))]))
    if orbit is not None:
        lines.append(" ".join(["orbit"] + [str(p) for p in orbit.tail] + ["|"]
                              + [str(p) for p in orbit.cycle]))
    return "\n".join(lines) + "\n"


def loads_instance(text: str):
    """Parse the plain-text format written by :func:`dumps_instance`.

    Returns ``(space, map_or_None, orbit_or_None)``.
    """
    n = None
    opens, images, orbit = [], {}, None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "n":
                n = int(rest[0])
            elif head == "open":
                opens.append(mask_of(int(t) for t in rest))
            elif head == "map":
                x = int(rest[0])
                if rest[1] != ":":
                    raise ValueError("expected ':'")
                images[x] = mask_of(int(t) for t in rest[2:])
            elif head == "orbit":
                sep = rest.index("|")
                orbit = OrbitDescriptor(tuple(int(t) for t in rest[:sep]),
                                        tuple(int(t) for t in rest[sep + 1:]))
            else:
                raise ValueError(f"unknown directive {head!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if n is None:
        raise ValueError("missing 'n' line")
    space = FiniteSpace(n, frozenset(opens))
    smap = None
    if images:
        if sorted(images) != list(range(n)):
            raise ValueError("map must give an image for every point")
        smap = FiniteSetMap(tuple(images[x] for x in range(n)))
    if orbit is not None and smap is not None:
        orbit.validate(smap)
    return space, smap, orbit
