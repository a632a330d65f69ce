"""Independent reference implementations used by the tests.

These work on Python sets and follow the definitions literally, without the
bitmask encoding or the non-witness shortcut used by the library.
"""
from __future__ import annotations

import itertools
from fractions import Fraction


def powerset(items):
    items = list(items)
    return [frozenset(c) for r in range(len(items) + 1) for c in itertools.combinations(items, r)]


def topologies(n):
    """All families of subsets of range(n) closed under pairwise union and intersection."""
    X = frozenset(range(n))
    inner = [s for s in powerset(range(n)) if s and s != X]
    out = []
    for choice in powerset(range(len(inner))):
        fam = {frozenset(), X} | {inner[j] for j in choice}
        if all(a | b in fam and a & b in fam for a in fam for b in fam):
            out.append(frozenset(fam))
    return out


def covers(opens, n):
    X = frozenset(range(n))
    opens = list(opens)
    for fam in powerset(range(len(opens))):
        if frozenset().union(*(opens[j] for j in fam)) == X:
            yield [opens[j] for j in fam]


def tau_contractive(opens, n, images, orbit_points):
    """Every open cover has U and an orbit point x with x in U and S(x) inside U."""
    for cover in covers(opens, n):
        if not any(x in U and images[x] <= U for U in cover for x in orbit_points):
            return False
    return True


def orbit_cycle(tail, cycle):
    return list(tail) + list(cycle)


def closed_graph(opens, n, images):
    """Complement of the graph is open in the product: each point has an open box missing the graph."""
    graph = {(x, y) for x in range(n) for y in images[x]}
    for a in range(n):
        for b in range(n):
            if (a, b) in graph:
                continue
            if not any(a in U and b in V and not any((u, v) in graph for u in U for v in V)
                       for U in opens for V in opens):
                return False
    return True


def cover_condition(opens, n, images, seq):
    """Every open cover has U and i with S(x_i) inside U and x_{i+2} in U; seq lists x_i for one period+."""
    for cover in covers(opens, n):
        if not any(images[seq[i]] <= U and seq[i + 2] in U for U in cover for i in range(len(seq) - 2)):
            return False
    return True


def p_contractive_finite_metric(dist, images, cycle):
    """In a finite metric space a convergent subsequence is eventually a constant cycle point c."""
    return any(max(dist[y][c] for y in images[c]) == 0 for c in set(cycle))


def geometric_length(n):
    """p-length of 1, 1/2, ..., 2^-n under |x - y|."""
    return sum(Fraction(1, 2 ** k) for k in range(1, n + 1))
