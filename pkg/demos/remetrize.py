"""Remetrization checks for single-valued iterations, and the finite metric tau/p equivalence.

    python3 demos/remetrize.py
"""
import numpy as np

from orbitfix.finite_topology import FiniteSetMap, enumerate_orbits
from orbitfix.remetrize import IterationSystem, a1_a2_check, tau_p_equivalence_test

O = [j / 64 for j in range(65)]
dist = lambda x, y: abs(x - y)

for name, f in (("x/2", lambda x: x / 2), ("x^2", lambda x: x * x), ("identity", lambda x: x)):
    rep = a1_a2_check(IterationSystem(f, dist, domain=O, neighborhood=O, name=name), 0.0)
    print(f"{name:9s} A1 {rep.a1.status:9s} A2 {rep.a2.status:9s} uniform {rep.uniform_cover.status:12s}"
          f" t-contraction {rep.t_contraction.status:5s} remetrizable {rep.conclusion}")
    if rep.a1.witness is not None:
        print("          A1 witness:", rep.a1.witness)

rng = np.random.default_rng(0)
agree = total = 0
for _ in range(200):
    n = int(rng.integers(1, 5))
    pts = rng.random((n, 2))
    d = np.linalg.norm(pts[:, None] - pts[None, :], axis=-1)
    smap = FiniteSetMap.from_lists([[y for y in range(n) if rng.random() < 0.5] or [0] for _ in range(n)])
    for s in range(n):
        for orbit in enumerate_orbits(smap, s):
            total += 1
            agree += tau_p_equivalence_test(d, smap, orbit)
print(f"\nfinite metric spaces: tau and p verdicts agree on {agree}/{total} orbits")
