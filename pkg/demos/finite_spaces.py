"""Finite topological spaces: enumeration, the non-witness reduction and the fixed point theorem.

    python3 demos/finite_spaces.py
"""
from orbitfix.finite_topology import (
    FiniteSetMap,
    FiniteSpace,
    OrbitDescriptor,
    brute_force_topologies,
    check_fixed_point_theorem,
    cover_condition,
    enumerate_topologies,
    is_closed_graph,
    is_tau_contractive,
    sweep,
)

print("Topologies on n points, enumerator vs brute-force filter:")
for n in range(1, 5):
    print(f"  n={n}: {len(list(enumerate_topologies(n)))} vs {len(brute_force_topologies(n))}")

# Sierpinski space: {} , {0}, {0,1}. The map sends 1 to {0,1} and 0 to {0}.
space = FiniteSpace.sierpinski()
smap = FiniteSetMap.from_lists([[0], [0, 1]])
orbit = OrbitDescriptor((1,), (0,))
print("\nSierpinski space, orbit 1 -> 0 -> 0 -> ...")
print("  tau-contractive:", is_tau_contractive(space, smap, orbit).holds)
print("  cover condition:", cover_condition(space, smap, orbit))
print("  closed graph:   ", is_closed_graph(space, smap))
print("  theorem check:  ", check_fixed_point_theorem(space, smap, orbit))

print("\nExhaustive sweep over all 3-point spaces and all 512 set-valued maps ...")
summary = sweep(list(enumerate_topologies(3)))
d = summary.as_dict()
for key in ("spaces", "maps", "orbits", "tau_agree", "cover_agree", "theorem_premises"):
    print(f"  {key:17s} {d[key]}")
print("  violations       ", len(summary.violations))
