"""Auditing the p-space axioms on concrete premetrics.

    python3 demos/audit.py
"""
from orbitfix.gallery import moore_plane_scenario, two_origins_premetric
from orbitfix.premetric import Premetric, Probe, PSpaceInstance, audit_axioms, base_convergence

for inst in (two_origins_premetric(), moore_plane_scenario()[0]):
    rep = audit_axioms(inst, seed=1)
    print(inst.name, "passed" if rep.passed else "failed")
    for key, verdict in rep.as_dict().items():
        print(f"  axiom {key:4s} {verdict['status']}")

# p = 0 on two discrete points: distinct points at distance zero break axiom (i)
zero = PSpaceInstance(
    name="zero", p=Premetric(lambda x, y: 0, name="p=0"),
    converges=base_convergence(lambda c, n, y: y == c, 4),
    sample_points=lambda k, rng: [0, 1],
    probes=[Probe("constant 0", (0,) * 8, 0), Probe("constant 1", (1,) * 8, 1)],
)
verdict = audit_axioms(zero, seed=1).as_dict()["i"]
print("p = 0:", verdict["status"], "witness", verdict["witness"])
