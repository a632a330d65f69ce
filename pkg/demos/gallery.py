"""Worked examples: halving on Q, the line with two origins, the Moore plane, and an ordinal space.

    python3 demos/gallery.py
"""
from orbitfix.gallery import run_moore, run_ordinal, run_rationals, run_two_origins

r = run_rationals()
print("Halving on the rationals")
print("  first terms:", [str(x) for x in r["orbit"][:6]], "...")
print("  p-contractive:", r["p_contractive"], " limit:", r["accumulation_point"], " kind:", r["classification"])

r = run_two_origins()
print("\nLine with two origins A and B")
print("  both origins are limits:", [str(c) for c in r["accumulation_candidates"]])
for label, o in r["origins"].items():
    print(f"  at {label}: tail p {float(o['tail_max_p']):.2e}, {o['classification']} (S({label}) = {{{o['witness']}}})")

r = run_moore()
print("\nMoore plane")
print("  p to the origin along the diagonal:", [f"{float(v):.3g}" for v in r["diagonal_p_to_origin"][:6]], "...")
print("  p to the origin from the x-axis:", sorted(set(r["axis_p_to_origin"].values())))
print("  classification at (0,0):", r["classification_at_origin"])

r = run_ordinal()
print("\nOrdinal space up to w*2")
print("  orbit converges to w:", r["converges_to_omega"])
print("  S(w) = {}:", r["S_classification"], "  T(w) = {w}:", r["T_classification"])
