"""Descent solvers: Ekeland, strong minimum, Caristi and nested-set intersection on the rationals.

    python3 demos/descent.py
"""
import math
from fractions import Fraction

from orbitfix.descent import (
    DescentConfig,
    GridDomain,
    NestedFamily,
    ObjectiveFunction,
    caristi_check,
    cantor_intersect,
    ekeland_descent,
    strong_min_descent,
)
from orbitfix.gallery import rational_line
from orbitfix.premetric import Premetric

ABS = Premetric(lambda x, y: abs(x - y))
grid = GridDomain(-2, 2, Fraction(1, 4096))

square = ObjectiveFunction(lambda x: x * x, grid, lower_bound=0, name="x^2")
cert = ekeland_descent(square, ABS, Fraction(1), DescentConfig(seed=0))
print("Ekeland on x^2 from 1")
print("  orbit:", [str(x) for x in cert.orbit])
print("  critical point:", cert.point, " path length:", cert.sigma_length, "<= f(1) - f(point) =", 1 - cert.point ** 2)

cert = ekeland_descent(ObjectiveFunction(abs, grid, lower_bound=0), ABS, Fraction(1))
print("Ekeland on |x| from 1: steps", cert.steps, "residual", cert.residual)

cert = strong_min_descent(square, rational_line(), Fraction(1), DescentConfig(seed=0))
print("\nStrong-minimum descent on x^2:", cert.point, cert.strong_minimum)

f = ObjectiveFunction(lambda x: 2 * abs(x), grid, lower_bound=0)
rep = caristi_check(lambda x: x / 2, f, ABS, [Fraction(j, 8) for j in range(-16, 17)])
print("\nCaristi with T(x) = x/2, f = 2|x|: premise", rep.premise_holds, "fixed point", rep.fixed_point)

print("\nNested intervals [0, 1/i] on Q:", cantor_intersect(
    NestedFamily.intervals(lambda i: (Fraction(0), Fraction(1, i))), rational_line()).point)


def sqrt2(i):
    s = 10 ** i
    a = Fraction(math.isqrt(2 * s * s), s)
    return a, a + Fraction(1, s)


res = cantor_intersect(NestedFamily.intervals(sqrt2), rational_line(), cap=40)
print("Decimal intervals around sqrt 2 on Q:", res.status)
