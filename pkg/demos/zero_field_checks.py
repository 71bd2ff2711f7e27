#!/usr/bin/env python3
"""Zero-field limit and contour checks of the scaled denominator."""
import math

from scipy import special

from crossfield.pole_finder import solve_zero_field
from crossfield.resolvent_kernel import CONTOUR_TEST_SET, DEFAULT_CONTOUR, denominator, field_integral
from crossfield.scaling import ScaledParams

# at zero field the denominator is ln(-E_B/2) - psi((1-E)/2)
eb = -2.0
for e in (0.5 + 0.3j, 3.2 + 0.4j, -2 + 0.2j):
    exact = math.log(-eb / 2) - special.psi((1 - e) / 2)
    value = denominator(e, ScaledParams(0.0, eb), DEFAULT_CONTOUR)
    print(f"E = {e}: |contour - digamma| = {abs(value - exact):.1e}")

print("\nbound state in zero field")
for eb in (-0.5, -2.8, -6.4, -50.0):
    root = solve_zero_field(eb)
    print(f"E_B = {eb:6.1f} -> E* = {root.pole.real:.10f} (shift {root.pole.real - eb:+.2e})")

print("\ncontour depth 0.5 against 1.0")
deep = DEFAULT_CONTOUR.replace(depth=1.0)
for e, f in CONTOUR_TEST_SET:
    a = field_integral(e, f, DEFAULT_CONTOUR)
    b = field_integral(e, f, deep)
    print(f"E = {e!s:>12}, F = {f:4.2f}: {abs(a - b) / (1 + abs(a)):.1e}")
