"""Where in the (p, q) plane does small data blow up?

Scans a grid of exponents for n = 1, 2, 3 and prints an ASCII map of the
region pq < p_Gla(n), together with the lifespan exponent at a few points.
"""
import numpy as np

from nakaolab.exponents import ProblemParams, curve_values, glassey_exponent

ps = np.linspace(1.05, 3.0, 40)
qs = np.linspace(3.0, 1.05, 20)

for n in (1, 2, 3):
    print(f"\nn = {n}, p_Gla = {glassey_exponent(n)}")
    for q in qs:
        row = "".join("#" if curve_values(ProblemParams(p, q, n)).blowup_condition_holds
                      else "." for p in ps)
        print(f"q={q:4.2f} {row}")

print("\nlifespan exponents T(eps) ~ eps^-theta")
for p, q, n in [(2, 2, 1), (1.2, 1.2, 2), (1.3, 1.4, 3), (1.1, 1.7, 2)]:
    rep = curve_values(ProblemParams(p, q, n))
    print(f"  p={p}, q={q}, n={n}: theta = {rep.lifespan_exponent}, "
          f"T1 = {rep.t1:.4f}, T2 = {rep.t2:.4f}")
