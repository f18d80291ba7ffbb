"""Lower-bound iteration for p = q = 2, n = 1.

Prints the exponent sequences next to their closed forms, the log
constants log D_j, log Q_j (which grow like (pq)^{j/2}) and the constants
ledger, then the envelope-predicted blow-up time for a few data sizes.
"""
from dataclasses import replace

from nakaolab.exponents import ProblemParams
from nakaolab.iteration import (EpsilonTooLargeError, constants_ledger, exponents_at,
                                predicted_blowup_time, sequence)
from nakaolab.solver import bump_phi_integral
from nakaolab.testfn import c1_estimate

params = ProblemParams(2.0, 2.0, 1, eps=0.1)
c1 = c1_estimate(1, 1.0, 50.0)
I = bump_phi_integral(1, 1.0)
c = constants_ledger(params, c1, I, I)

print(" j   alpha      a   beta      b      logD_j       logQ_j     L_j")
for s in sequence(13, params, c):
    cf = exponents_at(s.j, params)
    assert abs(cf.beta - s.beta) <= 1e-10 * max(1.0, s.beta)
    print(f"{s.j:2d} {s.alpha:7.1f} {s.a:6.1f} {s.beta:6.1f} {s.b:6.1f} "
          f"{s.logD:12.4g} {s.logQ:12.4g} {s.L:7.4f}")

for k, v in c.to_dict().items():
    print(f"  {k:8s} {v}")

for eps in (0.2, 0.1, 0.05, 1e3):
    p = replace(params, eps=eps)
    try:
        t = predicted_blowup_time(p, constants_ledger(p, c1, I, I))
        print(f"eps={eps}: envelope diverges beyond t = {t:.4g}")
    except EpsilonTooLargeError as exc:
        print(f"eps={eps}: {exc}")
