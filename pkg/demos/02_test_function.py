"""The radial eigenfunction Phi (Delta Phi = Phi) and the ball-integral ratio.

Phi grows like e^r r^{-(n-1)/2}, so it is kept in log form.  We check the
eigen-equation by finite differences and watch the ratio
e^{-t} int_{B_{R+t}} Phi / (R+t)^{(n-1)/2} flatten out; its supremum is C1.
"""
import numpy as np

from nakaolab.testfn import (asymptotic_flatness, ball_ratio_curve, c1_estimate, log_phi,
                             verify_laplacian_eigen)

r = np.array([0.0, 1.0, 10.0, 100.0, 1000.0])
for n in (1, 2, 3, 5):
    print(f"n={n}: log Phi(r) at r={r.tolist()} ->", np.round(log_phi(n, r), 6).tolist())
    print(f"      eigen residual {verify_laplacian_eigen(n, [0.5, 1, 2, 5, 10]):.1e}, "
          f"flatness on [20, 60] {asymptotic_flatness(n):.2e}")

ts = np.linspace(0, 50, 11)
for n in (1, 2, 3):
    print(f"n={n} ratio:", np.round(ball_ratio_curve(n, 1.0, ts), 4).tolist())
    print(f"      C1 ~ {c1_estimate(n, 1.0, 50.0):.6g}")
