"""Lifespan against data size: does T(eps) grow no faster than eps^-3?

Sweeps seven geometric values of eps in [0.2, 0.8] on a grid fine enough to
resolve the longest run (about a minute on one core), fits log T against
log(1/eps) and compares with the exponent pq - 1 = 3.
Pass a smaller nx (e.g. 2048) as argv[1] to watch coarse-grid bias push the
smallest eps past the horizon.
"""
import sys

from nakaolab.exponents import ProblemParams
from nakaolab.experiments import (InsufficientBlowupsError, SweepConfig, fit_power_law,
                                  monotonicity_violations, run_sweep, sweep_csv,
                                  theoretical_exponent)
from nakaolab.solver import SimConfig

nx = int(sys.argv[1]) if len(sys.argv) > 1 else 16384
cfg = SweepConfig(SimConfig(ProblemParams(2, 2, 1), nx=nx, t_max=60.0))
points = run_sweep(cfg)
print(sweep_csv(points, f"nx={nx}"))
try:
    fit = fit_power_law([(s.eps, s.T_num) for s in points if s.blown_up],
                        theoretical_exponent(cfg))
    print(fit)
except InsufficientBlowupsError as exc:
    print(exc)
print("monotonicity violations:", monotonicity_violations(points))
