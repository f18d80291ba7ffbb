"""A single blow-up simulation, n = 1, p = q = 2, eps = 0.3.

Shows the sup-norms racing off near T_num, the functionals staying above
their first lower bounds, and the two ODE identities holding to ~1e-3
before the step-size cap kicks in.
"""
import numpy as np

from nakaolab.exponents import ProblemParams
from nakaolab.iteration import constants_ledger
from nakaolab.solver import (SimConfig, bump_phi_integral, detect_blowup, pre_blowup_stop, run,
                             verify_identities)
from nakaolab.testfn import c1_estimate

params = ProblemParams(2, 2, 1, eps=0.3)
cfg = SimConfig(params, nx=4096, t_max=20.0)
trace = run(cfg)
print("blow-up:", trace.blowup)
for th in (1e6, 1e8, 1e10):
    print(f"  threshold {th:.0e}: T_num = {detect_blowup(trace, th)}")

t = trace["t"]
for tk in (0, 2, 5, 8, 11, 13, 13.5):
    i = int(np.searchsorted(t, tk))
    print(f"t={t[i]:7.3f}  F1={trace['F1'][i]:.4g}  F2={trace['F2'][i]:.4g}  "
          f"sup|ut|={trace['sup_ut'][i]:.3g}  sup|vt|={trace['sup_vt'][i]:.3g}")

I = bump_phi_integral(1, 1.0)
c = constants_ledger(params, c1_estimate(1, 1.0, 50.0), I, I)
w = trace.window(pre_blowup_stop(trace))
print("min F2 - C3 eps:", np.min(w["F2"] - c.C3 * params.eps))
print("min F1 - C2 eps (t >= 1):", np.min(w["F1"][w["t"] >= 1] - c.C2 * params.eps))
print(verify_identities(trace, cfg))
