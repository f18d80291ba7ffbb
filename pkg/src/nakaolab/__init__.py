"""Numerical laboratory for blow-up of the damped-wave / wave system with
derivative nonlinearities |v_t|^p and |u_t|^q."""

__version__ = "0.1.0"

from .exponents import (ProblemParams, RegionError, RegionReport, blowup_condition,
                        curve_values, glassey_exponent, lifespan_exponent, t1_t2)
from .logdomain import LogValue
from .testfn import (QuadratureSpec, c1_estimate, phi, phi_ball_integral, psi,
                     verify_laplacian_eigen)
from .iteration import (IterationConstants, IterationState, closed_form, constants_ledger,
                        ell, envelope, first_terms, predicted_blowup_time, recursion_step,
                        slicing_product)
from .solver import (FieldState, FunctionalTrace, SimConfig, detect_blowup, init_bump, run,
                     step, verify_identities)
from .experiments import PowerLawFit, SweepConfig, fit_power_law, run_sweep

__all__ = [
    "ProblemParams", "RegionError", "RegionReport", "blowup_condition", "curve_values",
    "glassey_exponent", "lifespan_exponent", "t1_t2", "LogValue", "QuadratureSpec",
    "c1_estimate", "phi", "phi_ball_integral", "psi", "verify_laplacian_eigen",
    "IterationConstants", "IterationState", "closed_form", "constants_ledger", "ell",
    "envelope", "first_terms", "predicted_blowup_time", "recursion_step", "slicing_product",
    "FieldState", "FunctionalTrace", "SimConfig", "detect_blowup", "init_bump", "run",
    "step", "verify_identities", "PowerLawFit", "SweepConfig", "fit_power_law", "run_sweep",
]
