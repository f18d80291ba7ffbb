import numpy as np
import pytest

from nakaolab.exponents import ProblemParams
from nakaolab.experiments import (InsufficientBlowupsError, SweepConfig, SweepPoint,
                                  fit_power_law, monotonicity_violations, plot_data,
                                  run_sweep, sweep_csv, theoretical_exponent)
from nakaolab.solver import SimConfig

BASE = SimConfig(ProblemParams(2, 2, 1), nx=512, t_max=12.0)


def test_exact_power_law():
    eps = np.geomspace(0.8, 0.2, 7)
    fit = fit_power_law(list(zip(eps, eps ** -3.0)), 3.0)
    assert fit.slope == pytest.approx(3.0, abs=1e-10)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.consistent and fit.points_used == 7 and fit.slack == 0.5


def test_noisy_power_law():
    rng = np.random.default_rng(42)
    eps = np.geomspace(0.8, 0.2, 7)
    T = 5 * eps ** -3.0 * (1 + 0.02 * rng.standard_normal(7))
    fit = fit_power_law(list(zip(eps, T)), 3.0)
    assert 2.8 <= fit.slope <= 3.2


def test_consistency_is_one_sided():
    eps = np.geomspace(0.8, 0.2, 5)
    steep = fit_power_law(list(zip(eps, eps ** -4.0)), 3.0)
    shallow = fit_power_law(list(zip(eps, eps ** -1.0)), 3.0)
    assert not steep.consistent and shallow.consistent
    assert fit_power_law(list(zip(eps, eps ** -4.0)), 3.0, slack=1.5).consistent


def test_fit_refusals():
    with pytest.raises(InsufficientBlowupsError, match="insufficient blow-ups"):
        fit_power_law([(0.5, 2.0), (0.4, 3.0), (0.3, None)], 3.0)
    with pytest.raises(ValueError, match="degenerate"):
        fit_power_law([(0.5, 2.0)] * 5, 3.0)


def test_sweep_config_grid():
    cfg = SweepConfig(BASE)
    e = cfg.eps_values()
    assert len(e) == 7 and np.all(np.diff(e) < 0)
    assert e[0] == pytest.approx(0.8) and e[-1] == pytest.approx(0.2)
    assert list(cfg.thresholds()) == pytest.approx([1e8, 1e10])
    assert theoretical_exponent(cfg) == 3.0
    with pytest.raises(ValueError):
        SweepConfig(BASE, eps_count=4)
    with pytest.raises(ValueError):
        SweepConfig(BASE, repeats_per_eps=1)


def test_small_sweep_and_determinism():
    cfg = SweepConfig(BASE, eps_count=5, eps_min=0.5, eps_max=0.8)
    a = run_sweep(cfg)
    b = run_sweep(cfg)
    assert sweep_csv(a, "hdr").encode() == sweep_csv(b, "hdr").encode()
    assert [s.eps for s in a] == pytest.approx(list(cfg.eps_values()))
    assert all(s.blown_up and s.robust and not s.censored for s in a)
    assert monotonicity_violations(a) == []
    text = plot_data(a)
    assert len(text.strip().splitlines()) == 6


def test_parallel_merge_order_matches_serial():
    cfg = SweepConfig(BASE, eps_count=5, eps_min=0.5, eps_max=0.8)
    par = SweepConfig(BASE, eps_count=5, eps_min=0.5, eps_max=0.8, workers=2)
    assert sweep_csv(run_sweep(cfg)) == sweep_csv(run_sweep(par))


def test_censored_runs_reported_not_fitted():
    cfg = SweepConfig(SimConfig(ProblemParams(2, 2, 1), nx=512, t_max=1.0), eps_count=5)
    pts = run_sweep(cfg)
    assert all(s.censored and s.T_num is None for s in pts)
    with pytest.raises(InsufficientBlowupsError):
        fit_power_law([(s.eps, s.T_num) for s in pts], 3.0)
    assert ",,false,,true" in sweep_csv(pts)


def test_monotonicity_flags():
    def pt(e, t):
        return SweepPoint(e, t, t is not None, True, t is None, None, ())
    bad = monotonicity_violations([pt(0.8, 10.0), pt(0.5, 5.0), pt(0.4, 5.1)])
    assert bad == [(0.8, 0.5, "lifespan"), (0.8, 0.4, "lifespan")]
    assert monotonicity_violations([pt(0.8, None), pt(0.5, 3.0)]) == [(0.8, 0.5, "censoring")]
