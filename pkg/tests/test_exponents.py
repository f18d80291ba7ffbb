import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nakaolab.exponents import (ProblemParams, RegionError, blowup_condition, curve_values,
                                glassey_exponent, lifespan_exponent, nakao_alpha, t1_t2,
                                wave_alpha)


def test_glassey():
    assert glassey_exponent(1) == math.inf
    assert glassey_exponent(2) == 3
    assert glassey_exponent(3) == 2
    with pytest.raises(ValueError):
        glassey_exponent(0)


@pytest.mark.parametrize("p,q,n,expected", [(2, 2, 1, True), (1.5, 1.5, 2, True),
                                            (2, 2, 2, False)])
def test_blowup_condition(p, q, n, expected):
    assert blowup_condition(ProblemParams(p, q, n)) is expected


def test_boundary_is_outside_and_flagged():
    rep = curve_values(ProblemParams(1.5, 2.0, 2))  # pq = 3 = p_Gla(2)
    assert not rep.blowup_condition_holds and rep.on_boundary
    assert rep.lifespan_exponent is None
    assert blowup_condition(ProblemParams(1.4, 2.0, 2))
    assert not blowup_condition(ProblemParams(1.4, 2.0, 2), boundary_eps=0.3)


@pytest.mark.parametrize("p", [1.0, 0.5])
def test_rejects_sublinear(p):
    with pytest.raises(ValueError, match="p must exceed 1"):
        ProblemParams(p, 2, 2)
    with pytest.raises(ValueError, match="q must exceed 1"):
        ProblemParams(2, p, 2)


def test_lifespan_exponent_examples():
    assert lifespan_exponent(ProblemParams(2, 2, 1)) == 3
    assert lifespan_exponent(ProblemParams(1.2, 1.2, 2)) == pytest.approx(0.88 / 1.56, abs=1e-6)
    with pytest.raises(RegionError):
        lifespan_exponent(ProblemParams(2, 2, 2))


def test_t1_t2_examples():
    t1, t2 = t1_t2(ProblemParams(2, 2, 1))
    assert (t1, t2) == pytest.approx((1 / 3, -1 / 3))
    assert t1 - t2 == pytest.approx(2 / 3)
    assert t1_t2(ProblemParams(1.5, 1.5, 2))[0] == pytest.approx(0.3)


def test_curve_values_examples():
    rep = curve_values(ProblemParams(2, 2, 1))
    assert rep.nakao_alpha == pytest.approx(5 / 6)
    assert rep.wave_alpha == pytest.approx(1.0)
    assert rep.wakasugi_holds
    d = rep.to_dict()
    assert d["glassey"] == "Infinity"
    json.dumps(d)


@given(st.floats(1.0001, 6), st.floats(1.0001, 6), st.integers(1, 8))
def test_report_invariants(p, q, n):
    params = ProblemParams(p, q, n)
    rep = curve_values(params)
    assert (rep.lifespan_exponent is not None) == rep.blowup_condition_holds
    assert rep.t1 > rep.t2
    if rep.blowup_condition_holds:
        assert lifespan_exponent(params) == pytest.approx(1.0 / rep.t1, rel=1e-12)


def test_n1_exponent_exact():
    rng = np.random.default_rng(0)
    for p, q in 1 + 5 * rng.random((1000, 2)):
        assert lifespan_exponent(ProblemParams(p, q, 1)) == p * q - 1


def test_t1_minus_t2_identity_10k():
    rng = np.random.default_rng(1)
    worst = 0.0
    # q - 1 >= 0.01 keeps the subtraction T1 - T2 well conditioned
    for p, q, n in zip(1.01 + 5 * rng.random(10_000), 1.01 + 5 * rng.random(10_000),
                       rng.integers(1, 10, 10_000)):
        t1, t2 = t1_t2(ProblemParams(p, q, int(n)))
        ref = p * (q - 1) / (p * q - 1)
        worst = max(worst, abs((t1 - t2) - ref) / ref)
    assert worst < 1e-12


def test_t1_minus_t2_within_conditioning_near_q1():
    rng = np.random.default_rng(11)
    eps = np.finfo(float).eps
    for p, q, n in zip(1 + 5 * rng.random(10_000), 1 + 1e-3 * rng.random(10_000) + 1e-9,
                       rng.integers(1, 10, 10_000)):
        t1, t2 = t1_t2(ProblemParams(p, q, int(n)))
        ref = p * (q - 1) / (p * q - 1)
        # magnitude of the cancelling terms over the exact difference
        kappa = ((n + 1) * (1 + p * q) + 2 * p) / (2 * p * (q - 1))
        assert t1 > t2
        assert abs((t1 - t2) - ref) / ref <= 8 * eps * max(kappa, 1.0)


def test_positivity_condition_implies_region():
    rng = np.random.default_rng(2)
    for p, q, n in zip(1 + 5 * rng.random(10_000), 1 + 5 * rng.random(10_000),
                       rng.integers(1, 10, 10_000)):
        if (n + 1) * p * q - 2 * p - (n + 1) < 0:
            assert (n - 1) * p * q < n + 1


def region_samples(rng, size):
    """Uniform (p, q) with pq below the Glassey exponent, n in 2..9."""
    n = rng.integers(2, 10, size)
    g = (n + 1) / (n - 1)
    p = 1 + (g - 1) * rng.random(size)
    q = 1 + (g / p - 1) * rng.random(size)
    return p, q, n


def test_inclusions_hold_on_region_samples():
    p, q, n = region_samples(np.random.default_rng(3), 10_000)
    assert np.all(p * q < (n + 1) / (n - 1))
    aw = np.array([wave_alpha(a, b) for a, b in zip(p, q)])
    an = np.array([nakao_alpha(a, b) for a, b in zip(p, q)])
    assert np.all(aw > (n - 1) / 2)
    assert np.all(1 / (p * q - 1) > (n - 1) / 2)
    assert np.all(an > (n - 1) / 2)
