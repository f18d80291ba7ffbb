"""The eigenfunction Φ (ΔΦ = Φ) and the wave test function Ψ = e^{-t} Φ.

For n >= 2, Φ(x) = ∫_{S^{n-1}} exp(x·ω) dσ(ω) depends only on r = |x| and
reduces to

    Φ(r) = |S^{n-2}| ∫_0^π exp(r cos θ) sin^{n-2} θ dθ.

We factor out e^r and integrate exp(r (cos θ - 1)) sin^{n-2} θ with a fixed
Gauss-Legendre rule on [0, θ_cut], where θ_cut ~ 1/sqrt(r) shrinks with r so
the Laplace peak at θ = 0 stays resolved.  All values come back in log form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .logdomain import LogValue

_GL_THETA = np.polynomial.legendre.leggauss(96)
_GL_PANEL = np.polynomial.legendre.leggauss(8)


class QuadratureError(RuntimeError):
    """Adaptive refinement did not converge within the node budget."""


@dataclass(frozen=True)
class QuadratureSpec:
    nodes: int = 64
    rule: str = "gauss-legendre"
    refinement_tol: float = 1e-10
    max_nodes: int = 1 << 20

    def __post_init__(self):
        if self.nodes < 8:
            raise ValueError("nodes must be >= 8")
        if self.rule not in ("trapezoid", "gauss-legendre"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if not 0 < self.refinement_tol <= 1e-3:
            raise ValueError("refinement_tol must lie in (0, 1e-3]")


def log_sphere_area(dim: int) -> float:
    """log |S^dim| (S^0 is two points, so area 2)."""
    k = dim + 1
    return math.log(2.0) + 0.5 * k * math.log(math.pi) - gammaln(0.5 * k)


def log_phi(n: int, r) -> np.ndarray:
    """log Φ(r), vectorized over r >= 0."""
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    if n == 1:
        return r + np.log1p(np.exp(-2.0 * r))

    x, w = _GL_THETA
    flat = r.reshape(-1)
    with np.errstate(divide="ignore"):
        cut = np.minimum(np.pi, (14.0 + math.sqrt(n)) / np.sqrt(flat))
    theta = 0.5 * cut[:, None] * (x[None, :] + 1.0)
    weights = 0.5 * cut[:, None] * w[None, :]
    integrand = np.exp(flat[:, None] * (np.cos(theta) - 1.0))
    if n > 2:
        integrand *= np.sin(theta) ** (n - 2)
    s = np.sum(weights * integrand, axis=1)
    out = log_sphere_area(n - 2) + flat + np.log(s)
    return out.reshape(r.shape)


def phi(n: int, r: float) -> LogValue:
    if r < 0:
        raise ValueError("r must be nonnegative")
    return LogValue(float(log_phi(n, r)), 1)


def psi(n: int, t: float, r: float) -> LogValue:
    if t < 0 or r < 0:
        raise ValueError("t and r must be nonnegative")
    return LogValue(float(log_phi(n, r)) - t, 1)


def _composite(rule: str, a: float, b: float, nodes: int):
    if rule == "trapezoid":
        x = np.linspace(a, b, nodes)
        w = np.full(nodes, (b - a) / (nodes - 1))
        w[0] *= 0.5
        w[-1] *= 0.5
        return x, w
    gx, gw = _GL_PANEL
    panels = max(1, nodes // len(gx))
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    w = (half[:, None] * gw[None, :]).ravel()
    return x, w


def _log_radial_quad(n: int, radius: float, rule: str, nodes: int) -> float:
    x, w = _composite(rule, 0.0, radius, nodes)
    with np.errstate(divide="ignore"):
        logf = log_phi(n, x) + (n - 1) * np.log(x)
    m = np.max(logf)
    return m + math.log(np.sum(w * np.exp(logf - m)))


def phi_ball_integral(n: int, radius: float,
                      spec: QuadratureSpec = QuadratureSpec()) -> LogValue:
    """∫_{B_radius} Φ dx via radial quadrature, doubled until converged."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    nodes = spec.nodes
    prev = _log_radial_quad(n, radius, spec.rule, nodes)
    while True:
        nodes *= 2
        if nodes > spec.max_nodes:
            raise QuadratureError(
                f"ball integral (n={n}, radius={radius}) not converged "
                f"to {spec.refinement_tol} within {spec.max_nodes} nodes")
        cur = _log_radial_quad(n, radius, spec.rule, nodes)
        if abs(math.expm1(cur - prev)) < spec.refinement_tol:
            break
        prev = cur
    return LogValue(log_sphere_area(n - 1) + cur, 1)


def ball_ratio_curve(n: int, R: float, ts, spec: QuadratureSpec = QuadratureSpec()):
    """e^{-t} ∫_{B_{R+t}} Φ / (R+t)^{(n-1)/2} on the time grid ``ts``."""
    ts = np.asarray(ts, dtype=float)
    out = np.empty_like(ts)
    for i, t in enumerate(ts):
        lb = phi_ball_integral(n, R + t, spec).log_magnitude
        out[i] = math.exp(lb - t - 0.5 * (n - 1) * math.log(R + t))
    return out


def c1_estimate(n: int, R: float, t_max: float, num: int = 201,
                spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Empirical C1: supremum of :func:`ball_ratio_curve` over linspace(0, t_max, num)."""
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    return float(np.max(ball_ratio_curve(n, R, np.linspace(0.0, t_max, num), spec)))


def verify_laplacian_eigen(n: int, sample_radii, h: float = 1e-3) -> float:
    """Max relative residual |Φ'' + (n-1)Φ'/r - Φ| / Φ by central differences."""
    if not 1e-4 <= h <= 1e-2:
        raise ValueError("h must lie in [1e-4, 1e-2]")
    r = np.asarray(sample_radii, dtype=float)
    if np.any(r <= 0) or np.any(r > 20):
        raise ValueError("sample radii must lie in (0, 20]")
    l0 = log_phi(n, r)
    # ratios Φ(r±h)/Φ(r) stay O(1), so the difference quotients never overflow
    up = np.exp(log_phi(n, r + h) - l0)
    dn = np.exp(log_phi(n, r - h) - l0)
    d2 = (up - 2.0 + dn) / h**2
    d1 = (up - dn) / (2.0 * h)
    lap = d2 + (n - 1) / r * d1
    return float(np.max(np.abs(lap - 1.0)))


def asymptotic_flatness(n: int, r_lo: float = 20.0, r_hi: float = 60.0,
                        num: int = 81) -> float:
    """Spread of log Φ(r) - (r - (n-1)/2 log r) over [r_lo, r_hi]."""
    r = np.linspace(r_lo, r_hi, num)
    d = log_phi(n, r) - (r - 0.5 * (n - 1) * np.log(r))
    return float(np.max(d) - np.min(d))
