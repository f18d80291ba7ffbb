"""Critical curves and blow-up region of the p-q plane.

Everything here is closed-form double-precision arithmetic.  The Glassey
exponent for ``n = 1`` is ``math.inf``, which orders correctly against every
finite float.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional


class RegionError(ValueError):
    """Parameters lie outside the blow-up region where a formula is valid."""


@dataclass(frozen=True)
class ProblemParams:
    """Exponents, dimension, support radius and data size of the system

        u_tt - Δu + u_t = |v_t|^p,   v_tt - Δv = |u_t|^q,
        (u, u_t, v, v_t)(0) = ε (u0, u1, v0, v1),  supp ⊂ B_R.
    """

    p: float
    q: float
    n: int = 1
    R: float = 1.0
    eps: float = 1.0

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError("p must exceed 1")
        if not self.q > 1:
            raise ValueError("q must exceed 1")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        object.__setattr__(self, "n", int(self.n))
        if not self.R > 0:
            raise ValueError("R must be positive")
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    @property
    def pq(self) -> float:
        return self.p * self.q


@dataclass(frozen=True)
class RegionReport:
    glassey: float
    wakasugi_holds: bool
    nakao_alpha: float
    wave_alpha: float
    shrift_alpha: float
    blowup_condition_holds: bool
    lifespan_exponent: Optional[float]
    t1: float
    t2: float
    on_boundary: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(d["glassey"]):
            d["glassey"] = "Infinity"
        return d


def glassey_exponent(n: int) -> float:
    """(n+1)/(n-1) for n >= 2 and infinity for n = 1."""
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    if n == 1:
        return math.inf
    return (n + 1) / (n - 1)


def blowup_condition(params: ProblemParams, boundary_eps: float = 0.0) -> bool:
    """True iff pq < p_Gla(n).  Strict: the curve pq = p_Gla itself is outside.

    ``boundary_eps`` shrinks the region by that margin on request.
    """
    if params.n == 1:
        return True
    return params.pq < glassey_exponent(params.n) - boundary_eps


def on_glassey_boundary(params: ProblemParams, rtol: float = 1e-12) -> bool:
    if params.n == 1:
        return False
    g = glassey_exponent(params.n)
    return abs(params.pq - g) <= rtol * g


def lifespan_exponent(params: ProblemParams) -> float:
    """Exponent θ in T(ε) <= C ε^{-θ}, θ = 2(pq-1)/((n+1)-(n-1)pq)."""
    n, pq = params.n, params.pq
    denom = (n + 1) - (n - 1) * pq
    if denom <= 0:
        raise RegionError(
            f"(p, q, n) = ({params.p}, {params.q}, {n}) is outside the blow-up "
            f"region: (n+1)-(n-1)pq = {denom:g} <= 0")
    if n == 1:
        return pq - 1.0
    return 2.0 * (pq - 1.0) / denom


def t1_t2(params: ProblemParams) -> tuple[float, float]:
    """Growth rates T1, T2 of the two lower-bound envelopes (T1 > T2)."""
    p, n, pq = params.p, params.n, params.pq
    t1 = ((n + 1) - (n - 1) * pq) / (2.0 * (pq - 1.0))
    t2 = ((n + 1) + 2.0 * p - (n + 1) * pq) / (2.0 * (pq - 1.0))
    return t1, t2


def wakasugi_max(p: float, q: float) -> float:
    pq1 = p * q - 1.0
    return max((q / 2 + 1) / pq1 + 0.5, (q + 1) / pq1, (p + 1) / pq1)


def nakao_alpha(p: float, q: float) -> float:
    """α_N of the power-nonlinearity Nakao problem."""
    pq1 = p * q - 1.0
    return max((q / 2 + 1) / pq1, (2 + 1 / p) / pq1, (0.5 + p) / pq1 - 0.5)


def wave_alpha(p: float, q: float) -> float:
    """α_W for the coupled wave system with derivative nonlinearities."""
    return (max(p, q) + 1) / (p * q - 1.0)


def shrift_alpha(p: float, q: float) -> float:
    return q / (p * q - 1.0)


def curve_values(params: ProblemParams, boundary_eps: float = 0.0) -> RegionReport:
    p, q, n = params.p, params.q, params.n
    holds = blowup_condition(params, boundary_eps)
    t1, t2 = t1_t2(params)
    return RegionReport(
        glassey=glassey_exponent(n),
        wakasugi_holds=wakasugi_max(p, q) >= n / 2,
        nakao_alpha=nakao_alpha(p, q),
        wave_alpha=wave_alpha(p, q),
        shrift_alpha=shrift_alpha(p, q),
        blowup_condition_holds=holds,
        lifespan_exponent=lifespan_exponent(params) if holds else None,
        t1=t1,
        t2=t2,
        on_boundary=on_glassey_boundary(params),
    )
