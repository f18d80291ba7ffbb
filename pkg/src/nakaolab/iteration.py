"""Slicing iteration for the lower bounds of F1 and F2.

The j-th bounds read

    F1(t) >= D_j (R+t)^{-α_j} (t-L_j)^{β_j},
    F2(t) >= Q_j (R+t)^{-a_j} (t-L_j)^{b_j},     t >= L_j,

with L_j the partial products of ∏ ℓ_k.  log D_j and log Q_j grow like
(pq)^{j/2}, so they are only ever stored as logs.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Optional

import numpy as np

from .exponents import ProblemParams, RegionError, blowup_condition, t1_t2
from .logdomain import LogValue

SQRT5 = math.sqrt(5.0)
ELL_GAIN = 4.0 / (3.0 + SQRT5)


@dataclass(frozen=True)
class IterationState:
    j: int
    alpha: float
    a: float
    beta: float
    b: float
    logD: Optional[float] = None
    logQ: Optional[float] = None
    L: Optional[float] = None


@dataclass(frozen=True)
class IterationConstants:
    C1: float
    C2: float
    C3: float
    C4: float
    logD1: float
    logQ1: float
    B0: float
    B1: float
    M: float
    M_closed: float
    M_direct: float
    logE0: float
    logE1: float
    logE2: float
    logE3: float
    logE4: float
    logE5: Optional[float]
    j0: int
    j1: int
    L: float
    T1: float
    T2: float
    eps0: float

    def to_dict(self) -> dict:
        return asdict(self)


class DegenerateDataError(ValueError):
    """An initial-data integral vanishes, so a first lower bound is trivial."""


def ell(k: int, p: float, q: float) -> float:
    """ℓ_k = 1 + 4/(3+√5) (pq)^{-(k-1)/2}."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return 1.0 + ELL_GAIN * (p * q) ** (-(k - 1) / 2.0)


def log_ell(k: int, p: float, q: float) -> float:
    """log ℓ_k without the cancellation of log(1 + tiny)."""
    return math.log1p(ELL_GAIN * (p * q) ** (-(k - 1) / 2.0))


def slicing_product(j_max: int, p: float, q: float, tail_tol: float = 1e-14,
                    max_terms: int = 100_000) -> tuple[np.ndarray, float]:
    """Partial products L_1..L_{j_max} and the limit L = ∏ ℓ_k.

    The limit is summed in log form until the relative increment drops
    below ``tail_tol``.
    """
    logs = [log_ell(k, p, q) for k in range(1, j_max + 1)]
    partial = np.exp(np.cumsum(logs))
    total = math.fsum(logs)
    k = j_max
    while True:
        k += 1
        inc = log_ell(k, p, q)
        total += inc
        if inc < tail_tol or k >= max_terms:
            break
    return partial, math.exp(total)


def tail_converged_index(p: float, q: float, tol: float = 1e-14) -> int:
    """Smallest k whose factor ℓ_k changes the product by less than ``tol``."""
    k = 1
    while log_ell(k, p, q) >= tol:
        k += 1
    return k


def first_exponents(p: float, q: float, n: int) -> IterationState:
    return IterationState(
        j=1,
        alpha=(n - 1) * (p - 1) / 2.0,
        a=(n + 1) * (q - 1) / 2.0,
        beta=1.0,
        b=0.0,
    )


def first_terms(params: ProblemParams, c: IterationConstants) -> IterationState:
    """j = 1 state including the multiplicative constants D1, Q1."""
    if not blowup_condition(params):
        raise RegionError("first lower bounds require pq < p_Gla(n)")
    for name in ("C1", "C2", "C3", "C4"):
        if not getattr(c, name) > 0:
            raise ValueError(f"{name} must be positive")
    s = first_exponents(params.p, params.q, params.n)
    return replace(s, logD=c.logD1, logQ=c.logQ1, L=ell(1, params.p, params.q))


def recursion_step(state: IterationState, params: ProblemParams,
                   c: Optional[IterationConstants] = None) -> IterationState:
    """One induction step j -> j+1.

    Exponents need only (p, q, n).  The constants advance when ``c`` is given
    and ``state`` carries log D_j, log Q_j.
    """
    p, q, n = params.p, params.q, params.n
    j = state.j
    nxt = IterationState(
        j=j + 1,
        alpha=(n - 1) * (p - 1) / 2.0 + state.a * p,
        a=(n + 1) * (q - 1) / 2.0 + state.alpha * q,
        beta=1.0 + state.b * p,
        b=state.beta * q,
    )
    if c is None or state.logD is None:
        return nxt
    pq = p * q
    bp1 = state.b * p + 1.0
    log_ell_next = log_ell(j + 1, p, q)
    logD = (math.log(4.0) + (1 - p) * math.log(c.C1) + math.log(math.sqrt(pq) - 1.0)
            - j * math.log(pq) - math.log(3.0 + SQRT5) - math.log(bp1)
            - bp1 * log_ell_next + p * state.logQ)
    logQ = math.log(c.C4) + q * state.logD
    return replace(nxt, logD=logD, logQ=logQ, L=state.L * math.exp(log_ell_next))


def _k_alpha(p, q, n):
    return ((n + 1) * p * q - 2 * p - (n - 1)) / (2.0 * (p * q - 1.0))


def _k_a(p, q, n):
    return ((n - 1) * p * q + 2 * q - (n + 1)) / (2.0 * (p * q - 1.0))


def _odd_exponents(j: int, p: float, q: float, n: int) -> tuple[float, float, float, float]:
    pq = p * q
    g = pq ** ((j - 1) / 2.0)
    s1 = first_exponents(p, q, n)
    ka, kA = _k_alpha(p, q, n), _k_a(p, q, n)
    return ((s1.alpha + ka) * g - ka,
            (s1.a + kA) * g - kA,
            (s1.beta + 1.0 / (pq - 1.0)) * g - 1.0 / (pq - 1.0),
            (s1.b + q / (pq - 1.0)) * g - q / (pq - 1.0))


def closed_form(j: int, params: ProblemParams,
                c: Optional[IterationConstants] = None) -> IterationState:
    """Explicit exponents for odd j (no recursion).

    When ``c`` is given, log D_j and log Q_j are filled by running the
    recursion, since they have no closed form.
    """
    if j < 1 or j % 2 == 0:
        raise ValueError("closed_form needs an odd j >= 1")
    alpha, a, beta, b = _odd_exponents(j, params.p, params.q, params.n)
    state = IterationState(j=j, alpha=alpha, a=a, beta=beta, b=b)
    if c is not None:
        rec = sequence(j, params, c)[-1]
        state = replace(state, logD=rec.logD, logQ=rec.logQ, L=rec.L)
    return state


def closed_form_even(j: int, params: ProblemParams) -> IterationState:
    """Explicit exponents for even j, one step on from the odd closed form."""
    if j < 2 or j % 2:
        raise ValueError("closed_form_even needs an even j >= 2")
    p, q, n = params.p, params.q, params.n
    pq = p * q
    alpha_o, a_o, _, _ = _odd_exponents(j - 1, p, q, n)
    g = pq ** (j / 2.0)
    s1 = first_exponents(p, q, n)
    return IterationState(
        j=j,
        alpha=s1.alpha + a_o * p,
        a=s1.a + alpha_o * q,
        beta=(s1.b + q / (pq - 1.0)) * g / q - 1.0 / (pq - 1.0),
        b=(s1.beta + 1.0 / (pq - 1.0)) * g / p - q / (pq - 1.0),
    )


def exponents_at(j: int, params: ProblemParams) -> IterationState:
    return closed_form(j, params) if j % 2 else closed_form_even(j, params)


def sequence(j_max: int, params: ProblemParams,
             c: Optional[IterationConstants] = None) -> list[IterationState]:
    """States 1..j_max by repeated :func:`recursion_step`."""
    if c is None:
        s = first_exponents(params.p, params.q, params.n)
    else:
        s = first_terms(params, c)
    out = [s]
    for _ in range(j_max - 1):
        s = recursion_step(s, params, c)
        out.append(s)
    return out


def geometric_weight_sum(j: int, pq: float) -> tuple[float, float]:
    """Σ_{k=1}^{(j-1)/2} (j+2-2k)(pq)^{k-1}, by direct summation and closed form."""
    m = (j - 1) // 2
    direct = math.fsum((j + 2 - 2 * k) * pq ** (k - 1) for k in range(1, m + 1))
    closed = (2 * pq / (pq - 1) * (1.5 * pq ** ((j - 1) / 2) - 0.5 * pq ** ((j - 3) / 2) - 1)
              - j) / (pq - 1)
    return direct, closed


def bound_coefficients(p: float, q: float) -> tuple[float, float]:
    """(B0, B1): tightest constants with β_j <= B0 (pq)^{j/2}, b_j <= B1 (pq)^{j/2}.

    Each is the larger of the odd- and even-j leading coefficients.
    """
    pq = p * q
    rt = math.sqrt(pq)
    beta1, b1 = 1.0, 0.0
    B0 = max((beta1 + 1 / (pq - 1)) / rt, (b1 + q / (pq - 1)) / q)
    B1 = max((b1 + q / (pq - 1)) / rt, (beta1 + 1 / (pq - 1)) / p)
    return B0, B1


def ell_power_floor(p: float, q: float, B0: float, j_max: int = 200) -> tuple[float, float]:
    """(closed-form limit, direct minimum over j <= j_max) of 1/ℓ_j^{b_{j-1}p+1}."""
    pq = p * q
    closed = math.exp(-ELL_GAIN * B0 * math.sqrt(pq))
    params = ProblemParams(p, q, 1)
    logs = []
    for s in sequence(j_max, params):
        # β_j = b_{j-1} p + 1
        logs.append(-s.beta * log_ell(s.j, p, q))
    return closed, math.exp(min(logs))


def data_constants(int_u1_phi: float, int_v1_phi: float) -> tuple[float, float]:
    """C2, C3 from the unit-profile data integrals ∫u1Φ, ∫v1Φ."""
    if int_u1_phi < 1e-12:
        raise DegenerateDataError("∫u1Φ dx vanishes; u1 must not be identically zero")
    if int_v1_phi < 1e-12:
        raise DegenerateDataError("∫v1Φ dx vanishes; v1 must not be identically zero")
    c2 = 2.0 / (3.0 + SQRT5) * (1.0 - math.exp(-(3.0 + SQRT5) / 2.0)) * int_u1_phi
    c3 = 0.5 * int_v1_phi
    return c2, c3


def c4_constant(c1: float, q: float, n: int) -> float:
    return 0.5 * c1 ** (1.0 - q) * ((n + 1) / 2.0) ** (q - 1.0)


def constants_ledger(params: ProblemParams, c1: float, int_u1_phi: float,
                     int_v1_phi: float, j_max_M: int = 200) -> IterationConstants:
    """Instantiate every constant of the iteration for one parameter point."""
    if not blowup_condition(params):
        raise RegionError("constants ledger requires pq < p_Gla(n)")
    if not c1 > 0:
        raise ValueError("C1 must be positive")
    p, q, n, eps = params.p, params.q, params.n, params.eps
    pq = p * q
    lpq = math.log(pq)
    C2, C3 = data_constants(int_u1_phi, int_v1_phi)
    C4 = c4_constant(c1, q, n)
    logD1 = ((1 - p) * math.log(c1) + p * math.log(C3) - math.log(3.0 + SQRT5)
             + math.log(-math.expm1(-1.0 - (3.0 + SQRT5) / 4.0)) + p * math.log(eps))
    logQ1 = q * math.log(C2) + math.log(C4) + q * math.log(eps)
    B0, B1 = bound_coefficients(p, q)
    M_closed, M_direct = ell_power_floor(p, q, B0, j_max_M)
    M = min(M_closed, M_direct)
    base = (math.log(4.0) + (1 - p) * math.log(c1) + math.log(math.sqrt(pq) - 1.0)
            + math.log(M) - math.log(3.0 + SQRT5) - math.log(B0))
    logE0 = base + p * math.log(C4)
    logE1 = q * base + math.log(C4)
    j0 = math.ceil(2 / 3 + 2 * logE0 / (3 * lpq) - 2 * pq / (pq - 1))
    j1 = math.ceil(2 / 3 + 2 * logE1 / (3 * q * lpq) - 2 * pq / (pq - 1))
    logE2 = (logD1 - p * math.log(eps) + (1 - 7 * pq) / (2 * (pq - 1) ** 2) * lpq
             + logE0 / (pq - 1))
    logE3 = (logQ1 - q * math.log(eps) + q * (1 - 7 * pq) / (2 * (pq - 1) ** 2) * lpq
             + logE1 / (pq - 1))
    T1, T2 = t1_t2(params)
    ka, kA = _k_alpha(p, q, n), _k_a(p, q, n)
    s1 = first_exponents(p, q, n)
    expo4 = s1.alpha + ka + pq / (pq - 1)
    logE4 = (-logE2 + expo4 * math.log(2.0)) / (p * T1)
    logE5 = None
    log_eps0 = T1 * logE4
    if T2 > 0:
        expo5 = s1.a + kA + q / (pq - 1)
        logE5 = (-logE3 + expo5 * math.log(2.0)) / (q * T2)
        log_eps0 = min(log_eps0, T2 * logE5)
    _, L = slicing_product(1, p, q)
    if not (M > 0 and L > 1):
        raise ValueError("nonpositive derived constant")
    return IterationConstants(
        C1=c1, C2=C2, C3=C3, C4=C4, logD1=logD1, logQ1=logQ1, B0=B0, B1=B1,
        M=M, M_closed=M_closed, M_direct=M_direct,
        logE0=logE0, logE1=logE1, logE2=logE2, logE3=logE3, logE4=logE4,
        logE5=logE5, j0=j0, j1=j1, L=L, T1=T1, T2=T2, eps0=_safe_exp(log_eps0),
    )


def _safe_exp(x: float) -> float:
    return math.exp(x) if x < 709 else math.inf


def envelope(t: float, j: int, params: ProblemParams,
             c: IterationConstants) -> tuple[LogValue, LogValue]:
    """Lower bounds (F1, F2) of order j at time t, as LogValues."""
    if j % 2 == 0:
        raise ValueError("envelopes are evaluated at odd j")
    s = closed_form(j, params, c)
    if not t > s.L:
        if t == s.L:
            # (t - L_j)^0 = 1 for b_1 = 0; β_j >= 1 makes the F1 bound vanish
            f1 = LogValue.zero()
            f2 = (LogValue(s.logQ - s.a * math.log(params.R + t))
                  if s.b == 0 else LogValue.zero())
            return f1, f2
        raise ValueError(f"envelope needs t > L_j = {s.L}")
    lr, lt = math.log(params.R + t), math.log(t - s.L)
    return (LogValue(s.logD - s.alpha * lr + s.beta * lt),
            LogValue(s.logQ - s.a * lr + s.b * lt))


def log_envelope_rate(t: float, params: ProblemParams, c: IterationConstants) -> float:
    """log(E2 ε^p 2^{-A} t^{p T1}); the F1 envelope diverges as j -> ∞ iff > 0."""
    p, q, n = params.p, params.q, params.n
    pq = p * q
    s1 = first_exponents(p, q, n)
    A = s1.alpha + _k_alpha(p, q, n) + pq / (pq - 1)
    return c.logE2 + p * math.log(params.eps) - A * math.log(2.0) + p * c.T1 * math.log(t)


class EpsilonTooLargeError(ValueError):
    pass


def predicted_blowup_time(params: ProblemParams, c: IterationConstants) -> float:
    """max{R, 2L, E4 ε^{-1/T1}}: beyond it the j -> ∞ envelope of F1 diverges."""
    if not blowup_condition(params):
        raise RegionError("predicted blow-up time requires pq < p_Gla(n)")
    if params.eps > c.eps0:
        raise EpsilonTooLargeError(
            f"eps = {params.eps:g} exceeds eps0 = {c.eps0:g}")
    log_te = c.logE4 - math.log(params.eps) / c.T1
    return max(params.R, 2.0 * c.L, _safe_exp(log_te))
