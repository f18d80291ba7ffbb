"""Method-of-lines solver for the damped-wave / wave system

    u_tt - Δu + u_t = |v_t|^p,     v_tt - Δv = |u_t|^q.

State is (u, u_t, v, v_t); the Laplacian is the 3-point stencil on the line
(n = 1) or the conservative radial stencil r^{1-n} ∂_r (r^{n-1} ∂_r) with a
symmetric ghost at r = 0 (n >= 2).  Time stepping is classical RK4 with
dt = cfl * dx, further capped near blow-up by the source stiffness.

Along the run we track F2(t) = ∫ v_t Ψ and F1(t) = ∫_0^t ∫ u_t Ψ, with
Ψ = e^{-t} Φ taken from :mod:`nakaolab.testfn` in log form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exponents import ProblemParams
from .testfn import log_phi, log_sphere_area

MODES = ("full", "linear_free", "linear_damped")

TRACE_COLUMNS = ("t", "F1", "F2", "sup_ut", "sup_vt", "support_radius")
_EXTRA_COLUMNS = ("dF1", "src_v", "src_u", "cum_src_v", "cum_src_u",
                  "u_psi", "v_psi", "energy_u", "energy_v", "dt")

# Ψ is exponentiated only inside |x| <= R + t + PSI_MARGIN; the fields vanish
# (up to grid-dispersion tails) outside the cone |x| <= R + t.
PSI_MARGIN = 10.0
SUPPORT_FLOOR = 1e-12


class ConfigError(ValueError):
    """Invalid simulation configuration."""


class CFLError(ConfigError):
    """Requested Courant number outside the stable range."""


@dataclass(frozen=True)
class SimConfig:
    params: ProblemParams
    nx: int = 2048
    cfl: float = 0.4
    t_max: float = 50.0
    blowup_threshold: float = 1e8
    track_every: int = 1
    mode: str = "full"
    stiffness: float = 0.1

    def __post_init__(self):
        if int(self.nx) != self.nx or self.nx < 256:
            raise ConfigError("nx must be an integer >= 256")
        if not 0 < self.cfl <= 0.5:
            raise CFLError(f"cfl = {self.cfl} violates 0 < cfl <= 0.5")
        if not self.t_max > 0:
            raise ConfigError("t_max must be positive")
        if not self.blowup_threshold > 0:
            raise ConfigError("blowup_threshold must be positive")
        if int(self.track_every) != self.track_every or self.track_every < 1:
            raise ConfigError("track_every must be a positive integer")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")

    @property
    def half_width(self) -> float:
        return self.params.R + self.t_max + 2.0

    @property
    def damping(self) -> float:
        return 0.0 if self.mode == "linear_free" else 1.0

    @property
    def sources(self) -> bool:
        return self.mode == "full"


@dataclass
class FieldState:
    u: np.ndarray
    ut: np.ndarray
    v: np.ndarray
    vt: np.ndarray
    t: float = 0.0

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.u).all() and np.isfinite(self.ut).all()
                    and np.isfinite(self.v).all() and np.isfinite(self.vt).all())


class Grid:
    """Nodes, Laplacian and quadrature weights for one configuration."""

    def __init__(self, config: SimConfig):
        n, nx = config.params.n, config.nx
        X = config.half_width
        self.n = n
        self.radial = n >= 2
        if self.radial:
            self.x = np.linspace(0.0, X, nx)
            self.dx = X / (nx - 1)
            self.r = self.x
            k = n - 1
            area = math.exp(log_sphere_area(n - 1))
            rh = (np.arange(nx - 1) + 0.5) * self.dx
            self._flux_w = rh**k
            self._inv_rk = np.zeros(nx)
            self._inv_rk[1:] = 1.0 / self.r[1:] ** k
            # interior: cell volume |S| r^k dx; origin: volume of the ball of radius dx/2
            self.w = area * self.r**k * self.dx
            self.w[0] = area * (0.5 * self.dx) ** k * self.dx / (2 * n)
            self.w[-1] = 0.0
            self._grad_w = area * self._flux_w * self.dx
        else:
            self.x = np.linspace(-X, X, nx)
            self.dx = 2.0 * X / (nx - 1)
            self.r = np.abs(self.x)
            self.w = np.full(nx, self.dx)
            self.w[0] = self.w[-1] = 0.0
            self._grad_w = np.full(nx - 1, self.dx)
        self.log_phi = log_phi(n, self.r)

    def laplacian(self, u: np.ndarray) -> np.ndarray:
        out = np.zeros_like(u)
        h2 = self.dx * self.dx
        if not self.radial:
            out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / h2
            return out
        flux = self._flux_w * np.diff(u)
        out[1:-1] = (flux[1:] - flux[:-1]) * self._inv_rk[1:-1] / h2
        # ghost u(-dx) = u(dx): Δu(0) = n u''(0)
        out[0] = 2.0 * self.n * (u[1] - u[0]) / h2
        return out

    def psi_weights(self, t: float, R: float) -> np.ndarray:
        """Quadrature weights times Ψ(t, ·), zero outside the padded cone."""
        inside = self.r <= R + t + PSI_MARGIN
        out = np.zeros_like(self.w)
        out[inside] = self.w[inside] * np.exp(self.log_phi[inside] - t)
        return out

    def energy(self, f: np.ndarray, ft: np.ndarray) -> float:
        """Discrete energy ½ Σ w f_t² + ½ Σ w_{i+½} ((f_{i+1}-f_i)/dx)²."""
        g = np.diff(f) / self.dx
        return 0.5 * float(np.dot(self.w, ft * ft) + np.dot(self._grad_w, g * g))

    def integrate(self, f: np.ndarray) -> float:
        return float(np.dot(self.w, f))


def bump(r: np.ndarray, R: float) -> np.ndarray:
    """(1 - |x/R|²)^4 on B_R, zero outside: C³, nonnegative, B(0) = 1."""
    s = np.clip(1.0 - (np.asarray(r) / R) ** 2, 0.0, None)
    return s**4


def init_bump(params: ProblemParams, nx: int = 2048, grid: Optional[Grid] = None,
              config: Optional[SimConfig] = None) -> FieldState:
    """u0 = u1 = v0 = v1 = ε B(|x|) at t = 0."""
    if grid is None:
        grid = Grid(config or SimConfig(params, nx=nx))
    b = params.eps * bump(grid.r, params.R)
    return FieldState(b.copy(), b.copy(), b.copy(), b.copy(), 0.0)


def _rhs(grid: Grid, config: SimConfig, u, ut, v, vt):
    p, q = config.params.p, config.params.q
    dut = grid.laplacian(u) - config.damping * ut
    dvt = grid.laplacian(v)
    if config.sources:
        dut = dut + np.abs(vt) ** p
        dvt = dvt + np.abs(ut) ** q
    for a in (dut, dvt):
        a[-1] = 0.0
        if not grid.radial:
            a[0] = 0.0
    return ut, dut, vt, dvt


def stable_dt(state: FieldState, config: SimConfig, grid: Grid) -> float:
    """CFL step, capped by stiffness / max(sup|u_t|^{q-1}, sup|v_t|^{p-1})."""
    dt = config.cfl * grid.dx
    if config.sources:
        p, q = config.params.p, config.params.q
        rate = max(np.max(np.abs(state.ut)) ** (q - 1), np.max(np.abs(state.vt)) ** (p - 1))
        if rate > 0:
            dt = min(dt, config.stiffness / rate)
    return dt


def step(state: FieldState, config: SimConfig, grid: Optional[Grid] = None,
         dt: Optional[float] = None) -> FieldState:
    """One RK4 step.  Overflow shows up as non-finite entries, not exceptions."""
    if grid is None:
        grid = Grid(config)
    if dt is None:
        dt = stable_dt(state, config, grid)
    y0 = (state.u, state.ut, state.v, state.vt)
    with np.errstate(over="ignore", invalid="ignore"):
        k1 = _rhs(grid, config, *y0)
        k2 = _rhs(grid, config, *(y + 0.5 * dt * k for y, k in zip(y0, k1)))
        k3 = _rhs(grid, config, *(y + 0.5 * dt * k for y, k in zip(y0, k2)))
        k4 = _rhs(grid, config, *(y + dt * k for y, k in zip(y0, k3)))
        new = [y + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
               for y, a, b, c, d in zip(y0, k1, k2, k3, k4)]
    return FieldState(*new, t=state.t + dt)


@dataclass
class FunctionalTrace:
    """Sampled functionals of one run.

    ``columns`` maps every name in TRACE_COLUMNS (plus diagnostics such as
    ``dF1`` = ∫u_tΨ, ``src_v`` = ∫|v_t|^pΨ, ``cum_src_v`` its time integral,
    ``energy_v``) to a numpy array over samples.
    """

    columns: dict
    blowup: Optional[tuple[float, str]] = None
    data_u: float = 0.0
    data_v: float = 0.0
    dx: float = 0.0
    cfl_dt: float = 0.0
    meta: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.columns[name]

    def __len__(self):
        return len(self.columns["t"])

    def window(self, t_stop: float) -> "FunctionalTrace":
        keep = self.columns["t"] <= t_stop
        return FunctionalTrace({k: v[keep] for k, v in self.columns.items()},
                               None, self.data_u, self.data_v, self.dx,
                               self.cfl_dt, dict(self.meta))


def _support_radius(grid: Grid, state: FieldState) -> float:
    big = np.maximum(np.abs(state.u), np.abs(state.v)) > SUPPORT_FLOOR
    return float(np.max(grid.r[big])) if big.any() else 0.0


def run(config: SimConfig, state: Optional[FieldState] = None,
        max_steps: int = 10_000_000) -> FunctionalTrace:
    """Integrate to t_max or until blow-up, sampling the functionals."""
    grid = Grid(config)
    if state is None:
        state = init_bump(config.params, grid=grid)
    params = config.params
    p, q, R = params.p, params.q, params.R
    cfl_dt = config.cfl * grid.dx

    w0 = grid.psi_weights(0.0, R)
    data_u = float(np.dot(w0, state.u + state.ut))
    data_v = float(np.dot(w0, state.v + state.vt))

    rows: dict[str, list] = {k: [] for k in TRACE_COLUMNS + _EXTRA_COLUMNS}

    def measure(s: FieldState):
        with np.errstate(over="ignore", invalid="ignore"):
            pw = grid.psi_weights(s.t, R)
            # source integrals are zero by definition in the linear modes
            on = 1.0 if config.sources else 0.0
            return (float(np.dot(pw, s.ut)), float(np.dot(pw, s.vt)),
                    on * float(np.dot(pw, np.abs(s.vt) ** p)),
                    on * float(np.dot(pw, np.abs(s.ut) ** q)),
                    float(np.dot(pw, s.u)), float(np.dot(pw, s.v)))

    def record(s, F1, dF1, F2, sv, su, Sv, Su, hu, hv, dt):
        with np.errstate(over="ignore", invalid="ignore"):
            vals = dict(
                t=s.t, F1=F1, F2=F2,
                sup_ut=float(np.max(np.abs(s.ut))), sup_vt=float(np.max(np.abs(s.vt))),
                support_radius=_support_radius(grid, s),
                dF1=dF1, src_v=sv, src_u=su, cum_src_v=Sv, cum_src_u=Su,
                u_psi=hu, v_psi=hv,
                energy_u=grid.energy(s.u, s.ut), energy_v=grid.energy(s.v, s.vt), dt=dt)
        for k, v in vals.items():
            rows[k].append(v)
        return vals

    g, F2, sv, su, hu, hv = measure(state)
    F1 = Sv = Su = 0.0
    last = record(state, F1, g, F2, sv, su, Sv, Su, hu, hv, 0.0)
    blowup = _check_blowup(last, config.blowup_threshold)
    steps = 0
    while blowup is None and state.t < config.t_max - 1e-12 * config.t_max:
        dt = min(stable_dt(state, config, grid), config.t_max - state.t)
        capped = dt < cfl_dt * (1 - 1e-12) and state.t + dt < config.t_max
        state = step(state, config, grid, dt)
        steps += 1
        g_new, F2, sv_new, su_new, hu, hv = measure(state)
        F1 += 0.5 * dt * (g + g_new)
        Sv += 0.5 * dt * (sv + sv_new)
        Su += 0.5 * dt * (su + su_new)
        g, sv, su = g_new, sv_new, su_new
        finite = state.is_finite()
        done = (not finite or steps % config.track_every == 0 or capped
                or state.t >= config.t_max * (1 - 1e-12))
        if not done:
            with np.errstate(over="ignore", invalid="ignore"):
                done = max(np.max(np.abs(state.ut)), np.max(np.abs(state.vt))) \
                    > config.blowup_threshold
        if done:
            last = record(state, F1, g, F2, sv, su, Sv, Su, hu, hv, dt)
            blowup = _check_blowup(last, config.blowup_threshold)
        if steps >= max_steps:
            break

    cols = {k: np.asarray(v, dtype=float) for k, v in rows.items()}
    return FunctionalTrace(cols, blowup, data_u, data_v, grid.dx, cfl_dt,
                           meta={"steps": steps, "t_end": state.t})


def _check_blowup(sample: dict, threshold: float) -> Optional[tuple[float, str]]:
    a, b = sample["sup_ut"], sample["sup_vt"]
    if not (math.isfinite(a) and math.isfinite(b)):
        return sample["t"], "nonfinite"
    if a > threshold or b > threshold:
        return sample["t"], "sup_ut" if a >= b else "sup_vt"
    return None


def detect_blowup(trace: FunctionalTrace, threshold: float) -> Optional[tuple[float, str]]:
    """First sampled time where sup|u_t| or sup|v_t| exceeds ``threshold``
    or a field is non-finite."""
    t = trace["t"]
    a, b = trace["sup_ut"], trace["sup_vt"]
    for i in range(len(t)):
        hit = _check_blowup({"t": t[i], "sup_ut": a[i], "sup_vt": b[i]}, threshold)
        if hit is not None:
            return hit
    return None


class InsufficientSamplesError(ValueError):
    pass


@dataclass(frozen=True)
class IdentityReport:
    residual_f1: float
    residual_f2: float
    samples_used: int
    t_stop: float


def _fd3(t: np.ndarray, f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivatives at interior samples, 3-point nonuniform."""
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    f0, f1, f2 = f[:-2], f[1:-1], f[2:]
    d1 = (-h2 / (h1 * (h1 + h2)) * f0 + (h2 - h1) / (h1 * h2) * f1
          + h1 / (h2 * (h1 + h2)) * f2)
    d2 = 2.0 * (f0 / (h1 * (h1 + h2)) - f1 / (h1 * h2) + f2 / (h2 * (h1 + h2)))
    return d1, d2


def pre_blowup_stop(trace: FunctionalTrace) -> float:
    """Last sample time before the stiffness cap first shrank the step."""
    t, dt = trace["t"], trace["dt"]
    capped = np.nonzero((dt > 0) & (dt < trace.cfl_dt * (1 - 1e-9)) & (t < t[-1]))[0]
    if trace.blowup is None and capped.size == 0:
        return float(t[-1])
    if capped.size == 0:
        return float(t[-2]) if len(t) > 1 else float(t[-1])
    return float(t[max(capped[0] - 1, 0)])


def verify_identities(trace: FunctionalTrace, config: SimConfig,
                      t_stop: Optional[float] = None) -> IdentityReport:
    """Residuals of the two ODE identities satisfied by F1 and F2.

    With damping γ (1 for the damped equation, 0 in ``linear_free``):

        F1'' + (2+γ) F1' + γ F1 = ε∫(u0+u1)Φ + ∫_0^t ∫|v_t|^p Ψ + ∫|v_t|^p Ψ
        F2'  + 2 F2             = ε∫(v0+v1)Φ + ∫_0^t ∫|u_t|^q Ψ + ∫|u_t|^q Ψ

    Derivatives come from 3-point differences of the sampled functionals;
    only samples up to ``t_stop`` (default: before the stiffness cap engages)
    are used.  Returns max relative residual over interior samples.
    """
    stop = pre_blowup_stop(trace) if t_stop is None else t_stop
    tr = trace.window(stop)
    if len(tr) < 5:
        raise InsufficientSamplesError(
            f"need >= 5 samples before t = {stop:g}, have {len(tr)}")
    t = tr["t"]
    g = config.damping
    d1, d2 = _fd3(t, tr["F1"])
    lhs1 = d2 + (2.0 + g) * d1 + g * tr["F1"][1:-1]
    rhs1 = trace.data_u + tr["cum_src_v"][1:-1] + tr["src_v"][1:-1]
    e1, _ = _fd3(t, tr["F2"])
    lhs2 = e1 + 2.0 * tr["F2"][1:-1]
    rhs2 = trace.data_v + tr["cum_src_u"][1:-1] + tr["src_u"][1:-1]
    r1 = float(np.max(np.abs(lhs1 - rhs1) / np.abs(rhs1)))
    r2 = float(np.max(np.abs(lhs2 - rhs2) / np.abs(rhs2)))
    return IdentityReport(r1, r2, len(tr) - 2, float(stop))


def bump_phi_integral(n: int, R: float, nodes: int = 512) -> float:
    """∫_{B_R} B(|x|) Φ(x) dx for the unit bump, by Gauss-Legendre in r."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    r = 0.5 * R * (x + 1.0)
    f = bump(r, R) * np.exp(log_phi(n, r)) * r ** (n - 1)
    return math.exp(log_sphere_area(n - 1)) * 0.5 * R * float(np.dot(w, f))
