"""Lifespan sweeps over the data size ε and power-law fits of T(ε)."""
from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .exponents import lifespan_exponent
from .solver import SimConfig, detect_blowup, run


class InsufficientBlowupsError(ValueError):
    """Too few uncensored runs to fit a power law."""


@dataclass(frozen=True)
class SweepConfig:
    base: SimConfig
    eps_count: int = 7
    eps_min: float = 0.2
    eps_max: float = 0.8
    repeats_per_eps: int = 2
    robust_threshold: float = 1e10
    robust_rtol: float = 0.05
    workers: int = 1

    def __post_init__(self):
        if self.eps_count < 5:
            raise ValueError("eps_count must be >= 5")
        if not 0 < self.eps_min < self.eps_max:
            raise ValueError("need 0 < eps_min < eps_max")
        if self.repeats_per_eps < 2:
            raise ValueError("repeats_per_eps must be >= 2 (base and robustness thresholds)")
        if not self.robust_threshold > self.base.blowup_threshold:
            raise ValueError("robust_threshold must exceed the base blow-up threshold")

    def eps_values(self) -> np.ndarray:
        """Geometric grid, strictly decreasing from eps_max to eps_min."""
        return np.geomspace(self.eps_max, self.eps_min, self.eps_count)

    def thresholds(self) -> np.ndarray:
        return np.geomspace(self.base.blowup_threshold, self.robust_threshold,
                            self.repeats_per_eps)


@dataclass(frozen=True)
class SweepPoint:
    eps: float
    T_num: Optional[float]
    blown_up: bool
    robust: Optional[bool]
    censored: bool
    trigger: Optional[str]
    T_by_threshold: tuple


@dataclass(frozen=True)
class PowerLawFit:
    slope: float
    intercept: float
    r_squared: float
    theoretical_exponent: float
    consistent: bool
    slack: float
    points_used: int

    def to_dict(self) -> dict:
        return asdict(self)


def _one_run(args) -> SweepPoint:
    config, thresholds, rtol = args
    # A run to the highest threshold contains every lower-threshold run as a prefix.
    trace = run(replace(config, blowup_threshold=float(thresholds[-1])))
    hits = [detect_blowup(trace, th) for th in thresholds]
    times = tuple(None if h is None else float(h[0]) for h in hits)
    first = hits[0]
    if first is None:
        return SweepPoint(config.params.eps, None, False, None, True, None, times)
    robust = all(t is not None and abs(t - times[0]) <= rtol * times[0] for t in times)
    return SweepPoint(config.params.eps, float(first[0]), True, robust, False,
                      first[1], times)


def run_sweep(config: SweepConfig) -> list[SweepPoint]:
    """One blow-up verdict per ε, in decreasing-ε order regardless of workers."""
    jobs = []
    for e in config.eps_values():
        params = replace(config.base.params, eps=float(e))
        jobs.append((replace(config.base, params=params), config.thresholds(),
                     config.robust_rtol))
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(_one_run, jobs))
    return [_one_run(j) for j in jobs]


def monotonicity_violations(points: Sequence[SweepPoint], rtol: float = 0.05) -> list[tuple]:
    """Pairs (ε_a > ε_b) where T(ε_a) exceeds T(ε_b) by more than ``rtol``,
    or where ε_b blows up but the larger ε_a is censored."""
    bad = []
    pts = sorted(points, key=lambda s: -s.eps)
    for i, a in enumerate(pts):
        for b in pts[i + 1:]:
            if b.blown_up and not a.blown_up:
                bad.append((a.eps, b.eps, "censoring"))
            elif a.blown_up and b.blown_up and a.T_num > b.T_num * (1 + rtol):
                bad.append((a.eps, b.eps, "lifespan"))
    return bad


def fit_power_law(points: Sequence[tuple[float, float]], theoretical: float,
                  slack: float = 0.5) -> PowerLawFit:
    """Least squares of log T against log(1/ε).

    ``consistent`` means slope <= theoretical + slack: the lifespan bound is
    an upper bound with a free constant, so only large slopes disagree.
    """
    pts = [(float(e), float(t)) for e, t in points if t is not None and np.isfinite(t)]
    if len(pts) < 4:
        raise InsufficientBlowupsError(
            f"insufficient blow-ups: {len(pts)} uncensored points, need >= 4")
    x = np.log(1.0 / np.array([e for e, _ in pts]))
    y = np.log(np.array([t for _, t in pts]))
    if np.ptp(x) == 0:
        raise ValueError("degenerate ε grid: all values equal")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(float(slope), float(intercept), r2, float(theoretical),
                       bool(slope <= theoretical + slack), float(slack), len(pts))


def theoretical_exponent(config: SweepConfig) -> float:
    return lifespan_exponent(config.base.params)


def _g(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    return f"{x:.12g}"


def sweep_csv(points: Sequence[SweepPoint], header: str = "") -> str:
    buf = io.StringIO()
    if header:
        for line in header.splitlines():
            buf.write(f"# {line}\n")
    buf.write("eps,T_num,blown_up,robust,censored\n")
    for s in points:
        buf.write(",".join([_g(s.eps), _g(s.T_num), _g(s.blown_up), _g(s.robust),
                            _g(s.censored)]) + "\n")
    return buf.getvalue()


def plot_data(points: Sequence[SweepPoint]) -> str:
    """Two columns log(1/ε), log T_num for uncensored runs (gnuplot-ready)."""
    lines = ["# log(1/eps) log(T_num)"]
    for s in points:
        if s.blown_up:
            lines.append(f"{math.log(1.0 / s.eps):.12g} {math.log(s.T_num):.12g}")
    return "\n".join(lines) + "\n"
