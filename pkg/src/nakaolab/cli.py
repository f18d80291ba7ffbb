"""Command line entry point: ``nakaolab <subcommand>``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import asdict, fields
from pathlib import Path

import numpy as np

from . import __version__
from .exponents import ProblemParams, RegionError, blowup_condition, curve_values
from .experiments import (InsufficientBlowupsError, SweepConfig, fit_power_law,
                          monotonicity_violations, plot_data, run_sweep, sweep_csv,
                          theoretical_exponent)
from .iteration import (EpsilonTooLargeError, constants_ledger, exponents_at,
                        predicted_blowup_time, sequence)
from .solver import (TRACE_COLUMNS, CFLError, ConfigError, SimConfig, bump_phi_integral,
                     detect_blowup, pre_blowup_stop, run, verify_identities,
                     InsufficientSamplesError)
from .testfn import (QuadratureError, asymptotic_flatness, c1_estimate, log_phi,
                     verify_laplacian_eigen)

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

PARAM_KEYS = {f.name for f in fields(ProblemParams)}
SIM_KEYS = {f.name for f in fields(SimConfig)} - {"params"} | {"robust_threshold"}
SWEEP_KEYS = {f.name for f in fields(SweepConfig)} - {"base"} | {"slack"}
TOP_KEYS = {"params", "sim", "sweep", "output_dir", "seed"}


class InputError(ValueError):
    pass


def _dumps(obj) -> str:
    # json writes floats with repr(), i.e. shortest round-trip (<= 17 digits)
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return x
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _check_keys(block: dict, allowed: set, where: str):
    if not isinstance(block, dict):
        raise InputError(f"{where} must be a JSON object")
    for k in block:
        if k not in allowed:
            raise InputError(f"unknown key {where}.{k}" if where else f"unknown key {k}")


def load_config(path: str) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    _check_keys(cfg, TOP_KEYS, "")
    _check_keys(cfg.get("params", {}), PARAM_KEYS, "params")
    _check_keys(cfg.get("sim", {}), SIM_KEYS, "sim")
    _check_keys(cfg.get("sweep", {}), SWEEP_KEYS, "sweep")
    return cfg


def build_sim(cfg: dict) -> tuple[SimConfig, float]:
    sim = dict(cfg.get("sim", {}))
    robust = float(sim.pop("robust_threshold", 1e10))
    return SimConfig(ProblemParams(**cfg.get("params", {})), **sim), robust


def _effective(sim: SimConfig, robust: float) -> dict:
    d = asdict(sim)
    params = d.pop("params")
    d["robust_threshold"] = robust
    return {"params": params, "sim": d}


def _out_dir(args, cfg: dict | None = None) -> Path:
    out = Path(args.out or (cfg or {}).get("output_dir") or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _params_from_args(args) -> ProblemParams:
    return ProblemParams(args.p, args.q, args.n, getattr(args, "R", 1.0) or 1.0,
                         getattr(args, "eps", 1.0) or 1.0)


def cmd_region(args) -> int:
    report = curve_values(_params_from_args(args), args.boundary_eps)
    print(_dumps(report.to_dict()))
    return EXIT_OK


def cmd_phi(args) -> int:
    r = np.asarray(args.r, dtype=float)
    lp = log_phi(args.n, r)
    vals = [float(np.exp(v)) if v < 709 else None for v in lp]
    print(_dumps({"n": args.n, "r": r.tolist(), "log_phi": lp.tolist(), "phi": vals,
                  "version": __version__}))
    return EXIT_OK


def cmd_verify_testfn(args) -> int:
    radii = [0.5, 1.0, 2.0, 5.0, 10.0]
    report = {
        "c1": c1_estimate(args.n, args.R, args.t_max, args.num),
        "max_eigen_residual": verify_laplacian_eigen(args.n, radii, args.h),
        "asymptotic_flatness": asymptotic_flatness(args.n),
        "config": {"n": args.n, "R": args.R, "t_max": args.t_max, "num": args.num,
                   "h": args.h, "radii": radii},
        "version": __version__,
    }
    print(_dumps(report))
    return EXIT_OK


def cmd_iterate(args) -> int:
    params = _params_from_args(args)
    if not blowup_condition(params):
        raise RegionError(f"pq = {params.pq:g} is not below p_Gla({params.n})")
    c1 = c1_estimate(params.n, params.R, args.c1_tmax)
    integral = bump_phi_integral(params.n, params.R)
    c = constants_ledger(params, c1, integral, integral)
    rec = sequence(args.j_max, params, c)
    cols = ["j", "alpha_j", "a_j", "beta_j", "b_j", "logD_j", "logQ_j", "L_j",
            "alpha_cf", "a_cf", "beta_cf", "b_cf"]
    effective = {"p": params.p, "q": params.q, "n": params.n, "R": params.R,
                 "eps": params.eps, "j_max": args.j_max, "c1_tmax": args.c1_tmax}
    buf = io.StringIO()
    buf.write(f"# nakaolab {__version__} iterate {json.dumps(effective, sort_keys=True)}\n")
    buf.write(",".join(cols) + "\n")
    for s in rec:
        cf = exponents_at(s.j, params)
        row = [s.j, s.alpha, s.a, s.beta, s.b, s.logD, s.logQ, s.L,
               cf.alpha, cf.a, cf.beta, cf.b]
        buf.write(",".join(str(v) if isinstance(v, int) else f"{v:.12g}" for v in row) + "\n")
    out = _out_dir(args)
    (out / "sequence.csv").write_text(buf.getvalue())
    ledger = {"constants": c.to_dict(), "config": effective, "version": __version__,
              "data_integral": integral, "c1_grid": {"t_max": args.c1_tmax, "num": 201}}
    try:
        ledger["predicted_blowup_time"] = predicted_blowup_time(params, c)
    except EpsilonTooLargeError as exc:
        ledger["predicted_blowup_time_note"] = (
            f"omitted: {exc}; envelope divergence is only guaranteed for eps <= eps0")
    (out / "constants.json").write_text(_dumps(ledger))
    print(_dumps({"sequence": str(out / "sequence.csv"),
                  "constants": str(out / "constants.json")}))
    return EXIT_OK


def trace_csv(trace, header: str) -> str:
    buf = io.StringIO()
    buf.write(f"# {header}\n")
    buf.write(",".join(TRACE_COLUMNS) + "\n")
    cols = [trace[c] for c in TRACE_COLUMNS]
    for row in zip(*cols):
        buf.write(",".join(f"{v:.12g}" for v in row) + "\n")
    return buf.getvalue()


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    sim, robust = build_sim(cfg)
    effective = _effective(sim, robust)
    effective["seed"] = cfg.get("seed", 0)
    top = max(robust, sim.blowup_threshold) if sim.sources else sim.blowup_threshold
    trace = run(SimConfig(**{**asdict(sim), "params": sim.params, "blowup_threshold": top}))
    hit = detect_blowup(trace, sim.blowup_threshold)
    hit_r = detect_blowup(trace, robust)
    verdict = {
        "blown_up": hit is not None,
        "T_num": None if hit is None else hit[0],
        "trigger": None if hit is None else hit[1],
        "threshold": sim.blowup_threshold,
        "threshold_robust": (None if hit is None else
                             hit_r is not None and abs(hit_r[0] - hit[0]) <= 0.05 * hit[0]),
        "T_num_robust_threshold": None if hit_r is None else hit_r[0],
        "config": effective,
        "version": __version__,
    }
    if sim.mode == "linear_free":
        e = trace["energy_v"]
        verdict["energy_drift"] = float(np.max(np.abs(e - e[0])) / e[0]) if e[0] > 0 else 0.0
    if sim.mode == "linear_damped":
        verdict["energy_u_increase"] = float(max(0.0, np.max(np.diff(trace["energy_u"]))))
    try:
        rep = verify_identities(trace, sim)
        verdict["identity_residuals"] = asdict(rep)
    except InsufficientSamplesError as exc:
        verdict["identity_residuals"] = None
        verdict["identity_note"] = str(exc)
    out = _out_dir(args, cfg)
    header = f"nakaolab {__version__} simulate {json.dumps(_jsonable(effective), sort_keys=True)}"
    (out / "trace.csv").write_text(trace_csv(trace, header))
    (out / "verdict.json").write_text(_dumps(verdict))
    print(_dumps(verdict))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    sim, robust = build_sim(cfg)
    sw = dict(cfg.get("sweep", {}))
    slack = float(sw.pop("slack", 0.5))
    sweep = SweepConfig(base=sim, robust_threshold=robust, **sw)
    effective = _effective(sim, robust)
    effective["sweep"] = {k: v for k, v in asdict(sweep).items() if k != "base"}
    effective["sweep"]["slack"] = slack
    effective["seed"] = cfg.get("seed", 0)
    points = run_sweep(sweep)
    theo = theoretical_exponent(sweep)
    fit_json = {"theoretical_exponent": theo, "slack": slack, "config": effective,
                "version": __version__,
                "monotonicity_violations": monotonicity_violations(points),
                "censored_eps": [s.eps for s in points if s.censored]}
    try:
        fit = fit_power_law([(s.eps, s.T_num) for s in points if s.blown_up], theo, slack)
        fit_json.update(fit.to_dict())
    except InsufficientBlowupsError as exc:
        fit_json.update({"slope": None, "intercept": None, "r_squared": None,
                         "consistent": None, "points_used": sum(s.blown_up for s in points),
                         "reason": str(exc)})
    out = _out_dir(args, cfg)
    header = f"nakaolab {__version__} sweep {json.dumps(_jsonable(effective), sort_keys=True)}"
    (out / "sweep.csv").write_text(sweep_csv(points, header))
    (out / "fit.json").write_text(_dumps(fit_json))
    (out / "plot.dat").write_text(f"# {header}\n" + plot_data(points))
    print(_dumps({k: fit_json[k] for k in ("slope", "r_squared", "theoretical_exponent",
                                           "consistent")}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nakaolab", description=__doc__)
    ap.add_argument("--version", action="version", version=f"nakaolab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def pqn(sp):
        sp.add_argument("--p", type=float, required=True)
        sp.add_argument("--q", type=float, required=True)
        sp.add_argument("--n", type=int, required=True)

    sp = sub.add_parser("region", help="critical curves and blow-up region")
    pqn(sp)
    sp.add_argument("--boundary-eps", type=float, default=0.0)
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("iterate", help="iteration sequences and constants ledger")
    pqn(sp)
    sp.add_argument("--R", type=float, default=1.0)
    sp.add_argument("--eps", type=float, default=0.1)
    sp.add_argument("--j-max", type=int, default=21)
    sp.add_argument("--c1-tmax", type=float, default=50.0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_iterate)

    sp = sub.add_parser("phi", help="log of the eigenfunction at given radii")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=float, nargs="+", required=True)
    sp.set_defaults(func=cmd_phi)

    sp = sub.add_parser("verify-testfn", help="C1, eigen residual, asymptotic flatness")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--R", type=float, default=1.0)
    sp.add_argument("--t-max", type=float, default=50.0)
    sp.add_argument("--num", type=int, default=201)
    sp.add_argument("--h", type=float, default=1e-3)
    sp.set_defaults(func=cmd_verify_testfn)

    for name, func, helptext in (("simulate", cmd_simulate, "run one simulation"),
                                 ("sweep", cmd_sweep, "epsilon sweep and power-law fit")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", default=None)
        sp.set_defaults(func=func)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (QuadratureError, CFLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, ConfigError, RegionError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
