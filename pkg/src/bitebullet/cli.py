"""Command-line entry point: ``bitebullet {calibrate,solve,simulate,sweep,hitting-time}``.

Exit codes: 0 success, 2 config/validation error, 3 domain error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, _core
from .closed_form import (
    deterministic_solution,
    expected_hitting_time,
    hitting_time_density,
    hitting_time_moments,
    optimal_barrier,
    pv_no_action,
    pv_with_action,
)
from .config import RunConfig, load_config, with_sim
from .model import DomainError, Strategy, ValidationError, critical_temperature
from .montecarlo import run_ensemble, summary_json, write_histogram_csv, write_quantiles_csv
from .sweep import Engine, SweepSpec, damage_curve

log = logging.getLogger("bitebullet")

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO = 0, 2, 3, 4
UNITS = {"time": "years", "money": "billion USD", "rates": "per year", "temperature": "degrees C"}


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def _grid(text: str) -> list[float]:
    """``lo:hi:n`` (inclusive linspace) or a comma-separated list."""
    if ":" in text:
        lo, hi, n = text.split(":")
        return [float(x) for x in np.linspace(float(lo), float(hi), int(n))]
    return _float_list(text)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="INI config file (defaults built in)")
    p.add_argument("--seed", type=int)
    p.add_argument("--paths", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--t-max", type=float, dest="t_max")
    p.add_argument("--no-bridge", action="store_true", help="disable Brownian-bridge barrier correction")
    p.add_argument("--quantiles", type=_float_list, help="comma-separated quantile levels")
    p.add_argument("--bins", type=int, help="histogram bins")
    p.add_argument("--threads", type=int, default=None, help="worker threads (results do not depend on it)")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--json", action="store_true", help="print JSON instead of text")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bitebullet", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="map temperature dynamics to damage-rate GBM parameters")
    _common(p)

    p = sub.add_parser("solve", help="closed-form optimal barrier, value and hitting time")
    _common(p)

    p = sub.add_parser("simulate", help="Monte Carlo distribution of total damage")
    _common(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--never", action="store_true")
    g.add_argument("--immediate", action="store_true")
    g.add_argument("--barrier", type=float, metavar="H")
    g.add_argument("--optimal", action="store_true")

    p = sub.add_parser("sweep", help="damage vs barrier level for several cost growth rates")
    _common(p)
    p.add_argument("--H-grid", dest="H_grid", type=_grid, default=_grid("1:20:39"),
                   help="lo:hi:n or comma list (default 1:20:39)")
    p.add_argument("--q-list", dest="q_list", type=_float_list, default=[0.0, 0.01, 0.02, 0.03, 0.04, 0.05])
    p.add_argument("--engine", choices=[e.value for e in Engine], default=Engine.CLOSED_FORM.value)

    p = sub.add_parser("hitting-time", help="first-passage density and mean for a barrier")
    _common(p)
    p.add_argument("--barrier", type=float, required=True, metavar="H")
    p.add_argument("--tau-max", type=float, default=None, help="end of the density grid (default 5 x mean)")
    p.add_argument("--points", type=int, default=501)
    return ap


def _resolve(args) -> RunConfig:
    cfg = load_config(args.config)
    return with_sim(
        cfg,
        seed=args.seed,
        paths=args.paths,
        dt=args.dt,
        t_max=args.t_max,
        bridge_correction=False if args.no_bridge else None,
        quantile_levels=tuple(args.quantiles) if args.quantiles else None,
        histogram_bins=args.bins,
    )


def _manifest(args, cfg: RunConfig, outputs: list[Path]) -> Path:
    args.out.mkdir(parents=True, exist_ok=True)
    ini = args.out / "resolved_config.ini"
    ini.write_text(cfg.to_ini())
    man = {
        "command": args.command,
        "argv": sys.argv[1:],
        "library_version": __version__,
        "backend": _core.BACKEND,
        "seed": cfg.sim.seed,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "units": UNITS,
        "config": cfg.as_dict(),
        "outputs": [str(p) for p in outputs + [ini]],
    }
    path = args.out / "manifest.json"
    path.write_text(json.dumps(man, indent=2, sort_keys=True))
    return path


def _write_result(args, cfg: RunConfig, name: str, payload: dict) -> None:
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable))
    _manifest(args, cfg, [path])


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable))
    else:
        print("\n".join(text_lines))


def _jsonable(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(type(o))


def cmd_calibrate(args) -> int:
    cfg = _resolve(args)
    if cfg.temperature is None:
        raise ValidationError("calibrate needs a [temperature] section (config has [damage])")
    d = cfg.dynamics
    payload = {"alpha1": d.alpha1, "alpha2": d.alpha2, "sigma1": d.sigma1, "sigma2": d.sigma2,
               "S0": d.S0, "r": d.r, "nu": d.log_drift(cfg.cost.q)}
    _write_result(args, cfg, "calibration.json", payload)
    _emit(args, payload, [f"{k:>7} = {v:.10g}" for k, v in payload.items()])
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = _resolve(args)
    d, c = cfg.dynamics, cfg.cost
    sol = optimal_barrier(d, c)
    payload = {"solution": sol.as_dict()}
    lines = [f"branch        {sol.branch.value}"]
    if sol.eps is not None:
        lines += [f"eps           {sol.eps:.6f}", f"eps_tilde     {sol.eps_tilde:.6f}"]
    if sol.H_star is not None:
        lines.append(f"H*            {sol.H_star:.4f}")
    lines.append(f"V0            {sol.V0:.4f}")
    lines.append(f"nu            {sol.nu:.6g}")
    if sol.expected_tau is not None:
        lines.append(f"E[tau]        {sol.expected_tau:.2f}")
    # the two barrier endpoints, for comparison with V0
    payload["never_act"] = pv_no_action(d, d.S0)
    payload["act_now"] = pv_with_action(d, c, d.S0, 0.0)
    lines.append(f"never act     {payload['never_act']:.4f}")
    lines.append(f"act now       {payload['act_now']:.4f}")
    if cfg.temperature is not None and sol.H_star is not None:
        cstar = critical_temperature(cfg.temperature, sol.H_star)
        payload["critical_temperature"] = cstar
        lines.append(f"C*            {cstar:.3f}")
    try:
        det = deterministic_solution(d, c)
        payload["deterministic"] = {"tau_star": det.tau_star, "S_star": det.S_star}
        lines.append(f"deterministic tau*={det.tau_star:.2f}  S*={det.S_star:.4f}")
    except ValidationError as exc:
        payload["deterministic"] = None
        lines.append(f"deterministic n/a ({exc})")
    _write_result(args, cfg, "solution.json", payload)
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _resolve(args)
    d, c = cfg.dynamics, cfg.cost
    if args.never:
        strat = Strategy.never()
    elif args.immediate:
        strat = Strategy.immediate()
    elif args.optimal:
        strat = Strategy.optimal()
    else:
        if not args.barrier > 0:
            raise ValidationError("--barrier must be > 0")
        strat = Strategy.barrier(args.barrier, d.S0)
    dist = run_ensemble(d, c, strat, cfg.sim, threads=args.threads)
    args.out.mkdir(parents=True, exist_ok=True)
    files = [args.out / "summary.json", args.out / "quantiles.csv", args.out / "histogram.csv"]
    files[0].write_text(summary_json(dist, cfg.sim))
    write_quantiles_csv(dist, files[1])
    write_histogram_csv(dist, files[2])
    _manifest(args, cfg, files)
    lines = [f"strategy      {dist.strategy}",
             f"paths         {dist.paths}",
             f"mean          {dist.mean:.3f}  (se {dist.std_error:.3f})"]
    lines += [f"q{k:<12g}{v:.3f}" for k, v in dist.quantiles.items()]
    lines.append(f"act fraction  {dist.act_fraction:.4f}")
    if dist.mean_tau_given_acted is not None:
        lines.append(f"E[tau|acted]  {dist.mean_tau_given_acted:.2f}")
    lines.append(f"wrote         {args.out}")
    _emit(args, dist.summary(cfg.sim), lines)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _resolve(args)
    spec = SweepSpec(tuple(args.H_grid), tuple(args.q_list), Engine(args.engine), cfg.sim)
    res = damage_curve(cfg.dynamics, cfg.cost, spec, threads=args.threads)
    args.out.mkdir(parents=True, exist_ok=True)
    files = [args.out / "sweep.csv", args.out / "argmin.json"]
    res.write_csv(files[0])
    files[1].write_text(res.argmin_json())
    _manifest(args, cfg, files)
    lines = []
    for q, a in res.argmins.items():
        parts = [f"q={q:g}", f"engine={a['engine']}"]
        for key in ("closed_form", "monte_carlo"):
            if key in a:
                parts.append(f"{key}: H={a[key]['H']:.3f} damage={a[key]['damage']:.3f}")
        lines.append("  ".join(parts))
    lines.append(f"wrote {args.out}")
    _emit(args, json.loads(res.argmin_json()), lines)
    return EXIT_OK


def cmd_hitting_time(args) -> int:
    cfg = _resolve(args)
    d, c = cfg.dynamics, cfg.cost
    H = args.barrier
    mass, first = hitting_time_moments(d, c, H)
    mean = expected_hitting_time(d, c, H)
    tau_max = args.tau_max or 5.0 * mean
    taus = np.linspace(0.0, tau_max, args.points)
    dens = [hitting_time_density(d, c, H, t) for t in taus]
    args.out.mkdir(parents=True, exist_ok=True)
    out = args.out / "hitting_time.csv"
    with open(out, "w") as fh:
        fh.write("tau,density\n")
        for t, g in zip(taus, dens):
            fh.write(f"{t!r},{g!r}\n")
    _manifest(args, cfg, [out])
    payload = {"barrier": H, "expected_tau": mean, "normalization": mass, "quadrature_mean": first}
    _emit(args, payload, [f"E[tau]          {mean:.2f}",
                          f"normalization   {mass:.9f}",
                          f"quadrature mean {first:.4f}",
                          f"wrote           {out}"])
    return EXIT_OK


COMMANDS = {
    "calibrate": cmd_calibrate,
    "solve": cmd_solve,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "hitting-time": cmd_hitting_time,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads is None:
        args.threads = os.cpu_count() or 1
    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
