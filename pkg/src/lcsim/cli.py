"""Command-line entry points: run, sweep, linear-verify, data-report, resume."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .data import InitialDataParams, make_director_data, norms_report
from .experiment import (
    ConfigError,
    load_config,
    resume_simulation,
    run_simulation,
    sweep_amplitude,
)
from .kelvin import KelvinMode, enhanced_dissipation_check, inviscid_damping_check
from .norms import NormParams
from .spectral import Grid

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    result = run_simulation(cfg, args.out)
    print(json.dumps(result.summary, indent=2, sort_keys=True))
    return EXIT_BLOWUP if result.summary["verdict"] == "blown_up" else EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    a_values = [float(v) for v in args.amplitudes.split(",") if v]
    lam_values = None
    if args.lambdas:
        lam_values = [float(v) for v in args.lambdas.split(",") if v]
    table = sweep_amplitude(cfg, a_values, lam_values, jobs=args.jobs,
                            outdir=args.out)
    print(f"phase table: {table}")
    return EXIT_OK


def _cmd_linear_verify(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ks = [float(v) for v in args.ks.split(",") if v]
    nus = [float(v) for v in args.nus.split(",") if v]
    modes = [KelvinMode(k, 0.0) for k in ks]
    fit = enhanced_dissipation_check(modes, nus=nus, c_fit_window=args.depth)
    t_grid = np.geomspace(10.0, 100.0, 40)
    slope = inviscid_damping_check(KelvinMode(1.0, 0.0, nu=0.0), t_grid)
    lines = ["k,xi0,nu,t_decay,rate"]
    for row in fit.table:
        lines.append(f"{row['k']!r},{row['xi0']!r},{row['nu']!r},"
                     f"{row['t_decay']!r},{row['rate']!r}")
    (out / "linear_fit_report.csv").write_text("\n".join(lines) + "\n")
    summary = {
        "exponent_k": fit.exponent_k,
        "exponent_nu": fit.exponent_nu,
        "prefactor": fit.prefactor,
        "max_fit_residual": float(np.max(np.abs(fit.residuals))),
        "inviscid_damping_slope": slope,
    }
    (out / "linear_fit_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True))
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_data_report(args) -> int:
    norm_params = NormParams(m=args.m, eps=args.eps, delta=args.delta)
    params = InitialDataParams(args.lam, args.n, args.theta, profile=args.profile)
    lx = args.lx if args.lx > 0 else 32.0 * np.pi / args.lam
    ly = args.ly if args.ly > 0 else 4.0 * np.pi
    grid = Grid(args.nx, args.ny, lx, ly)
    d = make_director_data(params, grid, embedding=args.embedding)
    report = norms_report(d, params, norm_params, C_cal=args.c_cal)
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_resume(args) -> int:
    result = resume_simulation(args.checkpoint, args.t_end, args.out,
                               config_path=args.config)
    print(json.dumps(result.summary, indent=2, sort_keys=True))
    return EXIT_BLOWUP if result.summary["verdict"] == "blown_up" else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lcsim",
        description="Pseudo-spectral shear-frame simulator for the coupled "
                    "vorticity / director system, with weighted-norm diagnostics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate one configuration")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="amplitude (and scaling) sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--amplitudes", required=True, help="comma separated A values")
    p.add_argument("--lambdas", default="", help="comma separated lambda values")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("linear-verify", help="decay-law fits on exact modes")
    p.add_argument("--out", required=True)
    p.add_argument("--ks", default="1,2,4,8")
    p.add_argument("--nus", default="1e-2,1e-3,1e-4")
    p.add_argument("--depth", type=float, default=30.0)
    p.set_defaults(func=_cmd_linear_verify)

    p = sub.add_parser("data-report", help="norms of one family datum")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--lambda", type=float, required=True, dest="lam")
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.4)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1.5)
    p.add_argument("--c-cal", type=float, default=1.0)
    p.add_argument("--profile", default="band")
    p.add_argument("--embedding", default="axis")
    p.add_argument("--nx", type=int, default=256)
    p.add_argument("--ny", type=int, default=512)
    p.add_argument("--lx", type=float, default=0.0, help="0 = scale with lambda")
    p.add_argument("--ly", type=float, default=0.0, help="0 = default box")
    p.set_defaults(func=_cmd_data_report)

    p = sub.add_parser("resume", help="continue from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None,
                   help="defaults to config.txt beside the checkpoint")
    p.set_defaults(func=_cmd_resume)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
