"""Command-line interface.

Subcommands::

    simulate        run the full pipeline, write norms.csv + report.json
    sweep           run the pipeline over the configured gamma x mach lists
    rates           fit power laws to an existing norms.csv
    zero-mode       wave check of the x-average dynamics vs. the closed form
    oracle-compare  spectral vs. finite-difference solution at fixed k
    duhamel-bound   normalized forcing integral vs. the universal constant

Every subcommand accepts --config <path>; without it the bundled default
configuration is used.  The exit code is 0 only if every enabled check of
the subcommand passes.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .analysis import fit_power_law
from .config import RunConfig, default_config, load_config
from .pipeline import (run_config, run_convention_comparison, run_sweep,
                       _atomic_write)
from .verify import (duhamel_grid_check, oracle_comparison,
                     zero_mode_wave_check)


def _load(args) -> RunConfig:
    if args.config:
        return load_config(args.config)
    return default_config()


def _emit(path: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path:
        _atomic_write(path, text)
    sys.stdout.write(text)


def _cmd_simulate(args) -> int:
    cfg = _load(args)
    if args.ab_conventions:
        combined = run_convention_comparison(cfg)
        for conv in ("derived", "printed"):
            print(f"[{combined[conv]['status'].upper()}] convention {conv}")
        print(f"artifacts written to {cfg.out_dir}/")
        return 0 if combined["status"] == "pass" else 1
    result = run_config(cfg)
    for name, ok in sorted(result.checks.items()):
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")
    print(f"artifacts written to {cfg.out_dir}/")
    return 0 if result.passed else 1


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    summary = run_sweep(cfg)
    for point in summary["points"]:
        print(f"[{point['status'].upper()}] gamma={point['gamma']} "
              f"mach={point['mach']} -> {point['dir']}")
    return 0 if summary["status"] == "pass" else 1


def _cmd_rates(args) -> int:
    data = np.genfromtxt(args.csv, delimiter=",", names=True)
    lo = args.t_lo if args.t_lo is not None else 0.1 * float(data["t"][-1])
    hi = args.t_hi if args.t_hi is not None else float(data["t"][-1])
    growth = (data["qv_l2"] + data["rho_l2_scaled"] + data["theta_l2_scaled"])
    fits = {
        "pvx": fit_power_law(data["t"], data["pvx_l2"], (lo, hi)),
        "pvy": fit_power_law(data["t"], data["pvy_l2"], (lo, hi)),
        "growth": fit_power_law(data["t"], growth, (lo, hi)),
    }
    payload = {name: {"exponent": f.exponent, "residual": f.residual,
                      "window": list(f.window)} for name, f in fits.items()}
    _emit(args.out, payload)
    ok = all(np.isfinite(f.exponent) and f.residual < 0.5 for f in fits.values())
    return 0 if ok else 1


def _cmd_zero_mode(args) -> int:
    cfg = _load(args)
    machs = args.mach or [0.5, 1.0, 2.0]
    results = [zero_mode_wave_check(cfg.params.gamma, m, t_end=args.t,
                                    n=args.n) for m in machs]
    ok = all(r.max_error < 1e-6 and r.energy_drift < 1e-6 for r in results)
    payload = {
        "checks": [r.__dict__ for r in results],
        "tolerance": 1e-6,
        "status": "pass" if ok else "fail",
    }
    _emit(args.out, payload)
    return 0 if ok else 1


def _cmd_oracle(args) -> int:
    cfg = _load(args)
    base = oracle_comparison(gamma=cfg.params.gamma, mach=args.mach,
                             k=args.k, t_end=args.t,
                             n_eta=args.n_eta, n_y=args.n_y)
    fine = oracle_comparison(gamma=cfg.params.gamma, mach=args.mach,
                             k=args.k, t_end=args.t,
                             n_eta=2 * args.n_eta, n_y=2 * args.n_y)
    ok = base.worst < 1e-3 and fine.worst < base.worst
    payload = {
        "base": {"n_eta": base.n_eta, "n_y": base.n_y,
                 "discrepancy": base.discrepancy},
        "refined": {"n_eta": fine.n_eta, "n_y": fine.n_y,
                    "discrepancy": fine.discrepancy},
        "status": "pass" if ok else "fail",
    }
    _emit(args.out, payload)
    return 0 if ok else 1


def _cmd_duhamel(args) -> int:
    cfg = _load(args)
    ks = cfg.simulated_ks() if args.use_config_k else (1, 2, 3)
    gammas = sorted({cfg.params.gamma, 1.4, 2.0})
    check = duhamel_grid_check(gammas=gammas, ks=ks)
    payload = {
        "bound": check.bound,
        "worst_margin": check.worst_margin,
        "entries": check.entries,
        "status": "pass" if check.all_within else "fail",
    }
    _emit(args.out, payload)
    return 0 if check.all_within else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="couette-euler",
        description="Linearized compressible shear-flow mode simulator and "
                    "verification checks")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="configuration file (INI)")
        p.add_argument("--out", help="write the JSON result here as well")

    p = sub.add_parser("simulate", help="run the pipeline, emit CSV + JSON")
    common(p)
    p.add_argument("--ab-conventions", action="store_true",
                   help="run both system-matrix conventions side by side")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="pipeline over the [sweep] gamma x mach")
    common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("rates", help="power-law fits of an existing norms.csv")
    p.add_argument("--csv", required=True)
    p.add_argument("--t-lo", type=float, default=None)
    p.add_argument("--t-hi", type=float, default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_rates)

    p = sub.add_parser("zero-mode", help="x-average wave equation check")
    common(p)
    p.add_argument("--mach", type=float, action="append",
                   help="Mach value (repeatable; default 0.5 1 2)")
    p.add_argument("--t", type=float, default=2.0)
    p.add_argument("--n", type=int, default=4096)
    p.set_defaults(func=_cmd_zero_mode)

    p = sub.add_parser("oracle-compare",
                       help="spectral vs. finite-difference cross-check")
    common(p)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--mach", type=float, default=1.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--n-eta", type=int, default=512)
    p.add_argument("--n-y", type=int, default=2048)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("duhamel-bound",
                       help="forcing integral vs. universal constant")
    common(p)
    p.add_argument("--use-config-k", action="store_true",
                   help="take the k grid from the configuration")
    p.set_defaults(func=_cmd_duhamel)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
