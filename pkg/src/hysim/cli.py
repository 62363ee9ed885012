"""Command-line entry point: `hysim <subcommand> <config.json> [options]`.

Subcommands: validate, equilibrium, pcg, bargain, sweep, derive-externality.
Exit codes: 0 success; 1 config, validation, usage, or I/O error; 2 when a
point solved but carries flags (multiple equilibria, infeasible bargain).
Worker threads for sweeps come from the HYSIM_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .bargaining import solve_bargaining
from .errors import HysimError, MultipleEquilibria
from .externality import validate_model
from .interference import InterferenceModel, derive_externality
from .market import (MarketShares, PriceVector, equilibrium_residual,
                     iterate_dynamics, solve_equilibrium)
from .pricing import payoffs_mscg, pcg_equilibrium
from .scenario import (ConfigError, build_interference_model, build_model,
                       format_cell, load_config, run_scenario_rows, write_rows)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FLAGGED = 2


def _emit(payload: dict, args) -> None:
    if args.format == "csv":
        lines = [f"{k},{format_cell(v)}" for k, v in payload.items()
                 if not isinstance(v, (dict, list))]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(payload, indent=2, default=float) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        if not args.quiet:
            print(f"wrote {args.out}")
    elif not args.quiet:
        sys.stdout.write(text)


def _single_model(args):
    config = load_config(args.config)
    if len(config.r_l_values) != 1:
        raise ConfigError("this subcommand needs a single R_L, not a sweep")
    return config, build_model(config.model_block, config.r_l_values[0])


def cmd_validate(args) -> int:
    config, model = _single_model(args)
    report = validate_model(model)
    payload = {
        "family": model.family, "R_L": model.R_L, "passed": report.passed,
        "checks": [{"name": c.name, "passed": c.passed,
                    "worst_violation": c.worst_violation,
                    "location": c.location} for c in report.checks],
    }
    _emit(payload, args)
    return EXIT_OK if report.passed else EXIT_ERROR


def cmd_equilibrium(args) -> int:
    config, model = _single_model(args)
    prices = PriceVector(args.p_l, args.p_a)
    tol = args.tol if args.tol is not None else config.tol
    shares, case = solve_equilibrium(model, prices, tol=tol)
    if args.out and args.format == "csv":
        trace = iterate_dynamics(model, prices, MarketShares(0.0, 0.0),
                                 tol=tol, max_iter=config.max_iter,
                                 damping=config.damping)
        with Path(args.out).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "eta_l", "eta_a"])
            for i, point in enumerate(trace.shares):
                writer.writerow([i, format_cell(point.eta_l),
                                 format_cell(point.eta_a)])
        if not args.quiet:
            print(f"eta_l={shares.eta_l:.9g} eta_a={shares.eta_a:.9g} "
                  f"case={case}; trace written to {args.out}")
        return EXIT_OK
    _emit({"eta_l": shares.eta_l, "eta_a": shares.eta_a,
           "eta_b": shares.eta_b, "case": case,
           "residual": equilibrium_residual(model, prices, shares)}, args)
    return EXIT_OK


def cmd_pcg(args) -> int:
    config, model = _single_model(args)
    tol = args.tol if args.tol is not None else config.tol
    eq = pcg_equilibrium(model, args.delta, tol=tol)
    payoffs = payoffs_mscg(model, eq.shares, args.delta)
    _emit({"delta": args.delta, "eta_l": eq.shares.eta_l,
           "eta_a": eq.shares.eta_a, "p_l": eq.prices.p_l,
           "p_a": eq.prices.p_a, "u_sl": payoffs.u_sl, "u_db": payoffs.u_db,
           "bracket_gap": eq.bracket_gap, "iterations": eq.iterations}, args)
    return EXIT_OK


def cmd_bargain(args) -> int:
    config, model = _single_model(args)
    tol = args.tol if args.tol is not None else config.tol
    outcome = solve_bargaining(model, grid_n=config.bargain_grid_n,
                               pairing=config.pairing, eq_tol=tol)
    eq = outcome.equilibrium
    _emit({"delta_star": outcome.delta_star,
           "w_equiv": outcome.w_equiv,
           "revenue_transfer": outcome.revenue_transfer,
           "nash_product": outcome.nash_product,
           "feasible": outcome.feasible,
           "u_sl": outcome.payoffs.u_sl, "u_db": outcome.payoffs.u_db,
           "u_sl_dis": outcome.disagreement.u_sl,
           "u_db_dis": outcome.disagreement.u_db,
           "eta_l": eq.shares.eta_l, "eta_a": eq.shares.eta_a,
           "p_l": eq.prices.p_l, "p_a": eq.prices.p_a}, args)
    return EXIT_OK if outcome.feasible else EXIT_FLAGGED


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    if args.tol is not None:
        config.tol = args.tol
    rows = run_scenario_rows(config)
    out = args.out or config.output_path
    fmt = args.format or config.output_format
    if out:
        write_rows(rows, out, fmt=fmt)
        if not args.quiet:
            print(f"wrote {len(rows)} rows to {out}")
    elif not args.quiet:
        from .scenario import SWEEP_COLUMNS
        print(",".join(SWEEP_COLUMNS))
        for row in rows:
            print(",".join(format_cell(row[c]) for c in SWEEP_COLUMNS))
    return EXIT_FLAGGED if any(r["flags"] for r in rows) else EXIT_OK


def cmd_derive(args) -> int:
    config = load_config(args.config)
    if config.mc_block is None:
        raise ConfigError("derive-externality needs an 'mc' block in the config")
    seed = args.seed if args.seed is not None else config.seed
    imodel = build_interference_model(config.mc_block, seed)
    mc = config.mc_block
    x_grid = np.linspace(0.0, 1.0, mc.get("x_points", 11))
    ref = mc.get("ref_eta_l", 0.0)
    y_grid = np.linspace(0.0, 1.0 - ref, mc.get("y_points", 11))
    tables = derive_externality(imodel, x_grid, y_grid, ref_eta_l=ref,
                                R_L=config.r_l_values[0],
                                measure_separability=True)
    meta = {
        "R_L": config.r_l_values[0], "seed": tables.seed,
        "samples": tables.samples,
        "f_ci": list(map(float, tables.f_ci)),
        "g_ci": list(map(float, tables.g_ci)),
        "separability_residual": tables.separability_residual,
    }
    if args.out:
        # CSV table (column pairs x,f and y,g) plus a JSON metadata sidecar
        out = Path(args.out)
        with out.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "f", "y", "g"])
            n = max(tables.x_grid.size, tables.y_grid.size)
            for i in range(n):
                row = []
                if i < tables.x_grid.size:
                    row += [format_cell(tables.x_grid[i]),
                            format_cell(tables.f_smooth[i])]
                else:
                    row += ["", ""]
                if i < tables.y_grid.size:
                    row += [format_cell(tables.y_grid[i]),
                            format_cell(tables.g_smooth[i])]
                else:
                    row += ["", ""]
                writer.writerow(row)
        sidecar = out.with_suffix(out.suffix + ".meta.json")
        sidecar.write_text(json.dumps(meta, indent=2) + "\n")
        if not args.quiet:
            print(f"wrote {out} and {sidecar}")
    elif not args.quiet:
        payload = dict(meta, x_grid=list(map(float, tables.x_grid)),
                       f=list(map(float, tables.f_smooth)),
                       y_grid=list(map(float, tables.y_grid)),
                       g=list(map(float, tables.g_smooth)))
        print(json.dumps(payload, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hysim",
        description="Solver suite for the hybrid spectrum/information market.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="scenario JSON file")
        p.add_argument("--out", default=None, help="output file path")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("validate", help="check externality shape assumptions")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("equilibrium", help="market equilibrium at fixed prices")
    common(p)
    p.add_argument("--p_l", type=float, required=True)
    p.add_argument("--p_a", type=float, required=True)
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("pcg", help="price-competition equilibrium at fixed delta")
    common(p)
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(func=cmd_pcg)

    p = sub.add_parser("bargain", help="solve the revenue-share bargain")
    common(p)
    p.set_defaults(func=cmd_bargain)

    p = sub.add_parser("sweep", help="run the full pipeline over a R_L sweep")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("derive-externality",
                       help="tabulate f and g by Monte Carlo interference simulation")
    common(p)
    p.set_defaults(func=cmd_derive)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    if args.format is None and args.command != "sweep":
        args.format = "json"
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except MultipleEquilibria as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_FLAGGED
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except HysimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
