"""Scenario configs and the sweep pipeline behind the CLI.

A scenario JSON names an externality family, a leasing quality (single value
or sweep), bargaining settings, and solver tolerances.  Each sweep point runs
the full backward induction (bargain -> price competition -> market
equilibrium) plus the three benchmarks, and lands in one CSV/JSON row.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .bargaining import solve_bargaining
from .benchmarks import (coordination_benchmark, noncooperation_benchmark,
                         third_party_benchmark)
from .errors import HysimError, MultipleEquilibria
from .externality import (make_constant_model, make_linear_family,
                          make_power_family, make_table_model, validate_model)
from .interference import (DistSpec, InterferenceModel)
from .pricing import payoffs_mscg, pcg_equilibrium


class ConfigError(HysimError):
    """The scenario file is malformed or misses a required field."""


SWEEP_COLUMNS = [
    "R_L", "delta_star", "w_equiv", "revenue_transfer", "p_l", "p_a",
    "eta_l", "eta_a", "u_sl", "u_db", "net_rss", "net_coord", "net_noncoop",
    "net_third", "gain_vs_noncoop", "gap_vs_coord", "flags",
]


@dataclass
class ScenarioConfig:
    model_block: dict
    r_l_values: list
    is_sweep: bool
    bargaining_mode: str = "nash"
    delta: float = 0.0
    pairing: str = "own"
    bargain_grid_n: int = 101
    delta_3p: float = 0.3
    tol: float = 1e-8
    max_iter: int = 500
    damping: float = 0.5
    grid_n: int = 101
    seed: int = 0
    mc_block: Optional[dict] = None
    output_path: Optional[str] = None
    output_format: str = "csv"


def _require(block, key, where):
    if key not in block:
        raise ConfigError(f"missing required field {key!r} in {where}")
    return block[key]


def build_model(model_block: dict, r_l: float):
    """Externality model from the config block at a given leasing quality."""
    family = _require(model_block, "family", "model")
    params = model_block.get("params", {})
    if family == "power":
        return make_power_family(
            _require(params, "alpha1", "model.params"), params.get("beta1", 0.0),
            params.get("gamma1", 1.0), params.get("alpha2", 0.0),
            _require(params, "beta2", "model.params"), params.get("gamma2", 1.0),
            r_l)
    if family == "linear":
        return make_linear_family(
            _require(params, "alpha1", "model.params"),
            params.get("beta1", 0.0), params.get("beta2", 0.0), r_l)
    if family == "constant":
        return make_constant_model(
            _require(params, "f_value", "model.params"),
            params.get("g_value", 0.0), r_l)
    if family == "table":
        x_grid, f_vals = _table_columns(params, "f")
        y_grid, g_vals = _table_columns(params, "g")
        return make_table_model(x_grid, f_vals, y_grid, g_vals, r_l)
    raise ConfigError(f"unknown externality family {family!r}")


def _table_columns(params, which):
    if f"{which}_csv" in params:
        rows = np.loadtxt(params[f"{which}_csv"], delimiter=",", ndmin=2)
        return rows[:, 0], rows[:, 1]
    # inline tables: x_grid/f_vals and y_grid/g_vals
    if which == "f":
        return (np.asarray(_require(params, "x_grid", "model.params"), float),
                np.asarray(_require(params, "f_vals", "model.params"), float))
    return (np.asarray(_require(params, "y_grid", "model.params"), float),
            np.asarray(_require(params, "g_vals", "model.params"), float))


def build_interference_model(mc_block: dict, seed: int) -> InterferenceModel:
    def dist(key):
        spec = _require(mc_block, key, "mc")
        return DistSpec(_require(spec, "kind", f"mc.{key}"),
                        tuple(spec.get("params", [])))
    return InterferenceModel(
        N=_require(mc_block, "N", "mc"), K=_require(mc_block, "K", "mc"),
        dist_L=dist("dist_L"), dist_W=dist("dist_W"), dist_I=dist("dist_I"),
        power=mc_block.get("power", 10.0), noise=mc_block.get("noise", 0.1),
        utility=mc_block.get("utility", "log"), rho=mc_block.get("rho", 1.0),
        samples=mc_block.get("samples", 100_000),
        seed=mc_block.get("seed", seed),
        count_mode=mc_block.get("count_mode", "deterministic"))


def load_config(path) -> ScenarioConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")

    model_block = _require(raw, "model", "config")
    if "sweep" in raw:
        sweep = raw["sweep"]
        if sweep.get("param", "R_L") != "R_L":
            raise ConfigError("only R_L sweeps are supported")
        lo = _require(sweep, "from", "sweep")
        hi = _require(sweep, "to", "sweep")
        steps = _require(sweep, "steps", "sweep")
        if steps < 2 or not lo < hi:
            raise ConfigError("sweep needs steps >= 2 and from < to")
        r_l_values = list(np.linspace(lo, hi, steps))
        is_sweep = True
    elif "R_L" in raw:
        r_l_values = [float(raw["R_L"])]
        is_sweep = False
    elif "R_L" in model_block:
        r_l_values = [float(model_block["R_L"])]
        is_sweep = False
    else:
        raise ConfigError("missing required field: R_L or sweep")

    bargaining = raw.get("bargaining", {})
    solver = raw.get("solver", {})
    tol = solver.get("tol", 1e-8)
    if tol <= 0.0:
        raise ConfigError("solver.tol must be positive")
    output = raw.get("output", {})
    return ScenarioConfig(
        model_block=model_block, r_l_values=r_l_values, is_sweep=is_sweep,
        bargaining_mode=bargaining.get("mode", "nash"),
        delta=bargaining.get("delta", 0.0),
        pairing=bargaining.get("pairing", "own"),
        bargain_grid_n=bargaining.get("grid_n", 101),
        delta_3p=raw.get("third_party", {}).get("delta_3p", 0.3),
        tol=tol, max_iter=solver.get("max_iter", 500),
        damping=solver.get("damping", 0.5),
        grid_n=solver.get("grid_n", 101),
        seed=raw.get("seed", 0), mc_block=raw.get("mc"),
        output_path=output.get("path"),
        output_format=output.get("format", "csv"))


def run_sweep_point(config: ScenarioConfig, r_l: float) -> dict:
    """One full pipeline solve at a single leasing quality."""
    flags = []
    model = build_model(config.model_block, r_l)
    row = {c: None for c in SWEEP_COLUMNS}
    row["R_L"] = r_l
    try:
        if config.bargaining_mode == "fixed":
            eq = pcg_equilibrium(model, config.delta, tol=config.tol)
            delta_star = config.delta
            payoffs = payoffs_mscg(model, eq.shares, delta_star)
        else:
            outcome = solve_bargaining(model, grid_n=config.bargain_grid_n,
                                       pairing=config.pairing,
                                       eq_tol=config.tol)
            eq = outcome.equilibrium
            delta_star = outcome.delta_star
            payoffs = outcome.payoffs
            if not outcome.feasible:
                flags.append("infeasible_bargain")
        row.update(
            delta_star=delta_star,
            w_equiv=delta_star * eq.shares.eta_l,
            revenue_transfer=delta_star * eq.prices.p_l * eq.shares.eta_l,
            p_l=eq.prices.p_l, p_a=eq.prices.p_a,
            eta_l=eq.shares.eta_l, eta_a=eq.shares.eta_a,
            u_sl=payoffs.u_sl, u_db=payoffs.u_db,
            net_rss=payoffs.u_sl + payoffs.u_db)
    except MultipleEquilibria:
        flags.append("multiple_equilibria")

    coord = coordination_benchmark(model)
    noncoop = noncooperation_benchmark(model)
    third = third_party_benchmark(model, config.delta_3p, tol=config.tol)
    row.update(net_coord=coord.network_profit,
               net_noncoop=noncoop.network_profit,
               net_third=third.network_profit)
    if row["net_rss"] is not None:
        if noncoop.network_profit > 0.0:
            row["gain_vs_noncoop"] = row["net_rss"] / noncoop.network_profit - 1.0
        if coord.network_profit > 0.0:
            row["gap_vs_coord"] = 1.0 - row["net_rss"] / coord.network_profit
    row["flags"] = ";".join(flags)
    return row


def run_scenario_rows(config: ScenarioConfig) -> list:
    """All sweep rows, computed in parallel and sorted by the sweep value."""
    workers = int(os.environ.get("HYSIM_THREADS", "1"))
    if workers > 1 and len(config.r_l_values) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda r: run_sweep_point(config, r),
                                 config.r_l_values))
    else:
        rows = [run_sweep_point(config, r) for r in config.r_l_values]
    rows.sort(key=lambda r: r["R_L"])
    return rows


def run_scenario(config_path, out=None, fmt=None) -> int:
    """Full pipeline for a config file: solve every sweep point, write rows.

    Returns 0 when every point solved cleanly and 2 when any row carries a
    flag (the rows are still written, with empty numeric cells).  Config and
    I/O problems raise ConfigError/OSError for the caller to map to exit 1.
    """
    config = load_config(config_path)
    rows = run_scenario_rows(config)
    path = out or config.output_path
    if path:
        write_rows(rows, path, fmt or config.output_format)
    return 2 if any(r["flags"] for r in rows) else 0


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return f"{value:.9g}"


def write_rows(rows, path, fmt="csv"):
    path = Path(path)
    if fmt == "json":
        path.write_text(json.dumps(
            [{k: r[k] for k in SWEEP_COLUMNS} for r in rows], indent=2) + "\n")
        return
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([format_cell(row[c]) for c in SWEEP_COLUMNS])
