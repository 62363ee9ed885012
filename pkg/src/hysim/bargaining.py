"""Layer I: the revenue-share bargain between licensee and database.

The bargaining variable is the revenue share delta in [0, 1]; each candidate
delta is scored by the Nash product of the two sellers' gains over their
disagreement payoffs, evaluated at the Layer-II equilibrium that delta
induces.  The disagreement outcome is the information-only market: the
licensee earns nothing and the database earns its monopoly information
profit.

The standard Nash product pairs each player's payoff with its own
disagreement point (the default); a cross-paired variant that swaps the
disagreement points is available behind `pairing="as_printed"`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._search import golden_max
from .errors import MultipleEquilibria
from .externality import ExternalityModel
from .market import MarketShares
from .pricing import (NashEquilibrium, PayoffPair, payoffs_mscg,
                      pcg_equilibrium, prices_from_shares)

DEFAULT_GRID_N = 101
DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class BargainingOutcome:
    delta_star: float
    payoffs: PayoffPair
    disagreement: PayoffPair
    nash_product: float
    w_equiv: float
    revenue_transfer: float
    feasible: bool
    equilibrium: NashEquilibrium


def pure_info_optimum(model: ExternalityModel, tol: float = 1e-10):
    """Database's optimal share, price, and profit with leasing switched off.

    The one-dimensional inverse price map gives p_a = (1 - eta_a) * g(eta_a),
    so the profit to maximize is (1 - eta_a) * g(eta_a) * eta_a.
    """
    grid = np.linspace(0.0, 1.0, 2049)
    vals = (1.0 - grid) * np.asarray(model.g(grid), dtype=float) * grid
    best = int(np.argmax(vals))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, grid.size - 1)]

    def profit(eta_a):
        return (1.0 - eta_a) * float(model.g(eta_a)) * eta_a

    eta_a, value = golden_max(profit, lo, hi, tol=tol)
    if value < vals[best]:
        eta_a, value = float(grid[best]), float(vals[best])
    p_a = (1.0 - eta_a) * float(model.g(eta_a))
    return eta_a, p_a, value


def disagreement_points(model: ExternalityModel, tol: float = 1e-10) -> PayoffPair:
    """(0, information-monopoly profit): payoffs if no agreement is reached."""
    _, _, value = pure_info_optimum(model, tol)
    return PayoffPair(u_sl=0.0, u_db=value)


def _equilibrium_at(model, delta, tol):
    """Layer-II equilibrium, falling back to the lower bracket on multiplicity."""
    try:
        return pcg_equilibrium(model, delta, tol=tol), False
    except MultipleEquilibria as exc:
        shares = exc.lower
        eq = NashEquilibrium(
            shares=shares,
            prices=prices_from_shares(model, shares),
            payoffs=payoffs_mscg(model, shares, delta),
            lower_iterate=exc.lower, upper_iterate=exc.upper,
            bracket_gap=float("nan"), iterations=0)
        return eq, True


def nash_objective(model: ExternalityModel, delta: float,
                   tol: float = 1e-8, pairing: str = "own",
                   disagreement: Optional[PayoffPair] = None) -> float:
    """Nash product at the equilibrium induced by delta.

    Negative values signal a violated participation constraint; callers treat
    them as infeasible rather than erroring.
    """
    if disagreement is None:
        disagreement = disagreement_points(model)
    eq, _ = _equilibrium_at(model, delta, tol)
    u_sl, u_db = eq.payoffs.u_sl, eq.payoffs.u_db
    if pairing == "own":
        return (u_db - disagreement.u_db) * (u_sl - disagreement.u_sl)
    if pairing == "as_printed":
        return (u_db - disagreement.u_sl) * (u_sl - disagreement.u_db)
    raise ValueError(f"unknown pairing {pairing!r}")


def _feasible(payoffs, disagreement, pairing, tol):
    if pairing == "own":
        return (payoffs.u_db >= disagreement.u_db - tol
                and payoffs.u_sl >= disagreement.u_sl - tol)
    return (payoffs.u_db >= disagreement.u_sl - tol
            and payoffs.u_sl >= disagreement.u_db - tol)


def solve_bargaining(model: ExternalityModel, grid_n: int = DEFAULT_GRID_N,
                     tol: float = DEFAULT_TOL, pairing: str = "own",
                     eq_tol: float = 1e-8) -> BargainingOutcome:
    """Grid-plus-golden search for the best revenue share.

    Every objective evaluation nests a full Layer-II equilibrium solve, so
    the grid is modest and the refinement local.  If no delta satisfies both
    participation constraints, the unconstrained argmax is reported with
    feasible=False.
    """
    if grid_n < 11:
        raise ValueError("grid_n must be at least 11")
    disagreement = disagreement_points(model)
    # delta = 1 wipes out the licensee; the Layer-II solver needs delta < 1
    deltas = np.linspace(0.0, 1.0 - 1e-9, grid_n)
    values = np.array([nash_objective(model, d, eq_tol, pairing, disagreement)
                       for d in deltas])
    best = int(np.argmax(values))
    lo = deltas[max(best - 1, 0)]
    hi = deltas[min(best + 1, grid_n - 1)]
    delta_star, value = golden_max(
        lambda d: nash_objective(model, d, eq_tol, pairing, disagreement),
        lo, hi, tol=tol)
    if value < values[best]:
        delta_star, value = float(deltas[best]), float(values[best])

    eq, _ = _equilibrium_at(model, delta_star, eq_tol)
    feasible = _feasible(eq.payoffs, disagreement, pairing, tol)
    w_equiv = equivalent_wholesale_price(delta_star, eq)
    return BargainingOutcome(
        delta_star=float(delta_star), payoffs=eq.payoffs,
        disagreement=disagreement, nash_product=float(value),
        w_equiv=w_equiv,
        revenue_transfer=float(delta_star * eq.prices.p_l * eq.shares.eta_l),
        feasible=feasible, equilibrium=eq)


def equivalent_wholesale_price(delta_star: float,
                               equilibrium: NashEquilibrium) -> float:
    """Scalar summary w = delta * eta_l used to compare bargains across
    externality regimes."""
    return float(delta_star * equilibrium.shares.eta_l)
