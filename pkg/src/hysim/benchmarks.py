"""Reference outcomes to compare the revenue-share bargain against.

Three schemes: full coordination (both sellers act as one profit maximizer),
non-cooperation (information market only, the licensee is shut out), and a
third-party platform that takes a cut of leasing revenue without passing it
to the database.  The third-party scheme keeps the competitive price
structure and simply removes the database's share motive.  Network profit is
always the licensee + database aggregate; the platform's cut is excluded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._search import golden_max
from .bargaining import pure_info_optimum
from .externality import ExternalityModel
from .market import MarketShares, PriceVector, clamp_shares
from .pricing import prices_from_shares, solve_mscg

COORD_GRID_N = 200


@dataclass(frozen=True)
class BenchmarkResult:
    name: str
    shares: MarketShares
    prices: PriceVector
    network_profit: float
    u_sl: float
    u_db: float
    third_party_cut: float = 0.0


def _aggregate(model, eta_l, eta_a):
    g_a = model.g(eta_a)
    p_l = ((1.0 - eta_l) * (model.R_L - model.f(1.0 - eta_l) - g_a)
           + (1.0 - eta_l - eta_a) * g_a)
    p_a = (1.0 - eta_l - eta_a) * g_a
    return p_l * eta_l + p_a * eta_a


def coordination_benchmark(model: ExternalityModel,
                           tol: float = 1e-9) -> BenchmarkResult:
    """Aggregate-profit maximum over the share simplex.

    Dense grid scan followed by alternating coordinate golden refinement;
    the split between u_sl and u_db is informational only.
    """
    pts = np.linspace(0.0, 1.0, COORD_GRID_N)
    L, A = np.meshgrid(pts, pts, indexing="ij")
    feasible = L + A <= 1.0
    vals = np.where(feasible, _aggregate(model, L, A), -np.inf)
    idx = np.unravel_index(int(np.argmax(vals)), vals.shape)
    eta_l, eta_a = float(L[idx]), float(A[idx])
    best = float(vals[idx])

    step = 1.0 / (COORD_GRID_N - 1)
    for _ in range(40):
        new_l, v_l = golden_max(
            lambda x: float(_aggregate(model, x, eta_a)),
            max(eta_l - step, 0.0), min(eta_l + step, 1.0 - eta_a), tol=tol)
        if v_l > best:
            eta_l, best = new_l, v_l
        new_a, v_a = golden_max(
            lambda y: float(_aggregate(model, eta_l, y)),
            max(eta_a - step, 0.0), min(eta_a + step, 1.0 - eta_l), tol=tol)
        if v_a > best:
            eta_a, best = new_a, v_a
        else:
            if v_l <= best:
                break
    shares = clamp_shares(eta_l, eta_a)
    prices = prices_from_shares(model, shares)
    u_sl = prices.p_l * shares.eta_l
    u_db = prices.p_a * shares.eta_a
    return BenchmarkResult(name="coordination", shares=shares, prices=prices,
                           network_profit=u_sl + u_db, u_sl=u_sl, u_db=u_db)


def noncooperation_benchmark(model: ExternalityModel,
                             tol: float = 1e-10) -> BenchmarkResult:
    """Information market only: the database's monopoly profit, licensee zero."""
    eta_a, p_a, value = pure_info_optimum(model, tol)
    return BenchmarkResult(name="noncooperation",
                           shares=clamp_shares(0.0, eta_a),
                           prices=PriceVector(0.0, p_a),
                           network_profit=value, u_sl=0.0, u_db=value)


def third_party_benchmark(model: ExternalityModel, delta_3p: float,
                          tol: float = 1e-8) -> BenchmarkResult:
    """Price competition with the platform cut leaving the network.

    The licensee keeps (1 - delta_3p) of leasing revenue and the database
    earns information revenue only; both best responses coincide with the
    zero-share game, so the equilibrium shares are delta_3p-free.
    """
    if not (0.0 <= delta_3p < 1.0):
        raise ValueError("delta_3p must lie in [0, 1)")
    eq = solve_mscg(model, 0.0, tol=tol)
    gross_lease = eq.prices.p_l * eq.shares.eta_l
    u_sl = gross_lease * (1.0 - delta_3p)
    u_db = eq.prices.p_a * eq.shares.eta_a
    return BenchmarkResult(name="third_party", shares=eq.shares,
                           prices=eq.prices, network_profit=u_sl + u_db,
                           u_sl=u_sl, u_db=u_db,
                           third_party_cut=gross_lease * delta_3p)
