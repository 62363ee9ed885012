"""Layer III: user best responses, share dynamics, and market equilibrium.

Users of type theta ~ Uniform[0, 1] pick the best of three services (basic,
advanced, leasing) given prices and the current market state.  The derived
shares follow from three price/quality threshold ratios; the market
equilibrium is the fixed point of the synchronous update map.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateModelError, MultiplicityWarning
from .externality import ExternalityModel, g_derivative

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000
DEFAULT_DAMPING = 0.5


@dataclass(frozen=True)
class MarketShares:
    """Point on the share simplex: eta_l + eta_a <= 1, both nonnegative."""

    eta_l: float
    eta_a: float

    def __post_init__(self):
        if self.eta_l < -1e-12 or self.eta_a < -1e-12 or self.eta_l + self.eta_a > 1 + 1e-9:
            raise ValueError(f"shares off the simplex: ({self.eta_l}, {self.eta_a})")

    @property
    def eta_b(self) -> float:
        return 1.0 - self.eta_l - self.eta_a

    def as_tuple(self):
        return (self.eta_l, self.eta_a)


def clamp_shares(eta_l: float, eta_a: float) -> MarketShares:
    """Project onto the simplex: clamp coordinates, then cap eta_a."""
    eta_l = min(max(eta_l, 0.0), 1.0)
    eta_a = min(max(eta_a, 0.0), 1.0 - eta_l)
    return MarketShares(eta_l, eta_a)


@dataclass(frozen=True)
class PriceVector:
    p_l: float
    p_a: float

    def __post_init__(self):
        if self.p_l < 0.0 or self.p_a < 0.0:
            raise ValueError(f"prices must be nonnegative: ({self.p_l}, {self.p_a})")


@dataclass(frozen=True)
class Thresholds:
    """Threshold user types: lease-vs-basic, advanced-vs-basic, lease-vs-advanced."""

    theta_lb: float
    theta_ab: float
    theta_la: float


@dataclass(frozen=True)
class DynamicsTrace:
    shares: tuple          # MarketShares per slot, including the start
    deltas: tuple          # (d_eta_l, d_eta_a) best-response change per slot
    converged: bool
    residual: float

    @property
    def final(self) -> MarketShares:
        return self.shares[-1]


def thresholds(model: ExternalityModel, prices: PriceVector,
               shares0: MarketShares) -> Thresholds:
    """Threshold ratios with service utilities frozen at shares0.

    When the information gain is zero at shares0, theta_ab is +inf for a
    positive information price (nobody buys worthless information) and 0 for a
    free one.
    """
    s_b = float(model.s_b(shares0.eta_l))
    g_val = float(model.g(shares0.eta_a))
    s_a = s_b + g_val
    if model.R_L <= s_a:
        raise DegenerateModelError(
            f"R_L={model.R_L} <= S_A={s_a}: leasing does not dominate")
    theta_lb = prices.p_l / (model.R_L - s_b)
    if g_val > 0.0:
        theta_ab = prices.p_a / g_val
    else:
        theta_ab = math.inf if prices.p_a > 0.0 else 0.0
    theta_la = max((prices.p_l - prices.p_a) / (model.R_L - s_a), 0.0)
    return Thresholds(theta_lb=theta_lb, theta_ab=theta_ab, theta_la=theta_la)


def derived_shares(model: ExternalityModel, prices: PriceVector,
                   shares0: MarketShares) -> MarketShares:
    """One synchronous best-response step of the whole user population.

    Ties are broken toward the cheaper service (basic over advanced over
    leasing), so a zero information gain always yields eta_a = 0.
    """
    th = thresholds(model, prices, shares0)
    eta_l = max(1.0 - max(th.theta_la, th.theta_lb), 0.0)
    if float(model.g(shares0.eta_a)) <= 0.0:
        eta_a = 0.0
    else:
        eta_a = max(min(th.theta_la, 1.0) - th.theta_ab, 0.0)
    return clamp_shares(eta_l, eta_a)


def iterate_dynamics(model: ExternalityModel, prices: PriceVector,
                     shares0: MarketShares, tol: float = 1e-9,
                     max_iter: int = 1000,
                     damping: float = DEFAULT_DAMPING) -> DynamicsTrace:
    """Damped synchronous share dynamics from shares0.

    The recorded deltas are the undamped best-response changes; convergence
    means both are below tol, i.e. the endpoint is a market equilibrium
    within tol.  damping=1 recovers the literal one-step-per-slot update.
    """
    if tol <= 0.0 or max_iter < 1:
        raise ValueError("tol must be positive and max_iter >= 1")
    if not (0.0 < damping <= 1.0):
        raise ValueError("damping must lie in (0, 1]")
    current = shares0
    trace = [current]
    deltas = []
    residual = math.inf
    converged = False
    for _ in range(max_iter):
        target = derived_shares(model, prices, current)
        d_l = target.eta_l - current.eta_l
        d_a = target.eta_a - current.eta_a
        deltas.append((d_l, d_a))
        residual = max(abs(d_l), abs(d_a))
        current = clamp_shares(current.eta_l + damping * d_l,
                               current.eta_a + damping * d_a)
        trace.append(current)
        if residual <= tol:
            converged = True
            break
    return DynamicsTrace(shares=tuple(trace), deltas=tuple(deltas),
                         converged=converged, residual=residual)


def _theta_lb_at(model, prices, eta_l):
    return prices.p_l / (model.R_L - float(model.s_b(eta_l)))


def _solve_case_a(model, prices, tol, max_iter):
    """1-D fixed point eta_l = 1 - theta_lb(eta_l); the map is monotone, so
    bisection on eta_l - 1 + theta_lb(eta_l) always brackets."""
    def phi(eta_l):
        return eta_l - 1.0 + _theta_lb_at(model, prices, eta_l)

    if phi(0.0) >= 0.0:
        return clamp_shares(0.0, 0.0)
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if phi(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return clamp_shares(0.5 * (lo + hi), 0.0)


def solve_equilibrium(model: ExternalityModel, prices: PriceVector,
                      tol: float = DEFAULT_TOL,
                      max_iter: int = DEFAULT_MAX_ITER,
                      damping: float = DEFAULT_DAMPING,
                      warn_on_nonunique: bool = False):
    """Market equilibrium at fixed prices, with the applicable case tag.

    Case A: the advanced service is priced out at the boundary and the
    equilibrium has eta_a = 0.  Case B: the interior pair of fixed-point
    equations applies.  Returns (MarketShares, case) where case is "A" or "B".

    When warn_on_nonunique is set, a failing uniqueness scan emits a
    MultiplicityWarning (the result is then the equilibrium reached from the
    (0, 0) start).
    """
    theta_lb0 = _theta_lb_at(model, prices, 0.0)
    g0 = float(model.g(0.0))
    if g0 > 0.0:
        theta_ab0 = prices.p_a / g0
    else:
        theta_ab0 = math.inf if prices.p_a > 0.0 else 0.0

    if warn_on_nonunique:
        report = check_me_uniqueness(model, grid_n=41)
        if not report.passed:
            warnings.warn("market-equilibrium uniqueness condition fails on the "
                          "share grid; reporting the equilibrium reached from (0, 0)",
                          MultiplicityWarning, stacklevel=2)

    if theta_lb0 <= theta_ab0:
        shares = _solve_case_a(model, prices, tol, max_iter)
        case = "A"
    else:
        trace = iterate_dynamics(model, prices, MarketShares(0.0, 0.0),
                                 tol=tol, max_iter=max_iter, damping=damping)
        shares = trace.final
        case = "B" if shares.eta_a > 0.0 else "A"
        if not trace.converged:
            # fall back to the 1-D equation if the pair map stalled at eta_a=0
            if shares.eta_a <= tol:
                shares = _solve_case_a(model, prices, tol, max_iter)
                case = "A"
    return shares, case


def equilibrium_residual(model, prices, shares) -> float:
    """Max-coordinate distance between shares and their derived image."""
    image = derived_shares(model, prices, shares)
    return max(abs(image.eta_l - shares.eta_l), abs(image.eta_a - shares.eta_a))


@dataclass(frozen=True)
class UniquenessReport:
    """Grid scan of the information-gain growth condition.

    passed uses the conservative for-all reading; exists_pass reports whether
    any feasible grid point satisfies the inequality (the literal quantifier).
    """

    passed: bool
    exists_pass: bool
    worst_lhs: float
    worst_location: tuple
    excluded_points: int
    grid_n: int


def check_me_uniqueness(model: ExternalityModel, grid_n: int = 101) -> UniquenessReport:
    """Scan (g'/g) * (R_L - S_B)/(R_L - S_A) <= 1 over the feasible grid.

    Points with g = 0 are excluded from the scan and counted.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    eta_l = np.linspace(0.0, 1.0, grid_n)
    eta_a = np.linspace(0.0, 1.0, grid_n)
    L, A = np.meshgrid(eta_l, eta_a, indexing="ij")
    feasible = L + A <= 1.0 + 1e-12
    g_vals = np.asarray(model.g(A), dtype=float)
    s_b = np.asarray(model.s_b(L), dtype=float)
    s_a = s_b + g_vals
    positive = g_vals > 0.0
    valid = feasible & positive
    excluded = int(np.count_nonzero(feasible & ~positive))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        gp = np.asarray(g_derivative(model, A), dtype=float)
        lhs = (gp / g_vals) * (model.R_L - s_b) / (model.R_L - s_a)
    lhs = np.where(valid, lhs, np.nan)
    if not np.any(valid):
        return UniquenessReport(passed=True, exists_pass=True, worst_lhs=0.0,
                                worst_location=(0.0, 0.0),
                                excluded_points=excluded, grid_n=grid_n)
    worst = float(np.nanmax(lhs))
    idx = np.unravel_index(int(np.nanargmax(lhs)), lhs.shape)
    exists_pass = bool(np.nanmin(lhs) <= 1.0)
    return UniquenessReport(passed=worst <= 1.0, exists_pass=exists_pass,
                            worst_lhs=worst,
                            worst_location=(float(L[idx]), float(A[idx])),
                            excluded_points=excluded, grid_n=grid_n)


def pure_info_equilibrium(model: ExternalityModel, p_a: float,
                          tol: float = DEFAULT_TOL,
                          max_iter: int = DEFAULT_MAX_ITER) -> MarketShares:
    """Equilibrium of the information-only market (leasing switched off).

    eta_a is a fixed point of the clipped map eta_a -> 1 - p_a / g(eta_a);
    eta_l = 0 throughout.
    """
    if p_a < 0.0:
        raise ValueError("p_a must be nonnegative")
    eta_a = 1.0
    residual = math.inf
    for _ in range(max_iter):
        g_val = float(model.g(eta_a))
        if g_val <= 0.0:
            target = 0.0 if p_a > 0.0 else 0.0
        else:
            target = min(max(1.0 - p_a / g_val, 0.0), 1.0)
        residual = abs(target - eta_a)
        eta_a += DEFAULT_DAMPING * (target - eta_a)
        if residual <= tol:
            break
    return MarketShares(0.0, min(max(eta_a, 0.0), 1.0))


def theta_grid_oracle(model: ExternalityModel, prices: PriceVector,
                      shares0: MarketShares, n_types: int = 1_000_000) -> MarketShares:
    """Brute-force check of derived_shares: enumerate n_types user types,
    take each type's payoff argmax (ties to the cheaper service), and count.

    Intentionally independent of the threshold formulas.
    """
    s_b = float(model.s_b(shares0.eta_l))
    s_a = s_b + float(model.g(shares0.eta_a))
    theta = (np.arange(n_types) + 0.5) / n_types
    pay_b = theta * s_b
    pay_a = theta * s_a - prices.p_a
    pay_l = theta * model.R_L - prices.p_l
    # cheaper-service tie rule: basic beats advanced beats leasing on exact ties
    choose_a = pay_a > pay_b
    choose_l = (pay_l > pay_b) & (pay_l > pay_a)
    eta_l = float(np.count_nonzero(choose_l)) / n_types
    eta_a = float(np.count_nonzero(choose_a & ~choose_l)) / n_types
    return clamp_shares(eta_l, eta_a)
