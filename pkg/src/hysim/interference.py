"""Monte Carlo derivation of the externality functions from interference.

The congestion function comes from the expected rate of a user picking a
random white-space channel; the information-value function from the rate
gain of picking the channel whose database-known interference component is
smallest.  The database knows the TV-station term and the cross interference
of advanced subscribers; outside interference and basic users' cross terms
stay unknown.  More subscribers means more known terms, a better minimum,
and hence a positive information externality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from sklearn.isotonic import IsotonicRegression

from .errors import DistributionError, GridError, ParameterError
from .externality import ExternalityModel, make_table_model
from .market import MarketShares

BATCH_SIZE = 1 << 16
Z95 = 1.959963984540054


@dataclass(frozen=True)
class DistSpec:
    """Nonnegative interference distribution: point, uniform, exponential,
    or lognormal."""

    kind: str
    params: tuple

    def __post_init__(self):
        k, p = self.kind, self.params
        if k == "point":
            if len(p) != 1 or p[0] < 0.0:
                raise DistributionError(f"point mass needs one nonnegative value, got {p}")
        elif k == "uniform":
            if len(p) != 2 or p[0] < 0.0 or p[1] < p[0]:
                raise DistributionError(f"uniform needs 0 <= a <= b, got {p}")
        elif k == "exponential":
            if len(p) != 1 or p[0] < 0.0:
                raise DistributionError(f"exponential needs a nonnegative mean, got {p}")
        elif k == "lognormal":
            if len(p) != 2 or p[1] < 0.0:
                raise DistributionError(f"lognormal needs (mu, sigma >= 0), got {p}")
        else:
            raise DistributionError(f"unknown distribution kind {k!r}")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        k, p = self.kind, self.params
        if k == "point":
            return np.full(size, p[0], dtype=float)
        if k == "uniform":
            return rng.uniform(p[0], p[1], size)
        if k == "exponential":
            if p[0] == 0.0:
                return np.zeros(size)
            return rng.exponential(p[0], size)
        return rng.lognormal(p[0], p[1], size)

    @property
    def deterministic(self) -> bool:
        return self.kind == "point" or (
            self.kind == "uniform" and self.params[0] == self.params[1]) or (
            self.kind == "exponential" and self.params[0] == 0.0) or (
            self.kind == "lognormal" and self.params[1] == 0.0)


def point(value): return DistSpec("point", (float(value),))
def uniform(a, b): return DistSpec("uniform", (float(a), float(b)))
def exponential(mean): return DistSpec("exponential", (float(mean),))
def lognormal(mu, sigma): return DistSpec("lognormal", (float(mu), float(sigma)))


@dataclass(frozen=True)
class InterferenceModel:
    N: int                      # unlicensed users
    K: int                      # white-space channels
    dist_L: DistSpec            # TV-station term per channel (database-known)
    dist_W: DistSpec            # per-user cross interference
    dist_I: DistSpec            # outside interference (never known)
    power: float                # transmit power in the rate function
    noise: float                # noise floor
    utility: str = "log"        # "log" -> ln(1+r); "power" -> r**rho
    rho: float = 1.0
    samples: int = 100_000
    seed: int = 0
    count_mode: str = "deterministic"   # or "poisson": per-batch random counts

    def __post_init__(self):
        if self.count_mode not in ("deterministic", "poisson"):
            raise ValueError(f"unknown count_mode {self.count_mode!r}")
        if not (self.N >= self.K >= 1):
            raise ValueError(f"need N >= K >= 1, got N={self.N}, K={self.K}")
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if self.power <= 0.0 or self.noise < 0.0:
            raise ValueError("power must be positive and noise nonnegative")
        if self.utility == "power":
            if not (0.0 < self.rho <= 1.0):
                raise ValueError("rho must lie in (0, 1]")
        elif self.utility != "log":
            raise ValueError(f"unknown utility {self.utility!r}")

    def rate(self, z):
        return np.log2(1.0 + self.power / (z + self.noise))

    def util(self, r):
        if self.utility == "log":
            return np.log1p(r)
        return np.power(r, self.rho)


@dataclass(frozen=True)
class InfoValueEstimate:
    s_b: float
    ci_b: float
    s_a: float
    ci_a: float
    mean_rate_b: float
    mean_rate_a: float
    samples: int

    @property
    def g_est(self) -> float:
        return self.s_a - self.s_b

    @property
    def ci_joint(self) -> float:
        return self.ci_a + self.ci_b


def _per_channel_counts(total: float, K: int) -> np.ndarray:
    """Deterministic split of `total` users over K channels: floor everywhere,
    remainder assigned round-robin from channel 0."""
    n = int(round(total))
    base = n // K
    counts = np.full(K, base, dtype=int)
    counts[: n - base * K] += 1
    return counts


def _utility_ci(imodel, mean_rate, rate_half_width):
    """Map a rate-mean confidence half-width through the concave utility."""
    lo = imodel.util(max(mean_rate - rate_half_width, 0.0))
    hi = imodel.util(mean_rate + rate_half_width)
    mid = imodel.util(mean_rate)
    return float(max(hi - mid, mid - lo))


def simulate_info_value(imodel: InterferenceModel,
                        shares: MarketShares) -> InfoValueEstimate:
    """Monte Carlo estimate of the basic and advanced service utilities.

    Per sample: draw the per-channel known component (TV term plus advanced
    subscribers' cross terms) and unknown component (outside term plus basic
    users' cross terms); the basic user rates a uniformly chosen channel, the
    advanced user the channel with the smallest known component.  Sample
    batches use seeds derived from (seed, batch index), so repeated runs with
    the same seed reproduce the estimate bit for bit.
    """
    K = imodel.K

    sum_b = sumsq_b = 0.0
    sum_a = sumsq_a = 0.0
    done = 0
    batch_idx = 0
    while done < imodel.samples:
        S = min(BATCH_SIZE, imodel.samples - done)
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=imodel.seed, spawn_key=(batch_idx,)))
        if imodel.count_mode == "poisson":
            n_adv = rng.poisson(imodel.N * shares.eta_a / K, K)
            n_bas = rng.poisson(imodel.N * shares.eta_b / K, K)
        else:
            n_adv = _per_channel_counts(imodel.N * shares.eta_a, K)
            n_bas = _per_channel_counts(imodel.N * shares.eta_b, K)
        tot_adv = int(n_adv.sum())
        tot_bas = int(n_bas.sum())
        adv_bounds = np.concatenate(([0], np.cumsum(n_adv)))
        bas_bounds = np.concatenate(([0], np.cumsum(n_bas)))
        X = imodel.dist_L.sample(rng, (S, K))
        if tot_adv:
            W = imodel.dist_W.sample(rng, (S, tot_adv))
            for k in range(K):
                lo, hi = adv_bounds[k], adv_bounds[k + 1]
                if hi > lo:
                    X[:, k] += W[:, lo:hi].sum(axis=1)
        Y = imodel.dist_I.sample(rng, (S, K))
        if tot_bas:
            W = imodel.dist_W.sample(rng, (S, tot_bas))
            for k in range(K):
                lo, hi = bas_bounds[k], bas_bounds[k + 1]
                if hi > lo:
                    Y[:, k] += W[:, lo:hi].sum(axis=1)
        rows = np.arange(S)
        j_rand = rng.integers(0, K, S)
        z_b = X[rows, j_rand] + Y[rows, j_rand]
        j_min = np.argmin(X, axis=1)
        z_a = X[rows, j_min] + Y[rows, j_min]
        r_b = imodel.rate(z_b)
        r_a = imodel.rate(z_a)
        sum_b += float(r_b.sum()); sumsq_b += float((r_b * r_b).sum())
        sum_a += float(r_a.sum()); sumsq_a += float((r_a * r_a).sum())
        done += S
        batch_idx += 1

    n = imodel.samples
    mean_b = sum_b / n
    mean_a = sum_a / n
    var_b = max(sumsq_b / n - mean_b**2, 0.0)
    var_a = max(sumsq_a / n - mean_a**2, 0.0)
    hw_b = Z95 * math.sqrt(var_b / n)
    hw_a = Z95 * math.sqrt(var_a / n)
    return InfoValueEstimate(
        s_b=float(imodel.util(mean_b)), ci_b=_utility_ci(imodel, mean_b, hw_b),
        s_a=float(imodel.util(mean_a)), ci_a=_utility_ci(imodel, mean_a, hw_a),
        mean_rate_b=mean_b, mean_rate_a=mean_a, samples=n)


@dataclass(frozen=True)
class DerivedTables:
    model: ExternalityModel
    x_grid: np.ndarray
    f_raw: np.ndarray
    f_smooth: np.ndarray
    f_ci: np.ndarray
    y_grid: np.ndarray
    g_raw: np.ndarray
    g_smooth: np.ndarray
    g_ci: np.ndarray
    separability_residual: Optional[float]
    seed: int
    samples: int


def derive_externality(imodel: InterferenceModel, x_grid, y_grid,
                       ref_eta_l: float = 0.0, R_L: float = 10.0,
                       measure_separability: bool = False) -> DerivedTables:
    """Tabulate the congestion and information-value curves by Monte Carlo.

    The congestion value at white-space share x uses the basic-service
    estimate at eta_l = 1 - x; the information value at advanced share y is
    the advanced-minus-basic gap at the reference leasing share.  Raw tables
    are smoothed by isotonic regression (decreasing for congestion,
    increasing for information value) before the table model is built; the
    curvature tolerance scales with the Monte Carlo confidence widths.
    """
    x_grid = np.asarray(x_grid, dtype=float)
    y_grid = np.asarray(y_grid, dtype=float)
    if np.any(y_grid > 1.0 - ref_eta_l + 1e-12):
        raise GridError(f"y_grid exceeds the feasible range [0, {1.0 - ref_eta_l}]")

    f_raw = np.empty_like(x_grid)
    f_ci = np.empty_like(x_grid)
    for i, x in enumerate(x_grid):
        est = simulate_info_value(imodel, MarketShares(1.0 - x, 0.0))
        f_raw[i] = est.s_b
        f_ci[i] = est.ci_b

    g_raw = np.empty_like(y_grid)
    g_ci = np.empty_like(y_grid)
    for j, y in enumerate(y_grid):
        est = simulate_info_value(imodel, MarketShares(ref_eta_l, y))
        g_raw[j] = est.g_est
        g_ci[j] = est.ci_joint

    f_smooth = IsotonicRegression(increasing=False).fit_transform(x_grid, f_raw)
    f_smooth = np.maximum(f_smooth, 0.0)
    g_smooth = IsotonicRegression(increasing=True).fit_transform(y_grid, g_raw)
    g_smooth = np.maximum(g_smooth, 0.0)

    max_s_a = float(np.max(f_smooth) + np.max(g_smooth))
    if R_L <= max_s_a:
        raise ParameterError(f"R_L={R_L} must exceed the tabulated maximum "
                             f"f+g = {max_s_a}")

    # extend the information table flat to eta_a = 1 when the reference
    # leasing share truncates the feasible range
    y_tab, g_tab = y_grid, g_smooth
    if y_tab[-1] < 1.0 - 1e-12:
        y_tab = np.append(y_tab, 1.0)
        g_tab = np.append(g_tab, g_tab[-1])

    ci_tol = max(1e-6, 2.0 * float(np.max(f_ci) + np.max(g_ci)))
    model = make_table_model(x_grid, f_smooth, y_tab, g_tab, R_L, tol=ci_tol)
    # carry the family tag through so downstream tolerance defaults apply
    model = ExternalityModel(f=model.f, g=model.g, R_L=model.R_L,
                             family="montecarlo", params=model.params)

    residual = None
    if measure_separability:
        worst = 0.0
        probe = np.linspace(0.0, 1.0, 5)
        for el in probe:
            for ea in probe:
                if el + ea > 1.0:
                    continue
                est = simulate_info_value(imodel, MarketShares(el, ea))
                approx = float(model.f(1.0 - el)) + float(model.g(ea))
                worst = max(worst, abs(est.s_a - approx))
        residual = worst

    return DerivedTables(model=model, x_grid=x_grid, f_raw=f_raw,
                         f_smooth=f_smooth, f_ci=f_ci, y_grid=y_grid,
                         g_raw=g_raw, g_smooth=g_smooth, g_ci=g_ci,
                         separability_residual=residual,
                         seed=imodel.seed, samples=imodel.samples)
