"""Network-externality models: congestion f, information value g, leasing quality R_L.

f maps the white-space share x = eta_a + eta_b = 1 - eta_l to the congestion
utility; g maps the advanced share eta_a to the information-value gain.  f must
be nonnegative, nonincreasing and convex; g nonnegative, nondecreasing and
concave.  R_L must strictly dominate f + g everywhere so that leasing is the
top-quality service.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import GridError, ParameterError, ShapeError

DEFAULT_GRID_N = 201
ANALYTIC_TOL = 1e-9
TABLE_TOL = 1e-6


@dataclass(frozen=True)
class ExternalityModel:
    """Immutable triple (f, g, R_L) plus family metadata.

    f and g accept floats or numpy arrays.  g_prime, when present, is the
    analytic derivative of g (used by the uniqueness checker); otherwise
    central differences are used.
    """

    f: Callable
    g: Callable
    R_L: float
    family: str
    params: dict = field(default_factory=dict)
    g_prime: Optional[Callable] = None

    def s_b(self, eta_l):
        """Basic-service utility at leasing share eta_l."""
        return self.f(1.0 - np.asarray(eta_l, dtype=float))

    def s_a(self, eta_l, eta_a):
        """Advanced-service utility at shares (eta_l, eta_a)."""
        return self.s_b(eta_l) + self.g(np.asarray(eta_a, dtype=float))


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst_violation: float
    location: float


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    checks: tuple
    grid_n: int
    tol: float

    def failures(self):
        return [c for c in self.checks if not c.passed]


def make_power_family(alpha1, beta1, gamma1, alpha2, beta2, gamma2, R_L):
    """Power family f(x) = alpha1 - beta1*x**gamma1, g(y) = alpha2 + (beta2-alpha2)*y**gamma2."""
    if not (0.0 < gamma1 <= 1.0) or not (0.0 < gamma2 <= 1.0):
        raise ParameterError(f"exponents must lie in (0, 1]: gamma1={gamma1}, gamma2={gamma2}")
    if alpha1 - beta1 < 0.0:
        raise ParameterError(f"f(1) = alpha1 - beta1 = {alpha1 - beta1} < 0")
    if beta1 < 0.0:
        raise ParameterError(f"beta1 = {beta1} < 0 makes f increasing")
    if not (beta2 >= alpha2 >= 0.0):
        raise ParameterError(f"need beta2 >= alpha2 >= 0, got alpha2={alpha2}, beta2={beta2}")
    if R_L <= alpha1 + beta2:
        raise ParameterError(
            f"R_L={R_L} must exceed f(0)+g(1) = {alpha1 + beta2}")

    def f(x):
        return alpha1 - beta1 * np.power(np.clip(x, 0.0, None), gamma1)

    def g(y):
        return alpha2 + (beta2 - alpha2) * np.power(np.clip(y, 0.0, None), gamma2)

    def g_prime(y):
        y = np.asarray(y, dtype=float)
        scale = (beta2 - alpha2) * gamma2
        if scale == 0.0:
            return np.zeros_like(y)
        with np.errstate(divide="ignore"):
            return scale * np.power(y, gamma2 - 1.0)

    return ExternalityModel(
        f=f, g=g, R_L=float(R_L), family="power",
        params=dict(alpha1=alpha1, beta1=beta1, gamma1=gamma1,
                    alpha2=alpha2, beta2=beta2, gamma2=gamma2),
        g_prime=g_prime)


def make_linear_family(alpha1, beta1, beta2, R_L):
    """Linear family f(x) = alpha1 - beta1*x, g(y) = beta2*y."""
    if beta1 < 0.0 or beta2 < 0.0:
        raise ParameterError(f"slopes must be nonnegative: beta1={beta1}, beta2={beta2}")
    if alpha1 < beta1:
        raise ParameterError(f"f(1) = alpha1 - beta1 = {alpha1 - beta1} < 0")
    if R_L <= alpha1 + beta2:
        raise ParameterError(f"R_L={R_L} must exceed f(0)+g(1) = {alpha1 + beta2}")

    def f(x):
        return alpha1 - beta1 * np.asarray(x, dtype=float)

    def g(y):
        return beta2 * np.asarray(y, dtype=float)

    def g_prime(y):
        return np.full_like(np.asarray(y, dtype=float), beta2)

    return ExternalityModel(
        f=f, g=g, R_L=float(R_L), family="linear",
        params=dict(alpha1=alpha1, beta1=beta1, beta2=beta2),
        g_prime=g_prime)


def make_constant_model(f_value, g_value, R_L):
    """Share-independent f and g; handy for closed-form cross checks."""
    if f_value < 0.0 or g_value < 0.0:
        raise ParameterError("constant levels must be nonnegative")
    if R_L <= f_value + g_value:
        raise ParameterError(f"R_L={R_L} must exceed f+g = {f_value + g_value}")

    def f(x):
        return np.full_like(np.asarray(x, dtype=float), f_value)

    def g(y):
        return np.full_like(np.asarray(y, dtype=float), g_value)

    def g_prime(y):
        return np.zeros_like(np.asarray(y, dtype=float))

    return ExternalityModel(
        f=f, g=g, R_L=float(R_L), family="constant",
        params=dict(f_value=f_value, g_value=g_value),
        g_prime=g_prime)


def _check_grid(grid, name):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise GridError(f"{name} must be a 1-D grid with at least two points")
    if np.any(np.diff(grid) <= 0.0):
        raise GridError(f"{name} must be strictly increasing")
    if abs(grid[0]) > 1e-12 or abs(grid[-1] - 1.0) > 1e-12:
        raise GridError(f"{name} must cover [0, 1], got [{grid[0]}, {grid[-1]}]")
    return grid


def make_table_model(x_grid, f_vals, y_grid, g_vals, R_L, tol=TABLE_TOL):
    """Piecewise-linear f and g from tabulated values; shape-checked on construction."""
    x_grid = _check_grid(x_grid, "x_grid")
    y_grid = _check_grid(y_grid, "y_grid")
    f_vals = np.asarray(f_vals, dtype=float)
    g_vals = np.asarray(g_vals, dtype=float)
    if f_vals.shape != x_grid.shape:
        raise GridError("f_vals length must match x_grid")
    if g_vals.shape != y_grid.shape:
        raise GridError("g_vals length must match y_grid")

    def f(x):
        return np.interp(np.asarray(x, dtype=float), x_grid, f_vals)

    def g(y):
        return np.interp(np.asarray(y, dtype=float), y_grid, g_vals)

    model = ExternalityModel(
        f=f, g=g, R_L=float(R_L), family="table",
        params=dict(x_grid=x_grid, f_vals=f_vals, y_grid=y_grid, g_vals=g_vals))
    report = validate_model(model, tol=tol)
    if not report.passed:
        names = ", ".join(c.name for c in report.failures())
        if any(c.name == "leasing_dominance" for c in report.failures()):
            raise ParameterError(f"R_L={R_L} does not dominate tabulated f+g")
        raise ShapeError(f"table violates shape assumptions: {names}")
    return model


def validate_model(model, grid_n=DEFAULT_GRID_N, tol=None):
    """Discrete check of the shape assumptions on a uniform grid.

    Returns a report; never raises.  Default tolerance is tight for analytic
    families and looser for tables (which may carry interpolation noise).
    """
    if grid_n < 3:
        raise ValueError("grid_n must be at least 3")
    if tol is None:
        tol = TABLE_TOL if model.family in ("table", "montecarlo") else ANALYTIC_TOL
    grid = np.linspace(0.0, 1.0, grid_n)
    fv = np.asarray(model.f(grid), dtype=float)
    gv = np.asarray(model.g(grid), dtype=float)

    checks = []

    def record(name, violations, locs):
        worst = float(np.max(violations)) if violations.size else 0.0
        idx = int(np.argmax(violations)) if violations.size else 0
        checks.append(CheckResult(name=name, passed=worst <= tol,
                                  worst_violation=worst,
                                  location=float(locs[idx]) if violations.size else 0.0))

    record("f_nonnegative", -fv, grid)
    record("g_nonnegative", -gv, grid)
    record("f_nonincreasing", np.diff(fv), grid[:-1])
    record("f_convex", -np.diff(fv, 2), grid[1:-1])
    record("g_nondecreasing", -np.diff(gv), grid[:-1])
    record("g_concave", np.diff(gv, 2), grid[1:-1])
    # R_L > f(x) + g(y) at every grid pair reduces to the max of each
    margin = model.R_L - (float(np.max(fv)) + float(np.max(gv)))
    checks.append(CheckResult(name="leasing_dominance", passed=margin > 0.0,
                              worst_violation=max(0.0, -margin),
                              location=float(grid[int(np.argmax(fv))])))

    return ValidationReport(passed=all(c.passed for c in checks),
                            checks=tuple(checks), grid_n=grid_n, tol=tol)


def g_derivative(model, y, h=1e-6):
    """g'(y): analytic when the family carries it, else central differences."""
    if model.g_prime is not None:
        return model.g_prime(y)
    y = np.asarray(y, dtype=float)
    lo = np.clip(y - h, 0.0, 1.0)
    hi = np.clip(y + h, 0.0, 1.0)
    return (model.g(hi) - model.g(lo)) / (hi - lo)
