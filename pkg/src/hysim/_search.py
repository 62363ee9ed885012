"""1-D maximization: coarse grid scan plus golden-section refinement.

The refinement never trusts unimodality blindly: if the refined point is worse
than the best grid point, the grid point wins.
"""

from __future__ import annotations

import math

import numpy as np

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, lo: float, hi: float, tol: float = 1e-8,
               max_iter: int = 200):
    """Golden-section maximization of a scalar function on [lo, hi]."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def grid_golden_max(f_vec, lo: float, hi: float, coarse_n: int = 256,
                    tol: float = 1e-8):
    """Maximize over [lo, hi]: vectorized coarse scan, golden refinement
    around the best cell, grid guard against non-unimodal slices.

    f_vec must accept a numpy array and return an array; scalars go through
    the same callable.
    """
    if hi <= lo:
        return lo, float(f_vec(np.array([lo]))[0])
    grid = np.linspace(lo, hi, coarse_n)
    vals = np.asarray(f_vec(grid), dtype=float)
    best = int(np.argmax(vals))
    a = grid[max(best - 1, 0)]
    b = grid[min(best + 1, coarse_n - 1)]

    def f_scalar(x):
        return float(f_vec(np.array([x]))[0])

    x, fx = golden_max(f_scalar, a, b, tol=tol)
    if fx < vals[best]:
        return float(grid[best]), float(vals[best])
    return float(x), float(fx)
