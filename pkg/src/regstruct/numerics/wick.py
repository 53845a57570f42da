"""Wick constants, Hermite polynomials and stationary covariances."""

from __future__ import annotations

import numpy as np

from .grid import MollifierSpec, TorusGrid
from .she import decay_rates


def mode_variances(grid: TorusGrid, moll: MollifierSpec, massive: bool = True) -> np.ndarray:
    """Stationary ``E|a_k|^2 = rho_hat(eps k)^2 / (2 lambda_k)`` on the rfft layout (pinned modes 0)."""
    lam = decay_rates(grid, massive)
    rho = moll.multiplier(grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(lam > 0, rho ** 2 / (2 * np.where(lam > 0, lam, 1.0)), 0.0)
    return v


def wick_constant(grid: TorusGrid, moll: MollifierSpec, massive: bool = True) -> float:
    """``C_eps = E X_eps(x)^2`` as a deterministic sum over the grid's modes."""
    if moll.parabolic:
        raise ValueError("the closed-form constant assumes spatial mollification only")
    v = mode_variances(grid, moll, massive)
    return float(np.sum(grid.rfft_weights() * v) / grid.L ** grid.d)


def covariance_function(grid: TorusGrid, moll: MollifierSpec, massive: bool = True) -> np.ndarray:
    """Equal-time covariance ``G(x) = E X(0) X(x)`` on the grid."""
    v = mode_variances(grid, moll, massive)
    axes = tuple(range(grid.d))
    # G(x) = L^-d sum_k v_k exp(ikx); irfftn divides by N^d
    return np.fft.irfftn(v, s=grid.shape, axes=axes) * grid.N ** grid.d / grid.L ** grid.d


def wick_power(x, C, p: int):
    """Hermite polynomial with variance parameter: ``x``, ``x^2 - C``, ``x^3 - 3Cx``."""
    if p == 1:
        return x
    if p == 2:
        return x * x - C
    if p == 3:
        return x * x * x - 3 * C * x
    raise ValueError(f"Wick powers are provided for p in 1..3, got {p}")
