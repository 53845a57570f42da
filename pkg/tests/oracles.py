"""Independent reference values for the numerical tests."""

import math

import numpy as np
from scipy import integrate


def theta(s, L=1.0, terms=200):
    """``sum_n exp(-s (2 pi n / L)^2)``, switching to the dual sum for small ``s``."""
    if s * (2 * math.pi / L) ** 2 > 1.0:
        n = np.arange(-terms, terms + 1)
        return float(np.sum(np.exp(-s * (2 * math.pi * n / L) ** 2)))
    m = np.arange(-terms, terms + 1)
    return float(L / math.sqrt(4 * math.pi * s) * np.sum(np.exp(-((m * L) ** 2) / (4 * s))))


def wick_constant_theta(eps, L=1.0):
    """Infinite-lattice ``L^-2 sum_k exp(-eps^2 |k|^2) / (2 (1 + |k|^2))`` in d = 2.

    Uses ``1 / (2 lam) = int_0^inf exp(-t lam) dt / 2`` and factorises the
    two-dimensional sum into a squared theta function.
    """

    def f(u):
        t = math.exp(u)
        return t * math.exp(-t) * theta(t + eps * eps, L) ** 2

    val, _ = integrate.quad(f, -60.0, math.log(60.0), limit=400, epsabs=0, epsrel=1e-11)
    return 0.5 * val / L ** 2


def log_slope(eps_list, values):
    x = np.log(1.0 / np.asarray(eps_list))
    return float(np.polyfit(x, np.asarray(values), 1)[0])


def wick_square_variance(G, phi, cell_volume):
    """``2 sum_{x,y} phi(x) phi(y) G(x - y)^2`` on a periodic grid."""
    axes = tuple(range(phi.ndim))
    G2 = np.fft.rfftn(G ** 2, axes=axes)
    conv = np.fft.irfftn(np.fft.rfftn(phi, axes=axes) * G2, s=phi.shape, axes=axes)
    return float(2 * np.sum(phi * conv) * cell_volume ** 2)
