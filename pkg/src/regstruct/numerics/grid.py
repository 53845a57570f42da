"""Periodic grids, Fourier wave numbers and mollifier multipliers."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre


@dataclass(frozen=True)
class TorusGrid:
    d: int = 2
    N: int = 64
    L: float = 1.0
    dt: float = 1e-3
    T: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError("only dimensions 1 and 2 are supported")
        if self.N < 2 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two, got {self.N}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.T >= 0:
            raise ValueError("T must be non-negative")

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.d

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def cell_volume(self) -> float:
        return self.dx ** self.d

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))

    def coords(self) -> list:
        x = np.arange(self.N) * self.dx
        return np.meshgrid(*([x] * self.d), indexing="ij")

    def axis_wavenumbers(self) -> list:
        """Per-axis wave numbers laid out for ``rfftn``."""
        full = 2 * np.pi * np.fft.fftfreq(self.N, d=self.dx)
        half = 2 * np.pi * np.fft.rfftfreq(self.N, d=self.dx)
        axes = [full] * (self.d - 1) + [half]
        out = []
        for i, k in enumerate(axes):
            shape = [1] * self.d
            shape[i] = k.size
            out.append(k.reshape(shape))
        return out

    def k2(self) -> np.ndarray:
        return sum(k ** 2 for k in self.axis_wavenumbers())

    def rfft_weights(self) -> np.ndarray:
        """How many full-spectrum modes each ``rfftn`` entry stands for (1 or 2)."""
        n_half = self.N // 2 + 1
        w = np.full(n_half, 2.0)
        w[0] = 1.0
        if self.N % 2 == 0:
            w[-1] = 1.0
        shape = [1] * (self.d - 1) + [n_half]
        return np.broadcast_to(w.reshape(shape), self.spectral_shape)

    @property
    def spectral_shape(self) -> tuple:
        return (self.N,) * (self.d - 1) + (self.N // 2 + 1,)


# --------------------------------------------------------------------------
# mollifiers


PROFILES = ("box", "bump", "gaussian")


@dataclass(frozen=True)
class MollifierSpec:
    """``rho_eps(x) = eps^-d rho(x / eps)``, described by its Fourier multiplier.

    ``box`` is the normalised indicator of ``[-1/2, 1/2]^d``, ``bump`` a
    product of smooth compactly supported bumps on ``[-1, 1]``, and
    ``gaussian`` the standard Gaussian (not truncated). With ``parabolic``
    the noise is also averaged in time over a window of length ``eps^2``.
    """

    profile: str = "gaussian"
    eps: float = 0.125
    parabolic: bool = False

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"unknown mollifier profile {self.profile!r}; choose from {PROFILES}")
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    def transform_1d(self, omega: np.ndarray) -> np.ndarray:
        """Fourier transform of the one-dimensional profile at ``omega``."""
        omega = np.asarray(omega, dtype=float)
        if self.profile == "box":
            return np.sinc(omega / (2 * np.pi))
        if self.profile == "gaussian":
            return np.exp(-0.5 * omega ** 2)
        return bump_transform(omega)

    def multiplier(self, grid: TorusGrid) -> np.ndarray:
        out = np.ones(grid.spectral_shape)
        for k in grid.axis_wavenumbers():
            out = out * self.transform_1d(self.eps * k)
        return out

    def time_window(self, dt: float) -> int:
        if not self.parabolic:
            return 1
        return max(1, int(round(self.eps ** 2 / dt)))


@lru_cache(maxsize=1)
def _bump_nodes(n: int = 2000):
    x, w = roots_legendre(n)
    rho = np.exp(-1.0 / (1.0 - x ** 2))
    mass = np.sum(w * rho)
    return x, w * rho / mass


def bump_transform(omega: np.ndarray) -> np.ndarray:
    """Transform of ``exp(-1/(1-x^2))`` on ``[-1, 1]``, normalised to 1 at 0."""
    x, wr = _bump_nodes()
    flat = np.abs(np.ravel(omega))
    uniq, inv = np.unique(flat, return_inverse=True)
    vals = np.empty(uniq.size)
    chunk = 256
    for i in range(0, uniq.size, chunk):
        vals[i : i + chunk] = np.cos(np.outer(uniq[i : i + chunk], x)) @ wr
    return vals[inv].reshape(np.shape(omega))
