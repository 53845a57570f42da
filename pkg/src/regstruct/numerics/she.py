"""Stochastic heat equation on the torus, one exact OU update per Fourier mode."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .grid import MollifierSpec, TorusGrid


def make_rng(seed: int, replica: int = 0) -> np.random.Generator:
    """Counter-based generator; each replica index gets its own stream."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(replica)])))


@dataclass
class FieldSample:
    values: np.ndarray
    time: float
    eps: float
    seed: int


@dataclass
class Trajectory:
    times: np.ndarray
    fields: np.ndarray  # (n_saved, *grid.shape)
    grid: TorusGrid
    eps: float
    meta: dict = field(default_factory=dict)

    def samples(self) -> list:
        return [FieldSample(f, float(t), self.eps, self.grid.seed) for t, f in zip(self.times, self.fields)]

    def pairing(self, test_fn: np.ndarray) -> np.ndarray:
        """``<field(t), test_fn>`` for each saved time."""
        axes = tuple(range(1, self.fields.ndim))
        return np.sum(self.fields * test_fn, axis=axes) * self.grid.cell_volume

    def time_average_pairing(self, test_fn: np.ndarray, skip_initial: bool = True) -> float:
        p = self.pairing(test_fn)
        if skip_initial and len(p) > 1:
            p = p[1:]
        return float(np.mean(p))


def decay_rates(grid: TorusGrid, massive: bool = True) -> np.ndarray:
    """``1 + |k|^2`` (massive) or ``|k|^2``."""
    k2 = grid.k2()
    return 1.0 + k2 if massive else k2


class NoiseSource:
    """White-noise increments over one time step, in Fourier space.

    Each cell receives ``N(0, dt / cell_volume)``; the sequence depends only
    on ``(seed, replica)`` so different mollifiers see the same noise.
    """

    def __init__(self, grid: TorusGrid, replica: int = 0, batch: tuple = ()):
        self.grid = grid
        self.rng = make_rng(grid.seed, replica)
        self.batch = tuple(batch)
        self.scale = np.sqrt(grid.dt / grid.cell_volume)

    def draw(self) -> np.ndarray:
        w = self.rng.standard_normal(self.batch + self.grid.shape) * self.scale
        axes = tuple(range(-self.grid.d, 0))
        return np.fft.rfftn(w, axes=axes)


class SheStepper:
    """Exact in-distribution update of every mode of ``dX = -lambda X dt + rho dW``."""

    def __init__(self, grid: TorusGrid, moll: MollifierSpec, massive: bool = True, noise_scale: float = 1.0):
        self.grid = grid
        self.moll = moll
        lam = decay_rates(grid, massive)
        self.pinned = lam <= 0
        lam_safe = np.where(self.pinned, 1.0, lam)
        dt = grid.dt
        self.decay = np.where(self.pinned, 0.0, np.exp(-lam_safe * dt))
        gain = np.sqrt(-np.expm1(-2 * lam_safe * dt) / (2 * lam_safe * dt))
        rho = moll.multiplier(grid)
        self.rho = rho
        self.kick = np.where(self.pinned, 0.0, gain * rho * noise_scale)
        self.stationary = np.where(self.pinned, 0.0, rho * noise_scale / np.sqrt(2 * lam_safe * dt))
        self.lam = lam
        self.window = moll.time_window(dt)
        self._buf: deque = deque(maxlen=self.window)

    def noise(self, src: NoiseSource) -> np.ndarray:
        w = src.draw()
        if self.window == 1:
            return w
        self._buf.append(w)
        return sum(self._buf) / len(self._buf)

    def initial(self, src: NoiseSource) -> np.ndarray:
        return self.stationary * src.draw()

    def step(self, xh: np.ndarray, w: np.ndarray) -> np.ndarray:
        return self.decay * xh + self.kick * w

    def to_field(self, xh: np.ndarray) -> np.ndarray:
        axes = tuple(range(-self.grid.d, 0))
        return np.fft.irfftn(xh, s=self.grid.shape, axes=axes)


def mode_coefficients(xh: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """Coefficients in the orthonormal basis ``exp(ikx) / L^(d/2)``."""
    return xh * grid.cell_volume / grid.L ** (grid.d / 2)


def solve_she(
    grid: TorusGrid,
    moll: MollifierSpec,
    massive: bool = True,
    noise_scale: float = 1.0,
    init: str = "stationary",
    save_every: int = 1,
    replica: int = 0,
) -> Trajectory:
    st = SheStepper(grid, moll, massive, noise_scale)
    src = NoiseSource(grid, replica)
    if init == "stationary":
        xh = st.initial(src)
    elif init == "zero":
        xh = np.zeros(grid.spectral_shape, dtype=complex)
    else:
        raise ValueError(f"unknown initial condition {init!r}")
    times, fields = [0.0], [st.to_field(xh)]
    for n in range(1, grid.n_steps + 1):
        xh = st.step(xh, st.noise(src))
        if n % save_every == 0:
            times.append(n * grid.dt)
            fields.append(st.to_field(xh))
    return Trajectory(np.array(times), np.array(fields), grid, moll.eps, {"massive": massive})


def stationary_samples(grid: TorusGrid, moll: MollifierSpec, n: int, massive: bool = True, replica: int = 0) -> np.ndarray:
    """``n`` independent draws of the stationary field, shape ``(n, *grid.shape)``."""
    st = SheStepper(grid, moll, massive)
    src = NoiseSource(grid, replica, batch=(n,))
    return st.to_field(st.initial(src))
