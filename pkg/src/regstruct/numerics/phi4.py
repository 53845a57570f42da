"""The dynamic cubic model in two dimensions via the Da Prato-Debussche split.

With ``X`` the (mollified) stochastic heat solution and ``Phi = Psi + X``,

    d/dt Psi = (Delta - 1) Psi + c (Psi + X)
               - (Psi^3 + 3 X Psi^2 + 3 X2 Psi + X3),

where ``(X2, X3)`` are ``(X^2, X^3)`` for the naive run and the Wick powers
``(X^2 - C, X^3 - 3 C X)`` for the renormalised one. ``Psi`` takes
exponential-Euler steps with the nonlinearity explicit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import MollifierSpec, TorusGrid
from .she import NoiseSource, SheStepper, Trajectory
from .wick import wick_constant, wick_power


class BlowUp(RuntimeError):
    def __init__(self, time: float, norm: float):
        super().__init__(f"solution blew up at t = {time:.6g} (sup norm {norm:.3g})")
        self.time = time
        self.norm = norm


def _phi1(z: np.ndarray) -> np.ndarray:
    """``(1 - exp(-z)) / z`` with the removable singularity filled in."""
    out = np.ones_like(z)
    nz = z != 0
    out[nz] = -np.expm1(-z[nz]) / z[nz]
    return out


def _initial_psi(grid: TorusGrid, psi0) -> np.ndarray:
    if callable(psi0):
        return np.asarray(psi0(*grid.coords()), dtype=float)
    arr = np.asarray(psi0, dtype=float)
    return np.broadcast_to(arr, grid.shape).copy()


def solve_phi4_2(
    grid: TorusGrid,
    moll: MollifierSpec,
    c: float,
    renormalised: bool = True,
    psi0=0.0,
    massive: bool = True,
    noise_scale: float = 1.0,
    save_every: int = 10,
    formulation: str = "dpd",
    guard: float = 1e6,
    replica: int = 0,
) -> Trajectory:
    """Return the trajectory of ``Phi = Psi + X``.

    ``formulation="direct"`` instead steps ``Phi`` itself with the shifted
    coupling (``c + 3C`` when renormalised, ``c`` otherwise) and the same
    noise increments; it is the same discrete dynamics written differently.
    """
    C = wick_constant(grid, moll, massive) if renormalised else 0.0
    st = SheStepper(grid, moll, massive, noise_scale)
    src = NoiseSource(grid, replica)
    lam = st.lam
    e = np.exp(-lam * grid.dt)
    h = grid.dt * _phi1(lam * grid.dt)
    xh = st.initial(src)
    X = st.to_field(xh)
    psi = _initial_psi(grid, psi0)
    axes = tuple(range(grid.d))

    if formulation == "dpd":
        state = psi
    elif formulation == "direct":
        state = psi + X
        c_eff = c + 3 * C
    else:
        raise ValueError(f"unknown formulation {formulation!r}")

    def phi_now(state, X):
        return state + X if formulation == "dpd" else state

    times = [0.0]
    fields = [phi_now(state, X)]
    for n in range(1, grid.n_steps + 1):
        if formulation == "dpd":
            X2 = wick_power(X, C, 2)
            X3 = wick_power(X, C, 3)
            nonlin = c * (state + X) - (state ** 3 + 3 * X * state ** 2 + 3 * X2 * state + X3)
            sh = np.fft.rfftn(state, axes=axes)
            nh = np.fft.rfftn(nonlin, axes=axes)
            state = np.fft.irfftn(e * sh + h * nh, s=grid.shape, axes=axes)
            w = st.noise(src)
            xh = st.step(xh, w)
            X = st.to_field(xh)
        else:
            nonlin = c_eff * state - state ** 3
            sh = np.fft.rfftn(state, axes=axes)
            nh = np.fft.rfftn(nonlin, axes=axes)
            w = st.noise(src)
            xh_new = st.step(xh, w)
            # the noise enters exactly as in the linear equation
            sh = e * sh + h * nh + (xh_new - st.decay * xh)
            xh = xh_new
            X = st.to_field(xh)
            state = np.fft.irfftn(sh, s=grid.shape, axes=axes)
        norm = float(np.max(np.abs(state)))
        if not np.isfinite(norm) or norm > guard:
            raise BlowUp(n * grid.dt, norm)
        if n % save_every == 0:
            times.append(n * grid.dt)
            fields.append(phi_now(state, X))
    meta = {"c": c, "C": C, "renormalised": renormalised, "formulation": formulation, "massive": massive}
    return Trajectory(np.array(times), np.array(fields), grid, moll.eps, meta)


def gaussian_test_function(grid: TorusGrid, width: float = 0.15, centre=None) -> np.ndarray:
    """Periodised Gaussian bump normalised to unit integral."""
    centre = [grid.L / 2] * grid.d if centre is None else list(centre)
    r2 = 0
    for x, x0 in zip(grid.coords(), centre):
        dx = (x - x0 + grid.L / 2) % grid.L - grid.L / 2
        r2 = r2 + dx ** 2
    phi = np.exp(-r2 / (2 * width ** 2))
    return phi / (np.sum(phi) * grid.cell_volume)


@dataclass
class LadderResult:
    eps: list
    wick_constants: list
    renormalised: list
    naive: list
    meta: dict = field(default_factory=dict)
    series: list = field(default_factory=list)  # (eps, kind, times, pairings)

    @staticmethod
    def _gaps(vals):
        return [abs(b - a) for a, b in zip(vals, vals[1:])]

    @property
    def renormalised_gaps(self) -> list:
        return self._gaps(self.renormalised)

    @property
    def naive_gaps(self) -> list:
        return self._gaps(self.naive)

    @property
    def gap_ratios(self) -> list:
        g = self.renormalised_gaps
        return [b / a if a > 0 else float("inf") for a, b in zip(g, g[1:])]

    def naive_monotone(self) -> bool:
        d = np.diff(self.naive)
        return bool(np.all(d < 0) or np.all(d > 0))

    def as_dict(self) -> dict:
        return {
            "eps": self.eps,
            "wick_constants": self.wick_constants,
            "renormalised_pairings": self.renormalised,
            "naive_pairings": self.naive,
            "renormalised_gaps": self.renormalised_gaps,
            "naive_gaps": self.naive_gaps,
            "gap_ratios": self.gap_ratios,
            "naive_monotone": self.naive_monotone(),
            **self.meta,
        }


def ladder_experiment(
    grid: TorusGrid,
    eps_list,
    c: float = 0.0,
    profile: str = "gaussian",
    psi0=1.0,
    test_fn=None,
    save_every: int = 10,
    replica: int = 0,
) -> LadderResult:
    """Same noise, several ``eps``: time-averaged pairings of renormalised and naive runs."""
    phi = gaussian_test_function(grid) if test_fn is None else test_fn
    consts, ren, nai, series = [], [], [], []
    for eps in eps_list:
        m = MollifierSpec(profile, eps)
        consts.append(wick_constant(grid, m))
        tr = solve_phi4_2(grid, m, c, True, psi0, save_every=save_every, replica=replica)
        ren.append(tr.time_average_pairing(phi))
        tn = solve_phi4_2(grid, m, c, False, psi0, save_every=save_every, replica=replica)
        nai.append(tn.time_average_pairing(phi))
        series.append((eps, "renormalised", tr.times, tr.pairing(phi)))
        series.append((eps, "naive", tn.times, tn.pairing(phi)))
    meta = {"c": c, "profile": profile, "N": grid.N, "T": grid.T, "dt": grid.dt, "seed": grid.seed, "replica": replica}
    return LadderResult(list(eps_list), consts, ren, nai, meta, series)
