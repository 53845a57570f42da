"""A distribution that only makes sense after renormalisation.

Formally ``M(phi) = c1 * int phi(x)/|x| dx - c2 * phi(0)`` on the line.
The regularised version replaces ``1/|x|`` on ``|x| < eps`` by
``eta(x/eps)/eps`` for a continuous ``eta`` on ``[-1, 1]`` with
``eta(+-1) = 1``; choosing the bare coupling

    c2 = hat_c1 * (int eta - 2 log eps) + hat_c2

makes the result converge to a limit that does not depend on ``eta``.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate

ETA_PROFILES = {
    "flat": lambda y: np.ones_like(np.asarray(y, dtype=float)),
    "quadratic": lambda y: np.asarray(y, dtype=float) ** 2,
    "tent": lambda y: 2.0 - np.abs(y),
    "skew": lambda y: 1.0 + (1.0 - np.asarray(y, dtype=float) ** 2) * (1.0 + np.asarray(y, dtype=float)),
}


class QuadratureError(RuntimeError):
    pass


def _quad(f, a, b, **kw) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=400, **kw)
        except integrate.IntegrationWarning as e:
            raise QuadratureError(f"quadrature on [{a}, {b}] did not converge: {e}") from None
    return val


def resolve_eta(eta):
    if callable(eta):
        return eta
    try:
        return ETA_PROFILES[eta]
    except KeyError:
        raise ValueError(f"unknown eta profile {eta!r}; choose from {sorted(ETA_PROFILES)}") from None


def eta_integral(eta) -> float:
    f = resolve_eta(eta)
    for y in (-1.0, 1.0):
        if abs(float(f(y)) - 1.0) > 1e-12:
            raise ValueError("eta must equal 1 at -1 and 1")
    return _quad(lambda y: float(f(y)), -1.0, 1.0)


def bare_coupling(hat_c, eps: float, eta) -> tuple:
    """``(c1, c2)`` for the regularised family."""
    c1h, c2h = hat_c
    return c1h, c1h * (eta_integral(eta) - 2.0 * math.log(eps)) + c2h


def _tail(phi) -> float:
    """``int_{|x| >= 1} phi(x)/|x| dx``."""
    return _quad(lambda x: (phi(x) + phi(-x)) / x, 1.0, np.inf)


def toy_distribution(eta, eps: float, hat_c, phi) -> float:
    """``M_eps(phi)`` with the bare couplings, computed from its definition."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    f = resolve_eta(eta)
    c1, c2 = bare_coupling(hat_c, eps, f)
    # |x| < eps: eta(x/eps)/eps, substitute x = eps*y
    inner = _quad(lambda y: float(f(y)) * phi(eps * y), -1.0, 1.0)
    # eps <= |x| < 1: substitute x = exp(s) to remove the 1/x peak
    middle = _quad(lambda s: phi(math.exp(s)) + phi(-math.exp(s)), math.log(eps), 0.0)
    regular = inner + middle + _tail(phi)
    return c1 * regular - c2 * phi(0.0)


def toy_limit(hat_c, phi) -> float:
    """``hat_c1 * int (phi(x) - 1_{|x|<1} phi(0)) / |x| dx - hat_c2 * phi(0)``."""
    c1h, c2h = hat_c
    p0 = phi(0.0)

    def near(x):
        if x == 0:
            return 0.0
        return (phi(x) + phi(-x) - 2 * p0) / x

    return c1h * (_quad(near, 0.0, 1.0) + _tail(phi)) - c2h * p0


def convergence_table(eta, eps_list, hat_c, phi) -> list:
    """``[(eps, M_eps, |M_eps - limit|)]``."""
    lim = toy_limit(hat_c, phi)
    out = []
    for eps in eps_list:
        m = toy_distribution(eta, eps, hat_c, phi)
        out.append((eps, m, abs(m - lim)))
    return out


def observed_rate(table) -> float:
    """Least-squares slope of ``log error`` against ``log eps``."""
    e = np.array([r[0] for r in table])
    err = np.array([r[2] for r in table])
    return float(np.polyfit(np.log(e), np.log(err), 1)[0])
