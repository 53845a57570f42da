"""Numerical checks: stochastic heat equation, Wick renormalisation, the 2D cubic model, the toy distribution."""

from .grid import MollifierSpec, TorusGrid
from .phi4 import BlowUp, LadderResult, ladder_experiment, solve_phi4_2
from .she import FieldSample, Trajectory, solve_she, stationary_samples
from .toy import QuadratureError, convergence_table, observed_rate, toy_distribution, toy_limit
from .wick import covariance_function, wick_constant, wick_power
