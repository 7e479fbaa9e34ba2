"""Spectral calculus for Laguerre-weighted differential forms on the orthant.

Submodules
----------
laguerre_core       one-dimensional polynomials, quadrature, Bessel functions and heat kernels
exterior_algebra    alternating tensors, wedge, interior product, Hodge star
fourier_laguerre    basis forms, coefficient containers, analysis and synthesis
spectral_operators  derivative, adjoint, Laplacian and spectral multipliers on coefficients
hodge_solver        Hodge decomposition and the Hodge / de Rham solvers
bellman             the Bellman function and its Hessian bounds
verify              numerical verification suites
cli                 command-line interface
"""

from .errors import *  # noqa: F401,F403
from .exterior_algebra import AlternatingTensor, hodge_star, inner, interior, wedge
from .fourier_laguerre import BasisSpec, PolynomialForm, SpectralForm, analyze, synthesize
from .hodge_solver import HodgeSplit, decompose, solve_derham, solve_hodge_system
from .laguerre_core import AxisSpec, QuadratureRule, gauss_laguerre_rule
from .spectral_operators import (
    MultiplierSpec,
    apply_delta,
    apply_delta_star,
    apply_laplacian,
    apply_multiplier,
    heat,
    inverse_power,
    poisson,
    riesz,
    riesz_star,
)
from .verify import SuiteReport, TestConfig, run_suite

__version__ = "0.1.0"
