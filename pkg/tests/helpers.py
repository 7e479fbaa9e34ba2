"""Finite-difference realisations of the Laguerre operators, used as oracles."""

import math

import numpy as np

from hodge_laguerre.laguerre_core import psi


def _along(g, x, i):
    def fn(t):
        y = np.array(x, dtype=float)
        y[i] = t
        return g(y)

    return fn


def fd_delta(g, i, h=1e-3):
    """``sqrt(x_i) d/dx_i`` of a scalar function of a point, central differences."""
    return lambda y: math.sqrt(y[i]) * (_along(g, y, i)(y[i] + h) - _along(g, y, i)(y[i] - h)) / (2 * h)


def fd_delta_star(g, i, alpha_i, h=1e-3):
    return lambda y: -(fd_delta(g, i, h)(y) + psi(alpha_i, y[i]) * g(y))


def fd_scalar_operator(g, alpha, I, x, h=1e-3):
    """The scalar operator of component ``I`` applied to ``g`` at ``x``."""
    total = 0.0
    for i, a in enumerate(alpha):
        if (i + 1) in I:
            op = fd_delta(fd_delta_star(g, i, a, h), i, h)
        else:
            op = fd_delta_star(fd_delta(g, i, h), i, a, h)
        total += op(np.asarray(x, dtype=float))
    return total
