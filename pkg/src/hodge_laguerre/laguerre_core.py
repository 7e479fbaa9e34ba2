"""One-dimensional Laguerre toolkit.

The reference measure on the half line is the probability measure

    dmu_a(x) = x**a * exp(-x) / Gamma(a + 1) dx,     a > -1.

Everything here is written against that normalisation: ``ell_k`` is the
μ_a-orthonormal Laguerre polynomial, ``e_k`` is the orthonormal factor used
for axes that carry a differential, and the quadrature weights sum to one.

The Laguerre derivative is ``delta f = sqrt(x) f'``.  With it,

    delta ell_k = sqrt(k) e_k,     e_k(x) = -sqrt(x / (a + 1)) ell_{k-1}^{a+1}(x),

and ``{e_k : k >= 1}`` is again an orthonormal basis of L^2(mu_a).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .errors import (
    InvalidDegree,
    InvalidParameter,
    NumericalFailure,
    RangeError,
    SingularInput,
)

__all__ = [
    "AxisSpec",
    "QuadratureRule",
    "eval_laguerre",
    "laguerre_l2_norm",
    "eval_normalized",
    "normalized_table",
    "eval_i_basis",
    "i_basis_table",
    "delta_i_basis_table",
    "psi",
    "delta_psi",
    "gauss_laguerre_rule",
    "bessel_i",
    "bessel_i_scaled",
    "heat_kernel_1d",
    "heat_kernel_tilde_1d",
    "heat_kernel_eigensum",
    "heat_kernel_tilde_eigensum",
]


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not np.isfinite(alpha) or alpha <= -1.0:
        raise InvalidParameter(f"type parameter must exceed -1, got {alpha}")
    return alpha


def _check_nonneg_x(x: ArrayLike) -> NDArray[np.float64]:
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise InvalidParameter("Laguerre arguments must be finite and >= 0")
    return x


def _check_positive_x(x: ArrayLike) -> NDArray[np.float64]:
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise SingularInput("argument must lie in the open half line")
    return x


@dataclass(frozen=True)
class AxisSpec:
    """Type parameter and degree cap of a single axis."""

    alpha: float
    degree_cap: int

    def __post_init__(self):
        _check_alpha(self.alpha)
        if int(self.degree_cap) != self.degree_cap or self.degree_cap < 0:
            raise InvalidDegree(f"degree cap must be a nonnegative integer, got {self.degree_cap}")


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for mu_alpha.  ``weights`` sum to one."""

    alpha: float
    nodes: NDArray[np.float64]
    weights: NDArray[np.float64]
    exact_degree: int

    @property
    def size(self) -> int:
        return len(self.nodes)

    def integrate(self, values: ArrayLike) -> NDArray[np.float64]:
        """Integrate samples taken at ``nodes`` (leading axis)."""
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))


# ---------------------------------------------------------------------------
# polynomials


def eval_laguerre(spec: AxisSpec, x: ArrayLike) -> NDArray[np.float64]:
    """Classical generalized Laguerre polynomials ``L_0 .. L_N`` at ``x``.

    Returns an array of shape ``x.shape + (N + 1,)``.
    """
    a = _check_alpha(spec.alpha)
    x = _check_nonneg_x(x)
    n = spec.degree_cap
    out = np.empty(x.shape + (n + 1,))
    out[..., 0] = 1.0
    if n >= 1:
        out[..., 1] = a + 1.0 - x
    for k in range(1, n):
        out[..., k + 1] = ((2 * k + a + 1 - x) * out[..., k] - (k + a) * out[..., k - 1]) / (k + 1)
    return out


def laguerre_l2_norm(alpha: float, k: ArrayLike) -> NDArray[np.float64] | float:
    """L^2(mu_alpha) norm of ``L_k^alpha``, via log-gamma."""
    a = _check_alpha(alpha)
    k = np.asarray(k)
    if np.any(k < 0):
        raise InvalidDegree("degree must be nonnegative")
    log_sq = gammaln(a + k + 1) - gammaln(a + 1) - gammaln(k + 1)
    out = np.exp(0.5 * log_sq)
    return float(out) if out.ndim == 0 else out


def normalized_table(alpha: float, n: int, x: ArrayLike) -> NDArray[np.float64]:
    """Orthonormal polynomials ``ell_0 .. ell_n`` at ``x``, shape ``x.shape + (n+1,)``.

    Uses the orthonormal form of the three-term recurrence so nothing overflows
    for large degree.
    """
    a = _check_alpha(alpha)
    x = _check_nonneg_x(x)
    out = np.empty(x.shape + (n + 1,))
    out[..., 0] = 1.0
    if n >= 1:
        out[..., 1] = (a + 1.0 - x) / np.sqrt(a + 1.0)
    for k in range(1, n):
        out[..., k + 1] = (
            (2 * k + a + 1 - x) * out[..., k] - np.sqrt(k * (k + a)) * out[..., k - 1]
        ) / np.sqrt((k + 1) * (k + a + 1))
    return out


def eval_normalized(spec: AxisSpec, k: int, x: ArrayLike):
    """``ell_k^alpha(x) = L_k^alpha(x) / ||L_k^alpha||``."""
    if k < 0:
        raise InvalidDegree("degree must be nonnegative")
    val = normalized_table(spec.alpha, k, x)[..., k]
    return float(val) if np.ndim(val) == 0 else val


def i_basis_table(alpha: float, n: int, x: ArrayLike) -> NDArray[np.float64]:
    """Orthonormal differential factors ``e_k``, k = 0..n (column 0 is zero).

    ``e_k(x) = -sqrt(x / (alpha + 1)) * ell_{k-1}^{alpha+1}(x)``.
    """
    a = _check_alpha(alpha)
    x = _check_positive_x(x)
    out = np.zeros(x.shape + (n + 1,))
    if n >= 1:
        shifted = normalized_table(a + 1.0, n - 1, x)
        out[..., 1:] = -np.sqrt(x / (a + 1.0))[..., None] * shifted
    return out


def eval_i_basis(spec: AxisSpec, k: int, x: ArrayLike):
    """Orthonormal factor ``e_k`` carried by an axis inside the index set.

    Equal to ``delta ell_k / sqrt(k)``; only defined for ``k >= 1``.
    """
    if k < 1:
        raise InvalidDegree("differential factor needs degree >= 1")
    val = i_basis_table(spec.alpha, k, x)[..., k]
    return float(val) if np.ndim(val) == 0 else val


def delta_i_basis_table(alpha: float, n: int, x: ArrayLike) -> NDArray[np.float64]:
    """``delta e_k`` for k = 0..n.

    Differentiating ``-sqrt(x/(a+1)) ell_{k-1}^{a+1}`` gives
    ``-(ell_{k-1}^{a+1}/2 + x d/dx ell_{k-1}^{a+1}) / sqrt(a+1)``.
    """
    a = _check_alpha(alpha)
    x = _check_positive_x(x)
    out = np.zeros(x.shape + (n + 1,))
    if n < 1:
        return out
    b = a + 1.0
    ell_b = normalized_table(b, n - 1, x)
    d_ell_b = np.zeros_like(ell_b)
    if n >= 2:
        ell_bb = normalized_table(b + 1.0, n - 2, x)
        m = np.arange(1, n)
        d_ell_b[..., 1:] = -np.sqrt(m / (b + 1.0)) * ell_bb
    out[..., 1:] = -(0.5 * ell_b + x[..., None] * d_ell_b) / np.sqrt(b)
    return out


def psi(alpha: float, x: ArrayLike):
    """Logarithmic weight ``(alpha + 1/2)/sqrt(x) - sqrt(x)``."""
    a = _check_alpha(alpha)
    x = _check_positive_x(x)
    s = np.sqrt(x)
    val = (a + 0.5) / s - s
    return float(val) if np.ndim(val) == 0 else val


def delta_psi(alpha: float, x: ArrayLike):
    """``delta psi = -((alpha + 1/2)/x + 1)/2``."""
    a = _check_alpha(alpha)
    x = _check_positive_x(x)
    val = -0.5 * ((a + 0.5) / x + 1.0)
    return float(val) if np.ndim(val) == 0 else val


# ---------------------------------------------------------------------------
# quadrature


def _log_christoffel_sum(alpha: float, m: int, x: NDArray[np.float64]) -> NDArray[np.float64]:
    """``log sum_{k<m} ell_k(x)^2``, rescaling the recurrence to avoid overflow at large nodes."""
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    total = np.ones_like(x)
    log_scale = np.zeros_like(x)
    for k in range(m - 1):
        nxt = ((2 * k + alpha + 1 - x) * cur - np.sqrt(k * (k + alpha)) * prev) / np.sqrt((k + 1) * (k + alpha + 1))
        prev, cur = cur, nxt
        total += cur * cur
        big = np.abs(cur) > 1e100
        if np.any(big):
            prev[big] *= 1e-100
            cur[big] *= 1e-100
            total[big] *= 1e-200
            log_scale[big] += 200 * np.log(10.0)
    return np.log(total) + log_scale


@lru_cache(maxsize=256)
def _gauss_laguerre_cached(alpha: float, m: int) -> QuadratureRule:
    k = np.arange(m, dtype=float)
    diag = 2.0 * k + alpha + 1.0
    off = np.sqrt(k[1:] * (k[1:] + alpha))
    try:
        nodes = eigh_tridiagonal(diag, off, eigvals_only=True)
    except Exception as exc:  # pragma: no cover - LAPACK failure
        raise NumericalFailure(f"tridiagonal eigensolver failed for alpha={alpha}, M={m}: {exc}")
    nodes = np.sort(nodes)
    if not np.all(nodes > 0):
        raise NumericalFailure(f"non-positive Gauss node for alpha={alpha}, M={m}: {nodes.min()}")
    # Christoffel numbers: 1 / sum_k ell_k(x_i)^2 over k < M
    weights = np.exp(-_log_christoffel_sum(alpha, m, nodes))
    weights = weights / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(alpha=alpha, nodes=nodes, weights=weights, exact_degree=2 * m - 1)


def gauss_laguerre_rule(alpha: float, m: int) -> QuadratureRule:
    """M-point Gauss rule for mu_alpha, exact up to degree 2M - 1."""
    a = _check_alpha(alpha)
    if int(m) != m or m < 1:
        raise InvalidParameter(f"node count must be a positive integer, got {m}")
    return _gauss_laguerre_cached(a, int(m))


# ---------------------------------------------------------------------------
# modified Bessel functions

_SERIES_CUTOFF = 20.0
_ASYM_TERMS = 60


def _log_series(nu: float, z: NDArray[np.float64]) -> NDArray[np.float64]:
    """log I_nu(z) from the ascending series, for z > 0.

    All terms are positive, so the sum is accurate; the running sum is
    rescaled to avoid overflow.
    """
    q = 0.25 * z * z
    total = np.ones_like(z)
    term = np.ones_like(z)
    log_scale = np.zeros_like(z)
    active = np.ones(z.shape, dtype=bool)
    m = 0
    while np.any(active):
        term = np.where(active, term * q / ((m + 1) * (m + 1 + nu)), term)
        total = np.where(active, total + term, total)
        m += 1
        big = total > 1e250
        if np.any(big):
            total = np.where(big, total * 1e-250, total)
            term = np.where(big, term * 1e-250, term)
            log_scale = np.where(big, log_scale + 250 * np.log(10.0), log_scale)
        active = active & ((m < 0.5 * z + 10) | (term > 1e-17 * total))
        if m > 100000:  # pragma: no cover
            raise NumericalFailure("Bessel series failed to converge")
    return nu * np.log(0.5 * z) - gammaln(nu + 1.0) + np.log(total) + log_scale


def _scaled_asymptotic(nu: float, z: NDArray[np.float64]):
    """Hankel expansion of exp(-z) I_nu(z); returns (value, converged mask)."""
    mu = 4.0 * nu * nu
    total = np.ones_like(z)
    term = np.ones_like(z)
    done = np.zeros(z.shape, dtype=bool)
    converged = np.zeros(z.shape, dtype=bool)
    for k in range(1, _ASYM_TERMS):
        nxt = -term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * z)
        small = np.abs(nxt) <= 1e-16 * np.abs(total)
        growing = np.abs(nxt) > np.abs(term)
        converged |= ~done & small
        take = ~done & ~small & ~growing
        total = np.where(take, total + nxt, total)
        term = np.where(take, nxt, term)
        done |= small | growing
        if np.all(done):
            break
    # stopped at the smallest term: accept if that term is already negligible
    converged |= done & ~converged & (np.abs(term) < 1e-15 * np.abs(total))
    return total / np.sqrt(2.0 * np.pi * z), converged


def bessel_i_scaled(nu: float, z: ArrayLike):
    """``exp(-z) * I_nu(z)`` for real order nu > -1 and z >= 0."""
    nu = float(nu)
    if nu <= -1.0:
        raise InvalidParameter("order must exceed -1")
    z_in = np.asarray(z, dtype=float)
    if np.any(z_in < 0) or np.any(np.isnan(z_in)):
        raise InvalidParameter("argument must be >= 0")
    z = z_in.reshape(-1)
    out = np.empty_like(z)
    zero = z == 0
    if np.any(zero):
        out[zero] = 1.0 if nu == 0 else (0.0 if nu > 0 else np.inf)
    pos = ~zero
    large = pos & (z > _SERIES_CUTOFF) & np.isfinite(z)
    small = pos & ~large
    if np.any(large):
        vals, ok = _scaled_asymptotic(nu, z[large])
        idx = np.flatnonzero(large)
        out[idx[ok]] = vals[ok]
        small[idx[~ok]] = True
    if np.any(small):
        zs = z[small]
        out[small] = np.exp(_log_series(nu, zs) - zs)
    return float(out[0]) if z_in.ndim == 0 else out.reshape(z_in.shape)


def bessel_i(nu: float, z: ArrayLike):
    """Modified Bessel function of the first kind ``I_nu(z)``.

    Raises :class:`RangeError` where the unscaled value overflows; use
    :func:`bessel_i_scaled` there.
    """
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr > 709.0):
        raise RangeError("I_nu(z) overflows for z > 709; use bessel_i_scaled")
    val = np.asarray(bessel_i_scaled(nu, z_arr)) * np.exp(z_arr)
    return float(val) if val.ndim == 0 else val


def _log_bessel_i(nu: float, z: NDArray[np.float64]) -> NDArray[np.float64]:
    with np.errstate(divide="ignore"):
        return np.log(np.asarray(bessel_i_scaled(nu, z))) + z


# ---------------------------------------------------------------------------
# heat kernels


def _kernel_args(alpha, t, x, y):
    a = _check_alpha(alpha)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise InvalidParameter("time must be positive")
    x = _check_positive_x(x)
    y = _check_positive_x(y)
    return a, t, x, y


def _log_heat_kernel(a, t, x, y):
    u = np.exp(-t)
    one_minus_u = -np.expm1(-t)
    w = 2.0 * np.sqrt(x * y * u) / one_minus_u
    return (
        gammaln(a + 1.0)
        - np.log(one_minus_u)
        - u * (x + y) / one_minus_u
        - 0.5 * a * np.log(x * y * u)
        + _log_bessel_i(a, np.asarray(w, dtype=float))
    )


def heat_kernel_1d(alpha: float, t, x, y):
    """Kernel of exp(-t L_alpha) against mu_alpha.

    ``Gamma(a+1)/(1-u) exp(-u(x+y)/(1-u)) (xyu)^(-a/2) I_a(2 sqrt(xyu)/(1-u))``
    with ``u = exp(-t)``; evaluated in log space.
    """
    a, t, x, y = _kernel_args(alpha, t, x, y)
    val = np.exp(_log_heat_kernel(a, t, x, y))
    return float(val) if np.ndim(val) == 0 else val


def heat_kernel_tilde_1d(alpha: float, t, x, y):
    """Kernel of the semigroup on the differential factor ``e_k`` basis.

    ``sum_{k>=1} exp(-tk) e_k(x) e_k(y) = exp(-t) sqrt(xy)/(a+1) G_t^{a+1}(x, y)``.
    """
    a, t, x, y = _kernel_args(alpha, t, x, y)
    log_val = -t + 0.5 * np.log(x * y) - np.log(a + 1.0) + _log_heat_kernel(a + 1.0, t, x, y)
    val = np.exp(log_val)
    return float(val) if np.ndim(val) == 0 else val


def _eigensum_degree(t: float, x: float, y: float, tol: float) -> int:
    # |ell_k(x)| grows at most like exp(x/2) times a power of k
    n = (np.log(1.0 / tol) + 0.5 * (x + y) + 5.0) / t
    return int(min(max(np.ceil(n), 20), 5000))


def heat_kernel_eigensum(alpha: float, t: float, x: float, y: float, tol: float = 1e-16) -> float:
    """Truncated expansion ``sum_k exp(-tk) ell_k(x) ell_k(y)``."""
    a, t, x, y = _kernel_args(alpha, t, x, y)
    n = _eigensum_degree(float(t), float(x), float(y), tol)
    lx = normalized_table(a, n, x)
    ly = normalized_table(a, n, y)
    return float(np.sum(np.exp(-t * np.arange(n + 1)) * lx * ly))


def heat_kernel_tilde_eigensum(alpha: float, t: float, x: float, y: float, tol: float = 1e-16) -> float:
    """Truncated expansion ``sum_{k>=1} exp(-tk) e_k(x) e_k(y)``."""
    a, t, x, y = _kernel_args(alpha, t, x, y)
    n = _eigensum_degree(float(t), float(x), float(y), tol)
    ex = i_basis_table(a, n, x)
    ey = i_basis_table(a, n, y)
    return float(np.sum(np.exp(-t * np.arange(n + 1)) * ex * ey))
