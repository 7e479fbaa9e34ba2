import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from hodge_laguerre.errors import InvalidDegree, InvalidParameter, SingularInput
from hodge_laguerre.laguerre_core import (
    AxisSpec,
    bessel_i,
    bessel_i_scaled,
    delta_i_basis_table,
    eval_i_basis,
    eval_laguerre,
    eval_normalized,
    gauss_laguerre_rule,
    heat_kernel_1d,
    heat_kernel_eigensum,
    heat_kernel_tilde_1d,
    heat_kernel_tilde_eigensum,
    i_basis_table,
    laguerre_l2_norm,
    normalized_table,
    psi,
)

alphas = st.sampled_from([-0.5, -0.25, 0.0, 0.5, 1.5, 3.0])


# -- polynomials -------------------------------------------------------------


def test_eval_laguerre_examples():
    np.testing.assert_allclose(eval_laguerre(AxisSpec(0.0, 0), 3.7), [1.0])
    np.testing.assert_allclose(eval_laguerre(AxisSpec(0.0, 1), 1.0), [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(eval_laguerre(AxisSpec(2.0, 1), 1.0), [1.0, 2.0])


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.5, 2.0])
def test_recurrence_matches_explicit_sum(alpha):
    # L_k^a(x) = sum_j (-1)^j binom(k+a, k-j) x^j / j!
    rng = np.random.default_rng(3)
    x = rng.uniform(0.05, 12.0, 10)
    table = eval_laguerre(AxisSpec(alpha, 6), x).T
    for k in range(7):
        ref = sum(
            (-1) ** j * special.binom(k + alpha, k - j) * x**j / math.factorial(j) for j in range(k + 1)
        )
        np.testing.assert_allclose(table[k], ref, rtol=1e-10, atol=1e-12)


def test_eval_laguerre_against_scipy():
    x = np.linspace(0.0, 40.0, 81)
    table = eval_laguerre(AxisSpec(1.5, 25), x).T
    for k in range(26):
        np.testing.assert_allclose(table[k], special.eval_genlaguerre(k, 1.5, x), rtol=1e-9, atol=1e-9)


def test_invalid_alpha():
    with pytest.raises(InvalidParameter):
        AxisSpec(-1.0, 2)
    with pytest.raises(InvalidParameter):
        laguerre_l2_norm(-1.5, 2)


def test_l2_norm_examples():
    assert laguerre_l2_norm(0.0, 17) == pytest.approx(1.0, abs=1e-14)
    assert laguerre_l2_norm(0.0, 0) == pytest.approx(1.0, abs=1e-14)
    assert laguerre_l2_norm(1.0, 1) == pytest.approx(math.sqrt(2.0), rel=1e-14)


def test_l2_norm_large_degree_is_finite():
    # direct gamma ratios overflow here
    val = laguerre_l2_norm(2.5, 400)
    ref = math.exp(0.5 * (math.lgamma(403.5) - math.lgamma(3.5) - math.lgamma(401)))
    assert val == pytest.approx(ref, rel=1e-12)


def test_eval_normalized_examples():
    assert eval_normalized(AxisSpec(0.0, 0), 0, 2.5) == pytest.approx(1.0)
    assert eval_normalized(AxisSpec(1.0, 1), 1, 0.0) == pytest.approx(math.sqrt(2.0))
    assert eval_normalized(AxisSpec(0.0, 1), 1, 1.0) == pytest.approx(0.0, abs=1e-15)


def test_eval_i_basis_examples():
    assert eval_i_basis(AxisSpec(0.0, 1), 1, 1.0) == pytest.approx(-1.0)
    assert eval_i_basis(AxisSpec(0.0, 1), 1, 4.0) == pytest.approx(-2.0)
    assert abs(eval_i_basis(AxisSpec(0.0, 2), 2, 1e-12)) < 1e-5
    with pytest.raises(InvalidDegree):
        eval_i_basis(AxisSpec(0.0, 2), 0, 1.0)


def test_psi_examples():
    assert psi(-0.5, 9.0) == pytest.approx(-3.0)
    assert psi(0.5, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert psi(0.0, 4.0) == pytest.approx(-1.75)
    with pytest.raises(SingularInput):
        psi(0.0, 0.0)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.7, 2.0])
def test_derivative_identity_fd(alpha):
    # d/dx L_k^a = -L_{k-1}^{a+1}
    x = np.array([0.3, 1.1, 2.7, 6.0])
    h = 1e-6
    plus = eval_laguerre(AxisSpec(alpha, 8), x + h).T
    minus = eval_laguerre(AxisSpec(alpha, 8), x - h).T
    shifted = eval_laguerre(AxisSpec(alpha + 1, 7), x).T
    fd = (plus[1:] - minus[1:]) / (2 * h)
    np.testing.assert_allclose(fd, -shifted, atol=1e-5, rtol=1e-5)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.5])
def test_i_basis_is_scaled_derivative(alpha):
    # e_k = sqrt((a+1)/k) sqrt(x) d/dx l_k, with the (a+1) normalisation absorbed
    x = np.array([0.4, 1.3, 3.2])
    h = 1e-6
    n = 6
    d_l = ((normalized_table(alpha, n, x + h) - normalized_table(alpha, n, x - h)) / (2 * h)).T
    e = i_basis_table(alpha, n, x).T
    for k in range(1, n + 1):
        np.testing.assert_allclose(e[k], np.sqrt(x) * d_l[k] / np.sqrt(k), rtol=1e-6, atol=1e-7)


def test_delta_i_basis_table_fd():
    alpha, n = 0.3, 5
    x = np.array([0.5, 1.7, 4.0])
    h = 1e-6
    e_p = i_basis_table(alpha, n, x + h)
    e_m = i_basis_table(alpha, n, x - h)
    fd = np.sqrt(x)[:, None] * (e_p - e_m) / (2 * h)
    np.testing.assert_allclose(delta_i_basis_table(alpha, n, x), fd, rtol=1e-5, atol=1e-6)


# -- quadrature --------------------------------------------------------------


def test_gauss_rule_examples():
    rule = gauss_laguerre_rule(0.0, 1)
    np.testing.assert_allclose(rule.nodes, [1.0])
    np.testing.assert_allclose(rule.weights, [1.0])
    rule = gauss_laguerre_rule(0.0, 20)
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-14)
    assert rule.integrate(rule.nodes) == pytest.approx(1.0, abs=1e-12)
    assert rule.exact_degree == 39


@pytest.mark.parametrize("alpha,m", [(-0.5, 7), (0.0, 16), (1.5, 30), (3.0, 12)])
def test_gauss_rule_against_scipy(alpha, m):
    nodes, weights = special.roots_genlaguerre(m, alpha)
    rule = gauss_laguerre_rule(alpha, m)
    np.testing.assert_allclose(rule.nodes, nodes, rtol=1e-11)
    np.testing.assert_allclose(rule.weights, weights / weights.sum(), rtol=1e-9, atol=1e-300)


@pytest.mark.parametrize("m", [160, 640, 1280])
def test_gauss_rule_large_order_moments(m):
    rule = gauss_laguerre_rule(0.5, m)
    assert np.all(np.isfinite(rule.weights)) and np.all(rule.weights >= 0)
    # E[x^j] = Gamma(a+1+j)/Gamma(a+1)
    for j in range(5):
        ref = math.exp(math.lgamma(1.5 + j) - math.lgamma(1.5))
        assert rule.integrate(rule.nodes**j) == pytest.approx(ref, rel=1e-12)


@given(alphas, st.integers(0, 8), st.integers(0, 8))
@settings(max_examples=40, deadline=None)
def test_orthonormality(alpha, j, k):
    rule = gauss_laguerre_rule(alpha, (j + k) // 2 + 1)
    tab = normalized_table(alpha, max(j, k), rule.nodes).T
    assert rule.integrate(tab[j] * tab[k]) == pytest.approx(float(j == k), abs=1e-10)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 2.0])
def test_i_basis_gram_is_identity(alpha):
    n = 10
    rule = gauss_laguerre_rule(alpha, n + 2)
    e = i_basis_table(alpha, n, rule.nodes).T[1:]
    gram = (e * rule.weights) @ e.T
    np.testing.assert_allclose(gram, np.eye(n), atol=1e-10)


# -- Bessel ------------------------------------------------------------------


def test_bessel_examples():
    assert bessel_i(0.0, 0.0) == 1.0
    assert bessel_i(0.5, 0.0) == 0.0
    series = sum((0.5) ** (2 * m) / math.factorial(m) ** 2 for m in range(40))
    assert bessel_i(0.0, 1.0) == pytest.approx(series, rel=1e-14)


@pytest.mark.parametrize("nu", [-0.5, 0.0, 0.5, 1.0, 2.5, 7.0])
def test_bessel_against_scipy(nu):
    z = np.geomspace(1e-6, 700.0, 200)
    np.testing.assert_allclose(bessel_i(nu, z), special.iv(nu, z), rtol=1e-12)
    zz = np.geomspace(1.0, 1e5, 200)
    np.testing.assert_allclose(bessel_i_scaled(nu, zz), special.ive(nu, zz), rtol=1e-12)


# -- kernels -----------------------------------------------------------------


def test_kernel_examples():
    ref = heat_kernel_eigensum(0.0, 1.0, 1.0, 1.0, tol=1e-12)
    assert heat_kernel_1d(0.0, 1.0, 1.0, 1.0) == pytest.approx(ref, rel=1e-6)
    ref = heat_kernel_tilde_eigensum(0.0, 1.0, 1.0, 1.0, tol=1e-12)
    assert heat_kernel_tilde_1d(0.0, 1.0, 1.0, 1.0) == pytest.approx(ref, rel=1e-6)
    with pytest.raises(InvalidParameter):
        heat_kernel_1d(0.0, 0.0, 1.0, 1.0)


def test_eigensum_oracle_is_independent():
    # the eigen-sum oracle, rebuilt from scipy's polynomials
    alpha, t, x, y = 0.5, 0.7, 1.3, 2.2
    ks = np.arange(200)
    norms = np.exp(0.5 * (special.gammaln(ks + alpha + 1) - special.gammaln(alpha + 1) - special.gammaln(ks + 1)))
    lx = special.eval_genlaguerre(ks, alpha, x) / norms
    ly = special.eval_genlaguerre(ks, alpha, y) / norms
    ref = np.sum(np.exp(-t * ks) * lx * ly)
    assert heat_kernel_1d(alpha, t, x, y) == pytest.approx(ref, rel=1e-9)


@given(
    alphas,
    st.floats(0.05, 5.0),
    st.floats(0.01, 20.0),
    st.floats(0.01, 20.0),
)
@settings(max_examples=60, deadline=None)
def test_kernel_symmetric_positive_dominated(alpha, t, x, y):
    g = heat_kernel_1d(alpha, t, x, y)
    assert g > 0
    assert g == heat_kernel_1d(alpha, t, y, x)
    gt = heat_kernel_tilde_1d(alpha, t, x, y)
    assert gt == heat_kernel_tilde_1d(alpha, t, y, x)
    # the ratio is I_{a+1}/I_a, which rounds to 1 for large arguments
    assert gt <= math.exp(-t / 2) * g * (1 + 1e-12)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.5])
def test_stochastic_completeness(alpha):
    rule = gauss_laguerre_rule(alpha, 160)
    for t in (0.3, 1.0, 3.0):
        for x in (0.2, 1.0, 4.0):
            assert rule.integrate(heat_kernel_1d(alpha, t, x, rule.nodes)) == pytest.approx(1.0, abs=1e-8)


def test_semigroup_law():
    alpha, t, s = 0.5, 0.6, 0.9
    rule = gauss_laguerre_rule(alpha, 160)
    for x, y in [(0.5, 1.5), (2.0, 3.0)]:
        val = rule.integrate(heat_kernel_1d(alpha, t, x, rule.nodes) * heat_kernel_1d(alpha, s, rule.nodes, y))
        assert val == pytest.approx(heat_kernel_1d(alpha, t + s, x, y), rel=1e-6)
