import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from hodge_laguerre.errors import InvalidInput, InvalidMultiplier, InvalidShift
from hodge_laguerre.exterior_algebra import index_sets
from hodge_laguerre.fourier_laguerre import (
    FormEvaluator,
    SpectralForm,
    basis_function,
    multi_indices,
    random_form,
    synthesize_values,
    tensor_grid,
)
from hodge_laguerre.laguerre_core import gauss_laguerre_rule, heat_kernel_1d, psi
from hodge_laguerre.spectral_operators import (
    MultiplierSpec,
    SobolevSector,
    apply_delta,
    apply_delta_star,
    apply_laplacian,
    apply_multiplier,
    heat,
    inverse_power,
    poisson,
    riesz,
    riesz_star,
    sector_norm_estimate,
    translated_sector_norm_estimate,
)

from helpers import fd_scalar_operator


@st.composite
def forms(draw, max_d=4, max_n=4, rank=None):
    d = draw(st.integers(1, max_d))
    r = draw(st.integers(0, d)) if rank is None else min(rank, d)
    alpha = tuple(draw(st.sampled_from([-0.5, 0.0, 0.5, 2.0])) for _ in range(d))
    low = max(r, 1)
    n = draw(st.integers(low, max(low, max_n if d < 4 else 3)))
    seed = draw(st.integers(0, 2**31))
    return random_form(d, alpha, r, n, np.random.default_rng(seed))


def zero_like(f):
    return SpectralForm.zero(f.d, f.alpha, f.r)


def test_delta_examples():
    const = SpectralForm.unit(2, (0, 0), (), (0, 0), c=2.0)
    assert apply_delta(const).norm() == 0
    got = apply_delta(SpectralForm.unit(2, (0, 0), (), (1, 0)))
    assert got.max_abs_diff(SpectralForm.unit(2, (0, 0), (1,), (1, 0))) == 0
    got = apply_delta_star(SpectralForm.unit(1, (0,), (1,), (1,)))
    assert got.max_abs_diff(SpectralForm.unit(1, (0,), (), (1,))) == 0


def test_delta_coefficient_rule_on_basis():
    # delta_j l_k^{I} = (-1)^{sigma(j, I)} sqrt(k_j) l_k^{I u j}
    d, alpha = 3, (0.5, 0.0, 1.0)
    k = (2, 3, 1)
    got = apply_delta(SpectralForm.unit(d, alpha, (2,), k))
    expected = SpectralForm.from_terms(d, alpha, 2, [((1, 2), k, math.sqrt(2)), ((2, 3), k, -1.0)])
    assert got.max_abs_diff(expected) <= 1e-15


def test_delta_matches_pointwise_derivative():
    # (delta w)_{I u j} assembled from sqrt(x_j) d/dx_j w_I at a point
    form = random_form(2, (0.5, -0.5), 0, 4, np.random.default_rng(2))
    x = np.array([[0.8, 1.9]])
    ev = FormEvaluator(form.alpha, 4, x)
    grads = [ev.values(form, deriv=j)[0, 0] for j in (1, 2)]
    np.testing.assert_allclose(synthesize_values(apply_delta(form), x)[0], grads, rtol=1e-12)


@given(forms())
@settings(max_examples=100, deadline=None)
def test_nilpotent(f):
    assert apply_delta(apply_delta(f)).norm() <= 1e-12 * max(1, f.norm())
    assert apply_delta_star(apply_delta_star(f)).norm() <= 1e-12 * max(1, f.norm())


@given(forms(), st.integers(0, 2**31))
@settings(max_examples=60, deadline=None)
def test_adjoint_pair(f, seed):
    if f.r == f.d:
        return
    g = random_form(f.d, f.alpha, f.r + 1, max(f.degree(), f.r + 1), np.random.default_rng(seed))
    assert apply_delta(f).inner(g) == pytest.approx(f.inner(apply_delta_star(g)), abs=1e-12 * (1 + f.norm() * g.norm()))


@given(forms())
@settings(max_examples=100, deadline=None)
def test_laplacian_identities(f):
    lap = apply_laplacian(f)
    up = apply_delta_star(apply_delta(f)) if f.r < f.d else zero_like(f)
    down = apply_delta(apply_delta_star(f)) if f.r > 0 else zero_like(f)
    assert (up + down).max_abs_diff(lap) <= 1e-12 * max(1, np.abs(lap.coeffs).max(initial=0))
    if f.r < f.d:
        assert apply_delta(lap).max_abs_diff(apply_laplacian(apply_delta(f))) <= 1e-12 * max(1, lap.norm())
    if f.r > 0:
        assert apply_delta_star(lap).max_abs_diff(apply_laplacian(apply_delta_star(f))) <= 1e-12 * max(1, lap.norm())


def test_laplacian_examples():
    const = SpectralForm.unit(3, 0.0, (), (0, 0, 0))
    assert apply_laplacian(const).norm() == 0
    eig = SpectralForm.unit(2, (0.5, 0), (1, 2), (2, 1), c=-1.5)
    assert apply_laplacian(eig).max_abs_diff(3 * eig) == 0


@pytest.mark.parametrize("I", [(), (1,), (2,), (1, 2)])
def test_laplacian_acts_componentwise_fd(I):
    # component I of the coefficient action equals the scalar operator on w_I
    alpha = (0.5, 0.0)
    form = random_form(2, alpha, len(I), 3, np.random.default_rng(len(I)))
    p = index_sets(2, len(I)).index(I)
    comp = lambda y: synthesize_values(form, y.reshape(1, -1))[0, p]
    lap = apply_laplacian(form)
    for x in ([0.9, 1.4], [2.3, 0.6]):
        fd = fd_scalar_operator(comp, alpha, I, x)
        assert fd == pytest.approx(synthesize_values(lap, np.array([x]))[0, p], rel=1e-4, abs=1e-4)


def test_m_alpha_lower_bound_at_nodes():
    # -sum_{j in I} delta_j psi_j >= #I/2 for alpha_j >= -1/2
    for a in (-0.5, 0.0, 1.0, 3.0):
        x = gauss_laguerre_rule(a, 40).nodes
        h = 1e-6
        dpsi = np.sqrt(x) * (psi(a, x + h) - psi(a, x - h)) / (2 * h)
        assert np.all(-dpsi >= 0.5 - 1e-6)


def test_heat_and_poisson_examples():
    f = random_form(2, (0, 0), 1, 4, np.random.default_rng(0))
    assert heat(0.0, 0.0, f).max_abs_diff(f) == 0
    assert poisson(0.0, 0.0, f).max_abs_diff(f) == 0
    assert heat(0.3, 0.2, heat(0.5, 0.2, f)).max_abs_diff(heat(0.8, 0.2, f)) <= 1e-15
    with pytest.raises(InvalidShift):
        poisson(1.0, 1.5, f)


@pytest.mark.parametrize("gap", [1, 2, 5])
@pytest.mark.parametrize("t", [0.5, 1.0])
def test_subordination_per_eigenvalue(gap, t):
    # exp(-t sqrt(g)) = pi^{-1/2} int_0^inf e^{-u} u^{-1/2} exp(-t^2 g / (4u)) du
    val, _ = integrate.quad(lambda u: math.exp(-u - t * t * gap / (4 * u)) / math.sqrt(u), 0, np.inf, epsabs=1e-13)
    assert val / math.sqrt(math.pi) == pytest.approx(math.exp(-t * math.sqrt(gap)), abs=1e-8)


def test_riesz_examples():
    f = random_form(3, (0.0, 0.5, 1.0), 1, 4, np.random.default_rng(1))
    energy = riesz(0.0, f).norm() ** 2 + riesz_star(0.0, f).norm() ** 2
    assert energy == pytest.approx(f.norm() ** 2, rel=1e-12)
    # shifted transform on an eigenform, |k| = n
    n, rho = 4, 0.5
    e = SpectralForm.unit(3, (0.0, 0.5, 1.0), (2,), (1, 2, 1))
    energy = riesz(rho, e).norm() ** 2 + riesz_star(rho, e).norm() ** 2
    assert energy == pytest.approx(n / (n - rho), rel=1e-12)


def test_riesz_recovers_constant_free_functions():
    f = random_form(2, (0.0, 0.5), 0, 4, np.random.default_rng(3), min_degree=1)
    assert riesz_star(0.0, riesz(0.0, f)).max_abs_diff(f) <= 1e-12


def test_riesz_errors():
    with_const = SpectralForm.unit(2, (0, 0), (), (0, 0))
    with pytest.raises(InvalidInput):
        riesz(0.0, with_const)
    f = SpectralForm.unit(2, (0, 0), (1,), (1, 0))
    with pytest.raises(InvalidShift):
        riesz(1.0, f)
    with pytest.raises(InvalidShift):
        inverse_power(0.5, 1.0, f)


def test_inverse_power_examples():
    e = SpectralForm.unit(2, (0, 0), (), (1, 1), c=3.0)
    assert inverse_power(1.0, 0.0, e).max_abs_diff(0.5 * e) <= 1e-16
    f = random_form(2, (0, 0.5), 1, 5, np.random.default_rng(4))
    half = inverse_power(0.5, 0.0, inverse_power(0.5, 0.0, f))
    assert half.max_abs_diff(inverse_power(1.0, 0.0, f)) <= 1e-15


@pytest.mark.parametrize("n", [1, 3])
@pytest.mark.parametrize("s", [0.5, 1.0])
def test_gamma_integral_per_eigenvalue(n, s):
    val, _ = integrate.quad(lambda t: t ** (s - 1) * math.exp(-t * n), 0, np.inf, epsabs=1e-13)
    got = inverse_power(s, 0.0, SpectralForm.unit(1, (0,), (), (n,))).coefficient((), (n,))
    assert val / math.gamma(s) == pytest.approx(got, abs=1e-8)


def test_multiplier_reproduces_semigroups():
    f = random_form(2, (0, 0), 1, 5, np.random.default_rng(5))
    assert apply_multiplier(MultiplierSpec(0.5, "heat", {"t": 0.7}), f).max_abs_diff(heat(0.7, 0.5, f)) <= 1e-15
    assert apply_multiplier(MultiplierSpec(0.5, "poisson", {"t": 0.7}), f).max_abs_diff(poisson(0.7, 0.5, f)) <= 1e-15
    table = MultiplierSpec.from_function(lambda n: math.exp(-0.7 * (n - 0.5)), range(1, 6), rho=0.5)
    assert apply_multiplier(table, f).max_abs_diff(heat(0.7, 0.5, f)) <= 1e-15
    assert apply_multiplier(MultiplierSpec(0.0, "riesz"), f).max_abs_diff(riesz(0.0, f)) == 0


@given(st.integers(0, 2**31))
@settings(max_examples=30, deadline=None)
def test_multiplier_norm_law(seed):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    spec = MultiplierSpec.from_function(lambda n: vals[n - 1], range(1, 7))
    f = random_form(2, (0, 0), 1, 6, rng)
    out = apply_multiplier(spec, f)
    assert out.norm() <= np.abs(vals).max() * f.norm() * (1 + 1e-12)
    # equality on an eigenform at the maximiser
    n = int(np.argmax(np.abs(vals))) + 1
    e = SpectralForm.unit(2, (0, 0), (1,), (1, n - 1))
    assert apply_multiplier(spec, e).norm() == pytest.approx(np.abs(vals).max(), rel=1e-12)


def test_multiplier_spec_json_and_errors():
    spec = MultiplierSpec.from_function(lambda n: 1 / (n + 1) + 0.5j, range(1, 4), rho=0.25)
    back = MultiplierSpec.from_json(spec.to_json())
    np.testing.assert_array_equal(back.values([1, 2, 3]), spec.values([1, 2, 3]))
    with pytest.raises(InvalidMultiplier):
        MultiplierSpec(kind="wave")
    with pytest.raises(InvalidMultiplier):
        MultiplierSpec(kind="heat")
    with pytest.raises(InvalidMultiplier):
        spec.values([7])


@pytest.mark.parametrize("d,r,alpha", [(1, 1, (0.0,)), (2, 1, (-0.5, 0.5)), (2, 2, (0.0, 1.0)), (2, 0, (0.0, 0.0))])
@pytest.mark.parametrize("t", [0.5, 1.0])
def test_pointwise_semigroup_domination(d, r, alpha, t):
    # |T_t^rho w(x)| <= e^{t(rho - r/2)} (T_t |w|)(x), scalar semigroup on |w|
    rng = np.random.default_rng(10 * d + r)
    n = 3
    form = random_form(d, alpha, r, n, rng)
    rules = [gauss_laguerre_rule(a, 60) for a in alpha]
    pts, w = tensor_grid(rules)
    modulus = np.linalg.norm(synthesize_values(form, pts), axis=1)
    x = rng.uniform(0.2, 4.0, (10, d))
    for rho in (0.0, r / 2):
        lhs = np.linalg.norm(synthesize_values(heat(t, rho, form), x), axis=1)
        factor = math.exp(t * (rho - r / 2))
        # route 1: scalar eigen-expansion of |w| up to degree 2n
        ks = multi_indices(d, 2 * n)
        c = (FormEvaluator(alpha, 2 * n, pts).matrix((), ks) * w[:, None]).T @ modulus
        by_expansion = FormEvaluator(alpha, 2 * n, x).matrix((), ks) @ (np.exp(-t * ks.sum(axis=1)) * c)
        # route 2: closed-form product kernel against the samples of |w|
        kern = np.ones((len(x), len(pts)))
        for i, a in enumerate(alpha):
            kern *= heat_kernel_1d(a, t, x[:, i][:, None], pts[:, i][None, :])
        by_kernel = kern @ (w * modulus)
        truncation = np.abs(by_expansion - by_kernel)
        assert np.all(lhs <= factor * by_kernel + 1e-6)
        assert np.all(lhs <= factor * (by_expansion + truncation) + 1e-6)


def test_sobolev_sector():
    s = SobolevSector(4.0, 2.0)
    assert s.phi_star == pytest.approx(math.asin(0.5))
    assert s.admissible and not SobolevSector(3.0, 1.0).admissible
    # the norm estimate is scale invariant for a constant multiplier
    one = sector_norm_estimate(lambda z: np.ones_like(z), 0.3, 2.0)
    two = sector_norm_estimate(lambda z: 2 * np.ones_like(z), 0.3, 2.0)
    assert two == pytest.approx(2 * one, rel=1e-12)
    heat_est = translated_sector_norm_estimate(lambda z: np.exp(-z), 0.5, s)
    assert np.isfinite(heat_est) and heat_est > 0
