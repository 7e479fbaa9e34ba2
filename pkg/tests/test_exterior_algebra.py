import itertools
import json
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodge_laguerre.errors import InvalidArgument
from hodge_laguerre.exterior_algebra import (
    AlternatingTensor,
    basis_tensor,
    bracket,
    covector,
    hodge_star,
    index_position,
    index_sets,
    inner,
    interior,
    sigma,
    wedge,
)


def dx(d, *I):
    return basis_tensor(d, I)


def _perm_sign(seq):
    seq = list(seq)
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


def wedge_oracle(a: AlternatingTensor, b: AlternatingTensor) -> AlternatingTensor:
    # dx_I ^ dx_J = sign(sort(I + J)) dx_{I u J}, zero on overlap
    out = {}
    for I, ca in zip(index_sets(a.d, a.r), a.coeffs):
        for J, cb in zip(index_sets(b.d, b.r), b.coeffs):
            if set(I) & set(J):
                continue
            K = tuple(sorted(I + J))
            out[K] = out.get(K, 0.0) + _perm_sign(I + J) * ca * cb
    return AlternatingTensor.from_dict(a.d, a.r + b.r, out) if a.r + b.r <= a.d else AlternatingTensor.zeros(a.d, a.r + b.r)


@st.composite
def tensor_pair(draw, max_d=6):
    d = draw(st.integers(1, max_d))
    r = draw(st.integers(0, d))
    seed = draw(st.integers(0, 2**31))
    rng = np.random.default_rng(seed)
    phi = covector(rng.standard_normal(d))
    omega = AlternatingTensor(d, r, rng.standard_normal(comb(d, r)))
    return phi, omega


def test_index_sets_lexicographic():
    assert index_sets(3, 2) == ((1, 2), (1, 3), (2, 3))
    assert index_sets(2, 0) == ((),)
    assert index_sets(2, 3) == ()
    assert index_position(4, (2, 4)) == 4
    with pytest.raises(InvalidArgument):
        index_position(3, (2, 1))


def test_sigma_examples():
    assert sigma(5, ()) == 0
    assert sigma(2, (1, 3)) == 1
    assert sigma(3, (1, 2)) == 2


def test_wedge_examples():
    assert wedge(dx(3, 1), dx(3, 1)).allclose(AlternatingTensor.zeros(3, 2))
    assert wedge(dx(2, 2), dx(2, 1)).allclose(-dx(2, 1, 2))
    assert wedge(dx(3, 1), dx(3, 2, 3)).allclose(dx(3, 1, 2, 3))
    over = wedge(dx(2, 1), dx(2, 1, 2))
    assert over.r == 3 and over.is_empty_space and over.coeffs.size == 0


def test_interior_examples():
    assert interior(dx(3, 3), dx(3, 1, 2)).allclose(AlternatingTensor.zeros(3, 1))
    assert interior(dx(2, 1), dx(2, 1, 2)).allclose(dx(2, 2))
    assert interior(dx(2, 2), dx(2, 1, 2)).allclose(-dx(2, 1))
    assert interior(dx(2, 1), AlternatingTensor(2, 0, [3.0])).is_empty_space


def test_hodge_star_examples():
    assert hodge_star(dx(3, 1)).allclose(dx(3, 2, 3))
    assert hodge_star(AlternatingTensor(2, 0, [1.0])).allclose(dx(2, 1, 2))
    assert hodge_star(dx(3, 2)).allclose(-dx(3, 1, 3))


def test_bracket_examples():
    w = AlternatingTensor(2, 1, [1.0, 2.0])
    assert bracket(w, AlternatingTensor.zeros(2, 1)).allclose(AlternatingTensor.zeros(2, 1))
    assert bracket(w, AlternatingTensor(2, 1, [0.0, 3.0])).allclose(AlternatingTensor(2, 1, [0.0, 6.0]))
    assert bracket(w, AlternatingTensor(2, 1, [1.0, 1.0])).allclose(w)
    with pytest.raises(InvalidArgument):
        bracket(w, dx(2, 1, 2))


@pytest.mark.parametrize("d", range(1, 6))
def test_wedge_matches_permutation_oracle(d):
    rng = np.random.default_rng(d)
    for r in range(d + 1):
        for s in range(d + 1 - r):
            a = AlternatingTensor(d, r, rng.standard_normal(comb(d, r)))
            b = AlternatingTensor(d, s, rng.standard_normal(comb(d, s)))
            np.testing.assert_allclose(wedge(a, b).coeffs, wedge_oracle(a, b).coeffs, atol=1e-13)


@pytest.mark.parametrize("d", range(1, 6))
def test_interior_is_adjoint_of_wedge_on_bases(d):
    for r in range(1, d + 1):
        for j in range(1, d + 1):
            phi = dx(d, j)
            for U in index_sets(d, r - 1):
                for V in index_sets(d, r):
                    u, v = dx(d, *U), dx(d, *V)
                    assert inner(wedge(phi, u), v) == inner(u, interior(phi, v))


@pytest.mark.parametrize("d", range(1, 6))
def test_hodge_star_defining_identity(d):
    vol = dx(d, *range(1, d + 1))
    for r in range(d + 1):
        for I in index_sets(d, r):
            for J in index_sets(d, r):
                lhs = wedge(dx(d, *I), hodge_star(dx(d, *J)))
                assert lhs.allclose(float(I == J) * vol, atol=0)


@given(tensor_pair())
@settings(max_examples=200, deadline=None)
def test_anticommutator_and_norm_split(pair):
    phi, omega = pair
    lhs = wedge(phi, interior(phi, omega))
    rhs = interior(phi, wedge(phi, omega))
    total = (lhs if not lhs.is_empty_space else AlternatingTensor.zeros(omega.d, omega.r)) + rhs
    scale = phi.norm() ** 2 * max(1.0, omega.norm())
    assert total.allclose(phi.norm() ** 2 * omega, atol=1e-12 * scale)
    split = wedge(phi, omega).norm() ** 2 + interior(phi, omega).norm() ** 2
    assert split == pytest.approx(phi.norm() ** 2 * omega.norm() ** 2, rel=1e-12, abs=1e-12)


@given(tensor_pair())
@settings(max_examples=100, deadline=None)
def test_double_star_and_graded_commutativity(pair):
    phi, omega = pair
    d, r = omega.d, omega.r
    assert hodge_star(hodge_star(omega)).allclose((-1) ** (r * (d - r)) * omega, atol=1e-13)
    if r + 1 <= d:
        assert wedge(omega, phi).allclose((-1) ** r * wedge(phi, omega), atol=1e-13)


@given(st.integers(1, 6), st.integers(0, 2**31))
@settings(max_examples=50, deadline=None)
def test_equal_component_covector_squares_to_zero(d, seed):
    rng = np.random.default_rng(seed)
    r = int(rng.integers(0, d))
    # integer entries keep every partial sum exact, so cancellation is exact
    phi = covector(np.full(d, float(rng.integers(-9, 10))))
    omega = AlternatingTensor(d, r, rng.integers(-50, 51, comb(d, r)).astype(float))
    twice = wedge(phi, wedge(phi, omega))
    assert np.all(twice.coeffs == 0)


def test_wedge_associative():
    rng = np.random.default_rng(0)
    a, b, c = (AlternatingTensor(5, r, rng.standard_normal(comb(5, r))) for r in (1, 2, 1))
    assert wedge(wedge(a, b), c).allclose(wedge(a, wedge(b, c)), atol=1e-12)


def test_json_roundtrip_and_validation():
    t = AlternatingTensor(3, 2, [1.0, -2.5, 0.25])
    obj = json.loads(json.dumps(t.to_json()))
    assert obj == {"d": 3, "r": 2, "coeffs": [1.0, -2.5, 0.25]}
    assert AlternatingTensor.from_json(obj).allclose(t, atol=0)
    with pytest.raises(InvalidArgument):
        AlternatingTensor(3, 2, [1.0, 2.0])
    with pytest.raises(InvalidArgument):
        AlternatingTensor.from_json({"d": 3})
