"""Fourier-Laguerre expansion of r-forms on the positive orthant.

The orthonormal basis of L^2(mu_alpha; Lambda^r) consists of the forms
``ell_k^{alpha,I}(x) dx_I`` with ``k_i >= 1`` for every ``i`` in ``I``, where
``ell_k^{alpha,I}`` is a tensor product of ``ell_{k_i}`` on axes outside
``I`` and of the differential factors ``e_{k_i}`` on axes inside ``I``.

A :class:`SpectralForm` stores, for each multi-index ``k`` that occurs, the
tensor-valued coefficient ``w(k)`` (one entry per index set).  Entries with
``k`` outside the admissible set of their index set are always zero.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidArgument, InvalidDegree, InvalidIndex, InvalidParameter
from .exterior_algebra import AlternatingTensor, IndexSet, index_position, index_sets
from .laguerre_core import (
    QuadratureRule,
    delta_i_basis_table,
    gauss_laguerre_rule,
    i_basis_table,
    normalized_table,
)

__all__ = [
    "BasisSpec",
    "SpectralForm",
    "PolynomialForm",
    "multi_indices",
    "admissible_mask",
    "basis_function",
    "analyze",
    "synthesize",
    "synthesize_values",
    "parseval_norm",
    "delta_hat",
    "tensor_grid",
    "FormEvaluator",
    "random_form",
    "quadrature_norm",
    "default_rules",
]


def _alpha_tuple(alpha: ArrayLike, d: int) -> tuple[float, ...]:
    a = np.atleast_1d(np.asarray(alpha, dtype=float))
    if a.size == 1 and d != 1:
        a = np.full(d, float(a[0]))
    if a.shape != (d,):
        raise InvalidParameter(f"need {d} type parameters, got {a.size}")
    if np.any(a <= -1) or not np.all(np.isfinite(a)):
        raise InvalidParameter(f"type parameters must exceed -1, got {a.tolist()}")
    return tuple(float(v) for v in a)


@dataclass(frozen=True)
class BasisSpec:
    """Dimension, type parameters, rank and degree cap ``N`` (max ``|k|``)."""

    d: int
    alpha: tuple[float, ...]
    r: int
    degree_cap: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise InvalidArgument(f"dimension must be a positive integer, got {self.d}")
        object.__setattr__(self, "alpha", _alpha_tuple(self.alpha, self.d))
        if not 0 <= self.r <= self.d:
            raise InvalidArgument(f"rank {self.r} outside [0, {self.d}]")
        if int(self.degree_cap) != self.degree_cap or self.degree_cap < self.r:
            raise InvalidDegree(f"degree cap {self.degree_cap} must be an integer >= rank {self.r}")


@lru_cache(maxsize=None)
def _multi_indices(d: int, n: int) -> NDArray[np.int64]:
    rows = [k for k in itertools.product(range(n + 1), repeat=d) if sum(k) <= n]
    out = np.asarray(rows, dtype=np.int64).reshape(-1, d)
    out.setflags(write=False)
    return out


def multi_indices(d: int, n: int) -> NDArray[np.int64]:
    """All ``k`` in N^d with ``|k| <= n``, lexicographically ordered."""
    return _multi_indices(int(d), int(n))


def admissible_mask(d: int, r: int, ks: NDArray) -> NDArray[np.bool_]:
    """``mask[n, p]`` is true when ``ks[n]`` is admissible for the p-th index set."""
    sets = index_sets(d, r)
    mask = np.ones((len(ks), len(sets)), dtype=bool)
    for p, I in enumerate(sets):
        for i in I:
            mask[:, p] &= ks[:, i - 1] >= 1
    return mask


class SpectralForm:
    """Fourier-Laguerre coefficients of an r-form.

    Parameters
    ----------
    d, alpha, r
        Dimension, type parameters and rank.  Ranks ``-1`` and ``d + 1`` are
        allowed and denote the zero space.
    ks : (n, d) integer array
        Occurring multi-indices, one per row.
    coeffs : (n, C(d, r)) array
        ``coeffs[m, p]`` is the coefficient of ``ell_{ks[m]}^{alpha,I_p} dx_{I_p}``.
    """

    __slots__ = ("d", "alpha", "r", "ks", "coeffs")

    def __init__(self, d: int, alpha, r: int, ks: ArrayLike, coeffs: ArrayLike, *, check: bool = True):
        self.d = int(d)
        self.alpha = _alpha_tuple(alpha, self.d)
        self.r = int(r)
        width = len(index_sets(self.d, self.r))
        ks = np.asarray(ks, dtype=np.int64).reshape(-1, self.d)
        coeffs = np.asarray(coeffs)
        if coeffs.dtype.kind not in "fc":
            coeffs = coeffs.astype(float)
        coeffs = coeffs.reshape(len(ks), width)
        if check:
            if np.any(ks < 0):
                raise InvalidIndex("multi-indices must be nonnegative")
            bad = (~admissible_mask(self.d, self.r, ks)) & (coeffs != 0)
            if np.any(bad):
                m, p = np.argwhere(bad)[0]
                raise InvalidIndex(
                    f"nonzero coefficient at I={index_sets(self.d, self.r)[p]}, k={ks[m].tolist()} "
                    "but k must be >= 1 on every axis of I"
                )
            ks, coeffs = _canonical(ks, coeffs)
        self.ks = ks
        self.coeffs = coeffs

    # -- construction ------------------------------------------------------

    @classmethod
    def zero(cls, d: int, alpha, r: int) -> "SpectralForm":
        return cls(d, alpha, r, np.zeros((0, d), np.int64), np.zeros((0, len(index_sets(d, r)))), check=False)

    @classmethod
    def from_terms(cls, d: int, alpha, r: int, terms: Iterable[tuple[Sequence[int], Sequence[int], float]]):
        """Build from ``(I, k, c)`` triples; repeated keys are summed."""
        terms = list(terms)
        width = len(index_sets(d, r))
        if not terms:
            return cls.zero(d, alpha, r)
        ks = np.asarray([list(k) for _, k, _ in terms], dtype=np.int64).reshape(-1, d)
        is_complex = any(isinstance(c, complex) for _, _, c in terms)
        coeffs = np.zeros((len(terms), width), dtype=complex if is_complex else float)
        for m, (I, k, c) in enumerate(terms):
            if len(tuple(I)) != r:
                raise InvalidArgument(f"index set {tuple(I)} does not have rank {r}")
            coeffs[m, index_position(d, I)] += c
        return cls(d, alpha, r, ks, coeffs)

    @classmethod
    def unit(cls, d: int, alpha, I: Sequence[int], k: Sequence[int], c: float = 1.0) -> "SpectralForm":
        return cls.from_terms(d, alpha, len(tuple(I)), [(tuple(I), tuple(k), c)])

    # -- inspection ------------------------------------------------------------

    @property
    def width(self) -> int:
        return self.coeffs.shape[1]

    @property
    def eigenvalues(self) -> NDArray[np.int64]:
        """``|k|`` for every stored row."""
        return self.ks.sum(axis=1)

    @property
    def is_complex(self) -> bool:
        return self.coeffs.dtype.kind == "c"

    def degree(self) -> int:
        """Largest ``|k|`` carrying a nonzero coefficient (-1 when zero)."""
        live = np.any(self.coeffs != 0, axis=1)
        return int(self.eigenvalues[live].max()) if np.any(live) else -1

    def occurring_eigenvalues(self) -> NDArray[np.int64]:
        live = np.any(self.coeffs != 0, axis=1)
        return np.unique(self.eigenvalues[live])

    def coefficient(self, I: Sequence[int], k: Sequence[int]):
        row = np.flatnonzero(np.all(self.ks == np.asarray(k), axis=1))
        if len(row) == 0:
            return 0.0
        return self.coeffs[row[0], index_position(self.d, I)]

    def hat(self, k: Sequence[int]) -> AlternatingTensor:
        """Tensor-valued coefficient ``w(k)``."""
        row = np.flatnonzero(np.all(self.ks == np.asarray(k), axis=1))
        if len(row) == 0:
            return AlternatingTensor.zeros(self.d, self.r)
        return AlternatingTensor(self.d, self.r, self.coeffs[row[0]].copy())

    def terms(self) -> list[tuple[IndexSet, tuple[int, ...], complex | float]]:
        """Nonzero ``(I, k, c)`` triples in canonical order."""
        sets = index_sets(self.d, self.r)
        out = []
        for m, p in zip(*np.nonzero(self.coeffs)):
            c = self.coeffs[m, p]
            out.append((sets[p], tuple(int(v) for v in self.ks[m]), c.item()))
        return out

    def same_space(self, other: "SpectralForm") -> bool:
        return self.d == other.d and self.r == other.r and np.allclose(self.alpha, other.alpha, rtol=0, atol=0)

    def _require_same(self, other: "SpectralForm") -> None:
        if not self.same_space(other):
            raise InvalidArgument(
                f"spectral forms live in different spaces: (d={self.d}, r={self.r}, alpha={self.alpha}) "
                f"vs (d={other.d}, r={other.r}, alpha={other.alpha})"
            )

    # -- algebra ------------------------------------------------------------

    def with_coeffs(self, coeffs: ArrayLike, r: int | None = None) -> "SpectralForm":
        """Same multi-indices, new coefficient block (optionally of another rank)."""
        return SpectralForm(self.d, self.alpha, self.r if r is None else r, self.ks, coeffs, check=False)

    def scale_rows(self, factors: ArrayLike) -> "SpectralForm":
        f = np.asarray(factors)
        return self.with_coeffs(self.coeffs * f[:, None])

    def __add__(self, other: "SpectralForm") -> "SpectralForm":
        self._require_same(other)
        ks = np.concatenate([self.ks, other.ks])
        coeffs = np.concatenate([self.coeffs, other.coeffs])
        return SpectralForm(self.d, self.alpha, self.r, ks, coeffs, check=False)._merged()

    def __sub__(self, other: "SpectralForm") -> "SpectralForm":
        return self + (-other)

    def __neg__(self) -> "SpectralForm":
        return self.with_coeffs(-self.coeffs)

    def __mul__(self, s) -> "SpectralForm":
        return self.with_coeffs(s * self.coeffs)

    __rmul__ = __mul__

    def _merged(self) -> "SpectralForm":
        ks, coeffs = _canonical(self.ks, self.coeffs)
        return SpectralForm(self.d, self.alpha, self.r, ks, coeffs, check=False)

    def prune(self, tol: float = 0.0) -> "SpectralForm":
        """Drop rows whose coefficients are all at most ``tol`` in modulus."""
        keep = np.any(np.abs(self.coeffs) > tol, axis=1)
        return SpectralForm(self.d, self.alpha, self.r, self.ks[keep], self.coeffs[keep], check=False)

    def inner(self, other: "SpectralForm"):
        """L^2(mu_alpha) inner product via Parseval."""
        self._require_same(other)
        if len(self.ks) == 0 or len(other.ks) == 0:
            return 0.0
        both = _canonical(np.concatenate([self.ks, other.ks]), None)[0]
        a = _align(self, both)
        b = _align(other, both)
        val = np.sum(a * np.conj(b))
        return val.item() if np.iscomplexobj(val) else float(val)

    def norm(self) -> float:
        return parseval_norm(self)

    def max_abs_diff(self, other: "SpectralForm") -> float:
        """Largest coefficient discrepancy between two forms of the same space."""
        diff = (self - other).coeffs
        return float(np.max(np.abs(diff))) if diff.size else 0.0

    def component_rows(self, p: int) -> tuple[NDArray, NDArray]:
        """Multi-indices and coefficients of the p-th index set, nonzero only."""
        col = self.coeffs[:, p]
        live = col != 0
        return self.ks[live], col[live]

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        terms = []
        for I, k, c in self.terms():
            entry = {"I": list(I), "k": list(k)}
            if isinstance(c, complex):
                entry["c"] = float(c.real)
                entry["c_imag"] = float(c.imag)
            else:
                entry["c"] = float(c)
            terms.append(entry)
        return {"d": self.d, "alpha": list(self.alpha), "r": self.r, "terms": terms}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict) -> "SpectralForm":
        try:
            d = int(obj["d"])
            r = int(obj["r"])
            alpha = obj["alpha"]
            triples = []
            for t in obj["terms"]:
                c = float(t["c"])
                if "c_imag" in t:
                    c = complex(c, float(t["c_imag"]))
                triples.append((tuple(int(i) for i in t["I"]), tuple(int(v) for v in t["k"]), c))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgument(f"malformed spectral form JSON: {exc!r}") from None
        for I, k, _ in triples:
            if len(k) != d:
                raise InvalidArgument(f"multi-index {k} does not have {d} entries")
        return cls.from_terms(d, alpha, r, triples)

    def __repr__(self) -> str:
        return f"SpectralForm(d={self.d}, r={self.r}, alpha={self.alpha}, rows={len(self.ks)})"


def _canonical(ks: NDArray, coeffs: NDArray | None):
    """Sort rows lexicographically and merge duplicates."""
    if len(ks) == 0:
        return ks, coeffs
    uniq, inv = np.unique(ks, axis=0, return_inverse=True)
    if coeffs is None:
        return uniq, None
    inv = inv.reshape(-1)
    if len(uniq) == len(ks):
        out = np.empty_like(coeffs)
        out[inv] = coeffs
        return uniq, out
    out = np.zeros((len(uniq), coeffs.shape[1]), dtype=coeffs.dtype)
    np.add.at(out, inv, coeffs)
    return uniq, out


def _align(form: SpectralForm, ks: NDArray) -> NDArray:
    """Coefficients of ``form`` laid out on the (sorted, superset) rows ``ks``."""
    out = np.zeros((len(ks), form.width), dtype=form.coeffs.dtype)
    if len(form.ks):
        idx = _row_lookup(ks, form.ks)
        out[idx] = form.coeffs
    return out


def _row_lookup(table: NDArray, rows: NDArray) -> NDArray[np.intp]:
    keys = {tuple(k): n for n, k in enumerate(table.tolist())}
    return np.fromiter((keys[tuple(k)] for k in rows.tolist()), dtype=np.intp, count=len(rows))


def parseval_norm(form: SpectralForm) -> float:
    """L^2(mu_alpha) norm from the coefficients."""
    return float(np.sqrt(np.sum(np.abs(form.coeffs) ** 2)))


def delta_hat(k: ArrayLike) -> AlternatingTensor:
    """The covector ``sum_j sqrt(k_j) dx_j``."""
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise InvalidIndex("multi-index entries must be nonnegative")
    return AlternatingTensor(len(k), 1, np.sqrt(k))


# ---------------------------------------------------------------------------
# evaluation


class FormEvaluator:
    """Per-axis basis tables at a fixed set of points.

    ``matrix(I, deriv)`` returns the values of ``ell_k^{alpha,I}`` (or of its
    Laguerre derivative along axis ``deriv``, one-based) for every row of
    ``ks`` at every point, shape ``(n_points, n_rows)``.
    """

    def __init__(self, alpha: Sequence[float], n: int, points: ArrayLike):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != len(alpha):
            raise InvalidArgument(f"points must have shape (n, {len(alpha)})")
        self.alpha = tuple(alpha)
        self.n = int(n)
        self.points = pts
        self._plain, self._diff, self._d_plain, self._d_diff = [], [], [], []
        for i, a in enumerate(alpha):
            x = pts[:, i]
            e = i_basis_table(a, n, x)
            self._plain.append(normalized_table(a, n, x))
            self._diff.append(e)
            self._d_plain.append(np.sqrt(np.arange(n + 1)) * e)
            self._d_diff.append(delta_i_basis_table(a, n, x))

    def matrix(self, I: Sequence[int], ks: NDArray, deriv: int | None = None) -> NDArray:
        members = set(I)
        out = np.ones((self.points.shape[0], len(ks)))
        for i in range(len(self.alpha)):
            axis = i + 1
            if axis == deriv:
                table = self._d_diff[i] if axis in members else self._d_plain[i]
            else:
                table = self._diff[i] if axis in members else self._plain[i]
            out *= table[:, ks[:, i]]
        return out

    def gradient_matrices(self, I: Sequence[int], ks: NDArray) -> list[NDArray]:
        """``[matrix(I, ks), matrix(I, ks, 1), ..., matrix(I, ks, d)]`` sharing the per-axis gathers."""
        members = set(I)
        d = len(self.alpha)
        vals, ders = [], []
        for i in range(d):
            inside = (i + 1) in members
            vals.append((self._diff if inside else self._plain)[i][:, ks[:, i]])
            ders.append((self._d_diff if inside else self._d_plain)[i][:, ks[:, i]])
        # prefix[i] = prod_{m<i} vals[m], suffix[i] = prod_{m>i} vals[m]
        prefix = [np.ones((self.points.shape[0], len(ks)))]
        for i in range(d - 1):
            prefix.append(prefix[-1] * vals[i])
        suffix = [None] * d
        suffix[d - 1] = np.ones_like(prefix[0])
        for i in range(d - 2, -1, -1):
            suffix[i] = suffix[i + 1] * vals[i + 1]
        out = [prefix[d - 1] * vals[d - 1]]
        out.extend(prefix[i] * ders[i] * suffix[i] for i in range(d))
        return out

    def axis_bounds(self) -> NDArray:
        """Per point and axis, the largest ``|value|`` over every table and degree, shape ``(n, d)``."""
        cols = []
        for tabs in zip(self._plain, self._diff, self._d_plain, self._d_diff):
            cols.append(np.max(np.abs(np.concatenate(tabs, axis=1)), axis=1))
        return np.stack(cols, axis=1)

    def values(self, form: SpectralForm, deriv: int | None = None) -> NDArray:
        """Form components (or one Laguerre derivative of them) at the points."""
        out = np.zeros((self.points.shape[0], form.width), dtype=form.coeffs.dtype)
        for p, I in enumerate(index_sets(form.d, form.r)):
            ks, c = form.component_rows(p)
            if len(ks):
                out[:, p] = self.matrix(I, ks, deriv) @ c
        return out


def basis_function(spec: BasisSpec | tuple, I: Sequence[int], k: Sequence[int], x: ArrayLike) -> float:
    """``ell_k^{alpha,I}(x)`` at a single interior point."""
    alpha = spec.alpha if isinstance(spec, BasisSpec) else _alpha_tuple(spec, len(k))
    k = np.asarray(k, dtype=np.int64)
    I = tuple(I)
    if len(alpha) != len(k):
        raise InvalidIndex("multi-index length does not match dimension")
    if any(k[i - 1] < 1 for i in I):
        raise InvalidIndex(f"k={k.tolist()} is not admissible for I={I}")
    ev = FormEvaluator(alpha, int(k.max(initial=0)), np.asarray(x, dtype=float).reshape(1, -1))
    return float(ev.matrix(I, k.reshape(1, -1))[0, 0])


def synthesize_values(form: SpectralForm, points: ArrayLike) -> NDArray:
    """Form values at many points, shape ``(n_points, C(d, r))``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = max(form.degree(), 0)
    return FormEvaluator(form.alpha, n, pts).values(form)


def synthesize(form: SpectralForm, x: ArrayLike) -> AlternatingTensor:
    """The finite sum ``sum w(I, k) ell_k^{alpha,I}(x) dx_I`` at one point."""
    vals = synthesize_values(form, np.asarray(x, dtype=float).reshape(1, -1))
    return AlternatingTensor(form.d, form.r, vals[0])


# ---------------------------------------------------------------------------
# analysis


def tensor_grid(rules: Sequence[QuadratureRule]) -> tuple[NDArray, NDArray]:
    """Points ``(prod M_i, d)`` and product weights of a tensor rule, C order."""
    mesh = np.meshgrid(*[r.nodes for r in rules], indexing="ij")
    wmesh = np.meshgrid(*[r.weights for r in rules], indexing="ij")
    pts = np.stack([m.reshape(-1) for m in mesh], axis=1)
    w = np.prod(np.stack([m.reshape(-1) for m in wmesh], axis=1), axis=1)
    return pts, w


def default_rules(alpha: Sequence[float], degree_cap: int, form_degree: int | None = None) -> list[QuadratureRule]:
    """Per-axis Gauss rules of order ``(N + form degree)/2 + 2``."""
    fd = degree_cap if form_degree is None else form_degree
    m = int(np.ceil((degree_cap + fd) / 2)) + 2
    return [gauss_laguerre_rule(a, m) for a in alpha]


class PolynomialForm:
    """Form whose components are sums of monomials ``c * prod x_i**e_i``.

    Exponents may be half-integers so that the square-root factors of the
    differential axes can be represented exactly.

    ``terms`` maps an index set to a list of ``(c, exponents)`` pairs.
    """

    def __init__(self, d: int, r: int, terms: dict):
        self.d = int(d)
        self.r = int(r)
        self.terms = {}
        for I, monos in terms.items():
            I = tuple(I)
            index_position(self.d, I)
            if len(I) != self.r:
                raise InvalidArgument(f"index set {I} does not have rank {self.r}")
            clean = []
            for c, e in monos:
                e = np.asarray(e, dtype=float)
                if e.shape != (self.d,) or np.any(e < 0) or np.any(2 * e != np.round(2 * e)):
                    raise InvalidArgument(f"exponents must be {self.d} nonnegative half-integers, got {e}")
                clean.append((float(c), e))
            self.terms[I] = clean

    @property
    def degree(self) -> int:
        deg = [float(np.sum(np.ceil(e))) for monos in self.terms.values() for _, e in monos]
        return int(max(deg, default=0))

    def __call__(self, points: ArrayLike) -> NDArray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros((pts.shape[0], len(index_sets(self.d, self.r))))
        for I, monos in self.terms.items():
            p = index_position(self.d, I)
            for c, e in monos:
                out[:, p] += c * np.prod(pts ** e, axis=1)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "PolynomialForm":
        """``{"d", "r", "components": [{"I": [...], "monomials": [{"c", "powers"}]}]}``."""
        try:
            terms = {}
            for comp in obj["components"]:
                I = tuple(int(i) for i in comp["I"])
                terms.setdefault(I, []).extend((m["c"], m["powers"]) for m in comp["monomials"])
            return cls(int(obj["d"]), int(obj["r"]), terms)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgument(f"malformed polynomial form JSON: {exc!r}") from None


def analyze(
    f: Callable[[NDArray], NDArray] | PolynomialForm,
    spec: BasisSpec,
    rules: Sequence[QuadratureRule] | None = None,
) -> SpectralForm:
    """Fourier-Laguerre coefficients of ``f`` up to ``|k| <= N``.

    ``f`` maps points ``(n, d)`` to component values ``(n, C(d, r))``.  The
    inner products are evaluated with a tensor Gauss rule, exact whenever the
    integrands are polynomials of covered degree.
    """
    d, r, n = spec.d, spec.r, spec.degree_cap
    if isinstance(f, PolynomialForm):
        if f.d != d or f.r != r:
            raise InvalidArgument(f"form has (d={f.d}, r={f.r}) but spec has (d={d}, r={r})")
        if rules is None:
            rules = default_rules(spec.alpha, n, f.degree)
    if rules is None:
        rules = default_rules(spec.alpha, n)
    if len(rules) != d:
        raise InvalidArgument(f"need {d} quadrature rules, got {len(rules)}")
    for rule, a in zip(rules, spec.alpha):
        if rule.alpha != a:
            raise InvalidArgument(f"quadrature rule for alpha={rule.alpha} used on an axis with alpha={a}")
    # nodes whose weight underflowed carry nothing, and the polynomial values
    # there can overflow (inf * 0 would poison the sums)
    rules = [
        QuadratureRule(rule.alpha, rule.nodes[rule.weights > 0], rule.weights[rule.weights > 0], rule.exact_degree)
        for rule in rules
    ]
    pts, w = tensor_grid(rules)
    vals = np.asarray(f(pts))
    sets = index_sets(d, r)
    if vals.shape != (pts.shape[0], len(sets)):
        raise InvalidArgument(f"form values must have shape {(pts.shape[0], len(sets))}, got {vals.shape}")
    plain = [normalized_table(a, n, rule.nodes) for a, rule in zip(spec.alpha, rules)]
    diff = [i_basis_table(a, n, rule.nodes) for a, rule in zip(spec.alpha, rules)]
    ks = multi_indices(d, n)
    shape = tuple(rule.size for rule in rules)
    out = np.zeros((len(ks), len(sets)), dtype=vals.dtype if vals.dtype.kind == "c" else float)
    for p, I in enumerate(sets):
        grid = (vals[:, p] * w).reshape(shape)
        for i in range(d):
            table = diff[i] if (i + 1) in I else plain[i]
            # contract axis i of the grid against the basis values on that axis
            grid = np.tensordot(grid, table, axes=([0], [0]))
        # after d contractions the axes are ordered (k_1, ..., k_d)
        out[:, p] = grid[tuple(ks.T)]
    out[~admissible_mask(d, r, ks)] = 0.0
    return SpectralForm(d, spec.alpha, r, ks, out, check=False).prune(0.0)


def quadrature_norm(form: SpectralForm, rules: Sequence[QuadratureRule] | None = None, p: float = 2.0) -> float:
    """``(int |w(x)|^p dmu)^(1/p)`` by tensor quadrature of synthesized values."""
    if rules is None:
        n = max(form.degree(), 0)
        rules = default_rules(form.alpha, n)
    pts, w = tensor_grid(rules)
    vals = synthesize_values(form, pts)
    mod = np.sqrt(np.sum(np.abs(vals) ** 2, axis=1))
    return float(np.sum(w * mod ** p) ** (1.0 / p))


# ---------------------------------------------------------------------------
# random forms


def random_form(
    d: int,
    alpha,
    r: int,
    degree_cap: int,
    rng: np.random.Generator,
    *,
    min_degree: int = 0,
    density: float = 1.0,
) -> SpectralForm:
    """I.i.d. standard normal coefficients on every admissible ``(I, k)``.

    ``min_degree`` drops rows with ``|k| < min_degree``; ``density`` keeps
    each admissible slot with that probability.
    """
    if degree_cap < 0:
        return SpectralForm.zero(d, alpha, r)
    ks = multi_indices(d, degree_cap)
    ks = ks[ks.sum(axis=1) >= min_degree]
    width = len(index_sets(d, r))
    coeffs = rng.standard_normal((len(ks), width))
    mask = admissible_mask(d, r, ks)
    if density < 1.0:
        mask &= rng.random(mask.shape) < density
    coeffs[~mask] = 0.0
    return SpectralForm(d, alpha, r, ks, coeffs, check=False).prune(0.0)
