"""Alternating tensors over R^d with the Euclidean inner product.

Index sets are tuples of strictly increasing axis labels in ``1..d``.  A rank
``r`` tensor stores ``C(d, r)`` coefficients in lexicographic order of its
index sets.  Ranks outside ``[0, d]`` are the zero space: such tensors have
an empty coefficient vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidArgument

IndexSet = tuple[int, ...]

MAX_DIM = 16

__all__ = [
    "IndexSet",
    "AlternatingTensor",
    "index_sets",
    "index_position",
    "sigma",
    "wedge",
    "interior",
    "hodge_star",
    "bracket",
    "inner",
    "basis_tensor",
    "wedge_table",
    "interior_table",
]


def _check_dim(d: int) -> int:
    if int(d) != d or d < 0 or d > MAX_DIM:
        raise InvalidArgument(f"dimension must be an integer in [0, {MAX_DIM}], got {d}")
    return int(d)


@lru_cache(maxsize=None)
def index_sets(d: int, r: int) -> tuple[IndexSet, ...]:
    """All rank-r index sets in lexicographic order (empty outside [0, d])."""
    _check_dim(d)
    if r < 0 or r > d:
        return ()
    return tuple(combinations(range(1, d + 1), r))


@lru_cache(maxsize=None)
def _position_map(d: int, r: int) -> dict[IndexSet, int]:
    return {I: n for n, I in enumerate(index_sets(d, r))}


def index_position(d: int, I: Sequence[int]) -> int:
    """Position of ``I`` in the lexicographic layout of its rank."""
    key = tuple(I)
    try:
        return _position_map(d, len(key))[key]
    except KeyError:
        raise InvalidArgument(f"{key} is not a strictly increasing subset of 1..{d}") from None


def sigma(j: int, I: Sequence[int]) -> int:
    """Number of entries of ``I`` strictly smaller than ``j``."""
    return sum(1 for i in I if i < j)


def _dim_of(d: int, r: int) -> int:
    return comb(d, r) if 0 <= r <= d else 0


@dataclass(frozen=True, eq=False)
class AlternatingTensor:
    """Rank-r alternating tensor on R^d in the orthonormal ``dx_I`` basis."""

    d: int
    r: int
    coeffs: NDArray

    def __post_init__(self):
        _check_dim(self.d)
        c = np.asarray(self.coeffs)
        if c.dtype.kind not in "fc":
            c = c.astype(float)
        if c.shape != (_dim_of(self.d, self.r),):
            raise InvalidArgument(
                f"rank {self.r} tensor on R^{self.d} needs {_dim_of(self.d, self.r)} coefficients, got {c.shape}"
            )
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, d: int, r: int) -> "AlternatingTensor":
        return cls(d, r, np.zeros(_dim_of(d, r)))

    @classmethod
    def from_dict(cls, d: int, r: int, terms: dict) -> "AlternatingTensor":
        c = np.zeros(_dim_of(d, r))
        for I, v in terms.items():
            c[index_position(d, I)] += v
        return cls(d, r, c)

    @property
    def is_empty_space(self) -> bool:
        return not (0 <= self.r <= self.d)

    def component(self, I: Sequence[int]) -> float:
        return self.coeffs[index_position(self.d, I)]

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def __add__(self, other: "AlternatingTensor") -> "AlternatingTensor":
        _same_space(self, other)
        return AlternatingTensor(self.d, self.r, self.coeffs + other.coeffs)

    def __sub__(self, other: "AlternatingTensor") -> "AlternatingTensor":
        _same_space(self, other)
        return AlternatingTensor(self.d, self.r, self.coeffs - other.coeffs)

    def __mul__(self, s: float) -> "AlternatingTensor":
        return AlternatingTensor(self.d, self.r, s * self.coeffs)

    __rmul__ = __mul__

    def __neg__(self) -> "AlternatingTensor":
        return AlternatingTensor(self.d, self.r, -self.coeffs)

    def allclose(self, other: "AlternatingTensor", atol: float = 1e-12) -> bool:
        _same_space(self, other)
        return bool(np.all(np.abs(self.coeffs - other.coeffs) <= atol))

    def to_json(self) -> dict:
        return {"d": self.d, "r": self.r, "coeffs": [float(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "AlternatingTensor":
        try:
            return cls(int(obj["d"]), int(obj["r"]), np.asarray(obj["coeffs"], dtype=float))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgument(f"malformed tensor JSON: {exc}") from None

    def __repr__(self) -> str:
        terms = [f"{c:+g} dx{''.join(map(str, I))}" for c, I in zip(self.coeffs, index_sets(self.d, self.r)) if c != 0]
        return f"AlternatingTensor(d={self.d}, r={self.r}: {' '.join(terms) or '0'})"


def _same_space(a: AlternatingTensor, b: AlternatingTensor) -> None:
    if a.d != b.d or a.r != b.r:
        raise InvalidArgument(f"tensor spaces differ: (d={a.d}, r={a.r}) vs (d={b.d}, r={b.r})")


def basis_tensor(d: int, I: Sequence[int]) -> AlternatingTensor:
    """The coordinate tensor ``dx_I``."""
    return AlternatingTensor.from_dict(d, len(tuple(I)), {tuple(I): 1.0})


@lru_cache(maxsize=None)
def _merge_table(d: int, r: int, s: int):
    """Sparse structure of the wedge of rank r and rank s basis elements.

    Returns integer arrays (left, right, out, sign).
    """
    left, right, out, sign = [], [], [], []
    if r + s <= d and 0 <= r and 0 <= s:
        pos = _position_map(d, r + s)
        for a, I in enumerate(index_sets(d, r)):
            for b, J in enumerate(index_sets(d, s)):
                if set(I) & set(J):
                    continue
                # sign of the shuffle that sorts I followed by J
                inversions = sum(1 for i in I for j in J if i > j)
                left.append(a)
                right.append(b)
                out.append(pos[tuple(sorted(I + J))])
                sign.append(-1.0 if inversions % 2 else 1.0)
    as_int = lambda v: np.asarray(v, dtype=np.intp)
    return as_int(left), as_int(right), as_int(out), np.asarray(sign)


@lru_cache(maxsize=None)
def wedge_table(d: int, r: int):
    """Structure of ``dx_j ^ dx_I`` for rank-r ``I``.

    Returns (src, axis, dst, sign) with ``axis`` zero-based, so that
    ``(phi ^ w)[dst] += sign * phi[axis] * w[src]``.
    """
    left, right, out, sign = _merge_table(d, 1, r)
    return right, left, out, sign


@lru_cache(maxsize=None)
def interior_table(d: int, r: int):
    """Structure of ``iota_{dx_j} dx_I`` for rank-r ``I``.

    Returns (src, axis, dst, sign): ``(iota_phi w)[dst] += sign * phi[axis] * w[src]``.
    Interior multiplication is the transpose of left wedge by ``dx_j``.
    """
    src, axis, dst, sign = wedge_table(d, r - 1) if r >= 1 else (np.empty(0, np.intp),) * 3 + (np.empty(0),)
    return dst, axis, src, sign


def wedge(omega: AlternatingTensor, eta: AlternatingTensor) -> AlternatingTensor:
    """Exterior product; the result of rank ``r + s`` is the empty space when ``r + s > d``."""
    if omega.d != eta.d:
        raise InvalidArgument("wedge of tensors on different spaces")
    d, r, s = omega.d, omega.r, eta.r
    out = np.zeros(_dim_of(d, r + s), dtype=np.result_type(omega.coeffs, eta.coeffs))
    left, right, pos, sign = _merge_table(d, r, s)
    if len(pos):
        np.add.at(out, pos, sign * omega.coeffs[left] * eta.coeffs[right])
    return AlternatingTensor(d, r + s, out)


def interior(phi: AlternatingTensor, omega: AlternatingTensor) -> AlternatingTensor:
    """Interior product by a covector; rank-0 input maps to the empty rank -1 space."""
    if phi.r != 1:
        raise InvalidArgument("interior product needs a rank-1 tensor")
    if phi.d != omega.d:
        raise InvalidArgument("interior product of tensors on different spaces")
    d, r = omega.d, omega.r
    if r <= 0:
        return AlternatingTensor.zeros(d, r - 1)
    out = np.zeros(_dim_of(d, r - 1), dtype=np.result_type(phi.coeffs, omega.coeffs))
    src, axis, dst, sign = interior_table(d, r)
    np.add.at(out, dst, sign * phi.coeffs[axis] * omega.coeffs[src])
    return AlternatingTensor(d, r - 1, out)


def hodge_star(omega: AlternatingTensor) -> AlternatingTensor:
    """Hodge star, characterised by ``w ^ *v = <w, v> dx_{1..d}``."""
    d, r = omega.d, omega.r
    if not 0 <= r <= d:
        raise InvalidArgument(f"rank {r} outside [0, {d}]")
    left, right, pos, sign = _merge_table(d, r, d - r)
    out = np.zeros(_dim_of(d, d - r), dtype=omega.coeffs.dtype)
    # dx_I ^ dx_{I^c} = sign * vol, hence *dx_I = sign * dx_{I^c}
    out[right] = sign * omega.coeffs[left]
    return AlternatingTensor(d, d - r, out)


def inner(omega: AlternatingTensor, eta: AlternatingTensor) -> float:
    _same_space(omega, eta)
    return float(np.dot(omega.coeffs, eta.coeffs))


def bracket(omega: AlternatingTensor, eta: AlternatingTensor) -> AlternatingTensor:
    """Componentwise product in the ``dx_I`` basis."""
    if omega.d != eta.d or omega.r != eta.r:
        raise InvalidArgument("bracket needs tensors of equal dimension and rank")
    return AlternatingTensor(omega.d, omega.r, omega.coeffs * eta.coeffs)


def covector(values: ArrayLike) -> AlternatingTensor:
    """Rank-1 tensor with the given components."""
    v = np.asarray(values, dtype=float)
    return AlternatingTensor(len(v), 1, v)
