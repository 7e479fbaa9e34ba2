"""Operators of the Hodge-Laguerre calculus acting on Fourier-Laguerre coefficients.

On coefficients every operator is explicit:

* the differential ``delta`` is left wedge with ``delta_hat(k) = sum sqrt(k_j) dx_j``,
* its adjoint is interior multiplication by the same covector,
* the Hodge-Laguerre operator multiplies the coefficient at ``k`` by ``|k|``,

and any function ``m`` of the operator multiplies by ``m(|k|)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidArgument, InvalidInput, InvalidMultiplier, InvalidParameter, InvalidShift
from .exterior_algebra import index_sets, interior_table, wedge_table
from .fourier_laguerre import SpectralForm

__all__ = [
    "apply_delta",
    "apply_delta_star",
    "apply_laplacian",
    "apply_multiplier",
    "heat",
    "poisson",
    "riesz",
    "riesz_star",
    "inverse_power",
    "MultiplierSpec",
    "SobolevSector",
    "sector_norm_estimate",
    "translated_sector_norm_estimate",
]


def _covector_action(form: SpectralForm, table, new_rank: int) -> SpectralForm:
    src, axis, dst, sign = table
    width = len(index_sets(form.d, new_rank))
    out = np.zeros((len(form.ks), width), dtype=form.coeffs.dtype)
    if len(dst) and len(form.ks):
        root_k = np.sqrt(form.ks.astype(float))
        contrib = sign * root_k[:, axis] * form.coeffs[:, src]
        np.add.at(out, (slice(None), dst), contrib)
    return form.with_coeffs(out, r=new_rank)


def apply_delta(form: SpectralForm) -> SpectralForm:
    """Laguerre differential: ``w(k) -> delta_hat(k) ^ w(k)``."""
    return _covector_action(form, wedge_table(form.d, form.r), form.r + 1)


def apply_delta_star(form: SpectralForm) -> SpectralForm:
    """Adjoint differential: ``w(k) -> iota_{delta_hat(k)} w(k)``.  Rank 0 maps to the empty rank -1 space."""
    if form.r <= 0:
        return SpectralForm.zero(form.d, form.alpha, form.r - 1)
    return _covector_action(form, interior_table(form.d, form.r), form.r - 1)


def apply_laplacian(form: SpectralForm) -> SpectralForm:
    """Hodge-Laguerre operator: multiply the coefficient at ``k`` by ``|k|``."""
    return form.scale_rows(form.eigenvalues.astype(float))


# ---------------------------------------------------------------------------
# shifts and functional calculus


def _live(form: SpectralForm) -> SpectralForm:
    return form.prune(0.0)


def _min_eigenvalue(form: SpectralForm) -> float:
    ev = form.occurring_eigenvalues()
    return float(ev.min()) if len(ev) else math.inf


def _require_shift_below(form: SpectralForm, rho: float, strict: bool, what: str) -> None:
    lowest = _min_eigenvalue(form)
    bad = rho >= lowest if strict else rho > lowest
    if bad:
        rel = "<" if strict else "<="
        raise InvalidShift(f"{what} needs shift {rho} {rel} smallest occurring eigenvalue {lowest:g}")


def heat(t: float, rho: float, form: SpectralForm) -> SpectralForm:
    """Shifted heat semigroup: multiply by ``exp(-t(|k| - rho))``."""
    if t < 0:
        raise InvalidParameter("time must be nonnegative")
    return form.scale_rows(np.exp(-t * (form.eigenvalues - rho)))


def poisson(t: float, rho: float, form: SpectralForm) -> SpectralForm:
    """Shifted Poisson semigroup: multiply by ``exp(-t sqrt(|k| - rho))``."""
    if t < 0:
        raise InvalidParameter("time must be nonnegative")
    form = _live(form)
    _require_shift_below(form, rho, strict=False, what="Poisson semigroup")
    return form.scale_rows(np.exp(-t * np.sqrt(form.eigenvalues - rho)))


def inverse_power(s: float, rho: float, form: SpectralForm) -> SpectralForm:
    """``(L - rho)^(-s)``: multiply by ``(|k| - rho)^(-s)``."""
    if not s > 0:
        raise InvalidParameter("exponent must be positive")
    form = _live(form)
    _require_shift_below(form, rho, strict=True, what="negative power")
    return form.scale_rows((form.eigenvalues - rho) ** (-float(s)))


def _check_constant_free(form: SpectralForm, rho: float) -> None:
    if form.r == 0 and rho == 0:
        const = np.all(form.ks == 0, axis=1)
        if np.any(form.coeffs[const] != 0):
            raise InvalidInput("Riesz transform at shift 0 is only defined on 0-forms without constant part")


def riesz(rho: float, form: SpectralForm) -> SpectralForm:
    """Shifted Riesz transform ``delta (L - rho)^(-1/2)`` (raises rank by one)."""
    form = _live(form)
    _check_constant_free(form, rho)
    if len(form.ks) == 0:
        return apply_delta(form)
    _require_shift_below(form, rho, strict=True, what="Riesz transform")
    return apply_delta(form.scale_rows((form.eigenvalues - rho) ** -0.5))


def riesz_star(rho: float, form: SpectralForm) -> SpectralForm:
    """Adjoint Riesz transform ``delta^* (L - rho)^(-1/2)`` (lowers rank by one).

    The differential commutes with the operator, so the order of the two
    factors is immaterial.
    """
    form = _live(form)
    _check_constant_free(form, rho)
    if len(form.ks) == 0:
        return apply_delta_star(form)
    _require_shift_below(form, rho, strict=True, what="adjoint Riesz transform")
    return apply_delta_star(form.scale_rows((form.eigenvalues - rho) ** -0.5))


_KINDS = ("heat", "poisson", "riesz", "riesz-star", "power", "table")


@dataclass
class MultiplierSpec:
    """Spectral multiplier ``m(n)`` with a shift.

    ``kind`` selects the family: ``heat`` and ``poisson`` take ``params["t"]``,
    ``power`` takes ``params["s"]``, ``riesz`` / ``riesz-star`` take nothing,
    and ``table`` reads ``table = [[n, re, im], ...]``.
    """

    rho: float = 0.0
    kind: str = "table"
    params: dict = field(default_factory=dict)
    table: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidMultiplier(f"unknown multiplier kind {self.kind!r}; expected one of {_KINDS}")
        self.rho = float(self.rho)
        if self.kind in ("heat", "poisson") and "t" not in self.params:
            raise InvalidMultiplier(f"{self.kind} multiplier needs params['t']")
        if self.kind == "power" and "s" not in self.params:
            raise InvalidMultiplier("power multiplier needs params['s']")
        self._lookup = {}
        for row in self.table:
            if len(row) not in (2, 3):
                raise InvalidMultiplier(f"table rows are [n, re] or [n, re, im], got {row}")
            n = int(row[0])
            val = complex(row[1], row[2]) if len(row) == 3 else float(row[1])
            self._lookup[n] = val

    @classmethod
    def from_function(cls, fn: Callable[[int], complex], ns, rho: float = 0.0) -> "MultiplierSpec":
        rows = []
        for n in ns:
            v = complex(fn(int(n)))
            rows.append([int(n), v.real, v.imag])
        return cls(rho=rho, kind="table", table=rows)

    def values(self, n: ArrayLike) -> NDArray:
        n = np.asarray(n)
        shifted = n - self.rho
        if self.kind == "heat":
            return np.exp(-float(self.params["t"]) * shifted)
        if self.kind == "poisson":
            if np.any(shifted < 0):
                raise InvalidShift("Poisson multiplier needs n >= rho")
            return np.exp(-float(self.params["t"]) * np.sqrt(shifted))
        if self.kind == "power":
            if np.any(shifted <= 0):
                raise InvalidShift("power multiplier needs n > rho")
            return shifted ** (-float(self.params["s"]))
        if self.kind in ("riesz", "riesz-star"):
            if np.any(shifted <= 0):
                raise InvalidShift("Riesz multiplier needs n > rho")
            return shifted ** -0.5
        missing = sorted({int(v) for v in n.reshape(-1)} - set(self._lookup))
        if missing:
            raise InvalidMultiplier(f"multiplier table has no value at n = {missing}")
        vals = [self._lookup[int(v)] for v in n.reshape(-1)]
        out = np.asarray(vals, dtype=complex).reshape(n.shape)
        return out if np.any(out.imag != 0) else out.real.copy()

    def sup_abs(self, ns: ArrayLike) -> float:
        return float(np.max(np.abs(self.values(np.asarray(ns)))))

    def to_json(self) -> dict:
        out = {"rho": self.rho, "kind": self.kind, "params": dict(self.params)}
        if self.kind == "table":
            out["table"] = [list(map(float, row)) for row in self.table]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "MultiplierSpec":
        try:
            return cls(
                rho=float(obj.get("rho", 0.0)),
                kind=str(obj["kind"]),
                params=dict(obj.get("params", {})),
                table=list(obj.get("table", [])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidMultiplier(f"malformed multiplier JSON: {exc!r}") from None


def apply_multiplier(spec: MultiplierSpec, form: SpectralForm) -> SpectralForm:
    """``m(L) form``; values are only required at occurring eigenvalues."""
    if spec.kind == "riesz":
        return riesz(spec.rho, form)
    if spec.kind == "riesz-star":
        return riesz_star(spec.rho, form)
    form = _live(form)
    if len(form.ks) == 0:
        return form
    return form.scale_rows(spec.values(form.eigenvalues))


# ---------------------------------------------------------------------------
# sector norms (numerical estimate only)


@dataclass(frozen=True)
class SobolevSector:
    """Exponent ``p``, its critical angle ``arcsin|2/p - 1|`` and smoothness ``J``."""

    p: float
    J: float

    def __post_init__(self):
        if not 1 < self.p < math.inf:
            raise InvalidParameter("p must lie in (1, inf)")
        if self.J <= 0:
            raise InvalidParameter("smoothness order must be positive")

    @property
    def phi_star(self) -> float:
        return math.asin(abs(2.0 / self.p - 1.0))

    @property
    def admissible(self) -> bool:
        """Whether the smoothness exceeds the 3/2 threshold of the multiplier theorem."""
        return self.J > 1.5


def _window(lam: NDArray) -> NDArray:
    """Smooth bump equal to 1 on [1/2, 2] and supported in [1/4, 4] (in log scale)."""

    def h(s):
        out = np.zeros_like(s)
        pos = s > 0
        out[pos] = np.exp(-1.0 / s[pos])
        return out

    u = np.log2(np.clip(lam, 1e-300, None))
    # ramp from 0 at |u| = 2 to 1 at |u| = 1
    s = 2.0 - np.abs(u)
    return h(s) / (h(s) + h(1.0 - s))


def _sobolev_norm(values: NDArray, step: float, J: float) -> float:
    n = len(values)
    pad = 8 * n
    spec = np.fft.fft(values, n=pad) * step
    xi = 2 * np.pi * np.fft.fftfreq(pad, d=step)
    dxi = 2 * np.pi / (pad * step)
    return float(np.sqrt(np.sum((1 + xi ** 2) ** J * np.abs(spec) ** 2) * dxi / (2 * np.pi)))


def sector_norm_estimate(
    m: Callable[[NDArray], NDArray],
    theta: float,
    J: float,
    dilations: ArrayLike | None = None,
    samples: int = 512,
) -> float:
    """Sampled estimate of ``sup_r ||psi D_r m_+||_{H^J} + sup_r ||psi D_r m_-||_{H^J}``.

    The sup is taken over the finite set ``dilations`` and the Sobolev norm
    is computed by FFT, so this is a numerical estimate, not a bound.
    """
    if dilations is None:
        dilations = np.geomspace(1e-2, 1e3, 41)
    lam = np.linspace(0.25, 4.0, samples)
    step = lam[1] - lam[0]
    win = _window(lam)
    total = 0.0
    for sgn in (+1, -1):
        best = 0.0
        for r in np.asarray(dilations, dtype=float):
            z = r * lam * np.exp(1j * sgn * theta)
            g = win * np.asarray(m(z), dtype=complex)
            best = max(best, _sobolev_norm(g, step, J))
        total += best
    return total


def translated_sector_norm_estimate(
    m: Callable[[NDArray], NDArray], shift: float, sector: SobolevSector, **kwargs
) -> float:
    """Sector norm estimate of ``z -> m(z + shift)`` at the critical angle of ``sector``."""
    return sector_norm_estimate(lambda z: m(z + shift), sector.phi_star, sector.J, **kwargs)
