"""Hodge decomposition and the Hodge / de Rham solvers on coefficients.

With ``L`` the Hodge-Laguerre operator, every form splits as

    w = delta delta^* L^{-1} w  +  delta^* delta L^{-1} w  (+ constant if r = 0),

the first term exact, the second coexact.  Only 0-forms have a harmonic
part: the constant coefficient, on which ``L`` is not invertible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleInput, InvalidArgument
from .fourier_laguerre import SpectralForm
from .spectral_operators import apply_delta, apply_delta_star

__all__ = [
    "HodgeSplit",
    "split_constant",
    "inverse_laplacian",
    "decompose",
    "exact_projection",
    "coexact_projection",
    "solve_hodge_system",
    "solve_derham",
    "FEASIBILITY_TOL",
]

FEASIBILITY_TOL = 1e-10


@dataclass
class HodgeSplit:
    exact_part: SpectralForm
    coexact_part: SpectralForm
    harmonic_part: SpectralForm

    def total(self) -> SpectralForm:
        return self.exact_part + self.coexact_part + self.harmonic_part


def split_constant(form: SpectralForm) -> tuple[SpectralForm, SpectralForm]:
    """Separate the ``k = 0`` row of a 0-form; returns (constant, rest)."""
    const_rows = np.all(form.ks == 0, axis=1)
    if form.r != 0 or not np.any(const_rows):
        return SpectralForm.zero(form.d, form.alpha, form.r), form
    const = SpectralForm(form.d, form.alpha, 0, form.ks[const_rows], form.coeffs[const_rows], check=False)
    rest = SpectralForm(form.d, form.alpha, 0, form.ks[~const_rows], form.coeffs[~const_rows], check=False)
    return const, rest


def inverse_laplacian(form: SpectralForm) -> SpectralForm:
    """``L^{-1}`` on forms without a constant part."""
    form = form.prune(0.0)
    ev = form.eigenvalues
    if np.any(ev == 0):
        raise InvalidArgument("inverse operator is undefined on constants; split them off first")
    return form.scale_rows(1.0 / ev)


def exact_projection(form: SpectralForm) -> SpectralForm:
    """``delta delta^* L^{-1}`` (zero on constants)."""
    _, rest = split_constant(form)
    return apply_delta(apply_delta_star(inverse_laplacian(rest)))


def coexact_projection(form: SpectralForm) -> SpectralForm:
    """``delta^* delta L^{-1}`` (zero on constants)."""
    _, rest = split_constant(form)
    return apply_delta_star(apply_delta(inverse_laplacian(rest)))


def decompose(form: SpectralForm) -> HodgeSplit:
    """Split into exact, coexact and harmonic parts."""
    harmonic, rest = split_constant(form)
    inv = inverse_laplacian(rest)
    exact = apply_delta(apply_delta_star(inv))
    coexact = apply_delta_star(apply_delta(inv))
    return HodgeSplit(exact_part=exact, coexact_part=coexact, harmonic_part=harmonic)


def _check_closed(phi: SpectralForm, tol: float) -> None:
    res = apply_delta(phi).norm()
    if res > tol:
        raise InfeasibleInput(f"right-hand side is not closed: ||delta phi|| = {res:.3e} > {tol:g}", res)


def _check_coclosed(psi: SpectralForm, tol: float) -> None:
    res = apply_delta_star(psi).norm()
    if psi.r == 0:
        const, _ = split_constant(psi)
        res = max(res, const.norm())
    if res > tol:
        raise InfeasibleInput(
            f"right-hand side is not co-closed (or has a constant part): residual {res:.3e} > {tol:g}", res
        )


def solve_hodge_system(
    phi: SpectralForm | None,
    psi: SpectralForm | None,
    r: int | None = None,
    tol: float = FEASIBILITY_TOL,
) -> SpectralForm:
    """Solve ``delta w = phi``, ``delta^* w = psi`` for an r-form ``w``.

    ``phi`` has rank ``r + 1`` and must be closed; ``psi`` has rank ``r - 1``
    and must be co-closed.  Either may be ``None`` (zero).  The solution is
    ``delta^* L^{-1} phi + delta L^{-1} psi``.
    """
    ranks = set()
    if phi is not None:
        ranks.add(phi.r - 1)
    if psi is not None:
        ranks.add(psi.r + 1)
    if r is not None:
        ranks.add(r)
    if len(ranks) != 1:
        raise InvalidArgument(f"inconsistent ranks for the Hodge system: {sorted(ranks)}")
    r = ranks.pop()
    ref = phi if phi is not None else psi
    if ref is None:
        raise InvalidArgument("need at least one right-hand side to fix the space")
    d, alpha = ref.d, ref.alpha
    if phi is not None and psi is not None and (phi.d != psi.d or phi.alpha != psi.alpha):
        raise InvalidArgument("right-hand sides live on different spaces")
    if not 0 <= r <= d:
        raise InvalidArgument(f"solution rank {r} outside [0, {d}]")
    phi = SpectralForm.zero(d, alpha, r + 1) if phi is None else phi
    psi = SpectralForm.zero(d, alpha, r - 1) if psi is None else psi
    _check_closed(phi, tol)
    _check_coclosed(psi, tol)
    from_phi = apply_delta_star(inverse_laplacian(phi))
    from_psi = apply_delta(inverse_laplacian(psi))
    return (from_phi + from_psi).prune(0.0)


def solve_derham(phi: SpectralForm, tol: float = FEASIBILITY_TOL) -> SpectralForm:
    """Coexact solution of ``delta w = phi`` for a closed form ``phi`` of rank >= 1."""
    if phi.r < 1:
        raise InvalidArgument("de Rham equation needs a right-hand side of rank >= 1")
    _check_closed(phi, tol)
    return apply_delta_star(inverse_laplacian(phi)).prune(0.0)
