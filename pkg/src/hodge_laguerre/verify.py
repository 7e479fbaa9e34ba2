"""Verification harness: L^p norms, the bilinear embedding integral, batteries and suites.

Every suite returns a :class:`SuiteReport`.  A report is a list of
:class:`Case` records (a measured residual against a bound) plus summary
statistics.  With a fixed :class:`TestConfig` the serialized report is
byte-identical between runs: cases are pure functions of a seed derived
from ``(config.seed, case index)``, and wall-clock runtime is kept on the
object but never written out.

Operator-norm statements are checked one-sidedly.  A sampled ratio below a
theoretical constant is evidence, not proof, and the reports say nothing
stronger than that.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

from .bellman import (
    BOUNDARY,
    BellmanParams,
    beta,
    beta_partials,
    bellman_q,
    classify,
    hessian_form,
    hessian_lower_bound,
    hessian_matrices,
)
from .errors import InfeasibleInput, InvalidConfig, InvalidShift
from .exterior_algebra import AlternatingTensor, hodge_star, index_sets, interior, wedge
from .fourier_laguerre import (
    BasisSpec,
    FormEvaluator,
    SpectralForm,
    analyze,
    quadrature_norm,
    random_form,
    synthesize_values,
    tensor_grid,
)
from .hodge_solver import (
    coexact_projection,
    decompose,
    exact_projection,
    solve_derham,
    solve_hodge_system,
)
from .laguerre_core import (
    QuadratureRule,
    gauss_laguerre_rule,
    heat_kernel_1d,
    heat_kernel_eigensum,
    heat_kernel_tilde_1d,
    heat_kernel_tilde_eigensum,
)
from .spectral_operators import (
    MultiplierSpec,
    apply_delta,
    apply_delta_star,
    apply_laplacian,
    apply_multiplier,
    heat,
    inverse_power,
    riesz,
    riesz_star,
)

__all__ = [
    "TestConfig",
    "Case",
    "SuiteReport",
    "SUITES",
    "run_suite",
    "p_star",
    "lp_norm",
    "grad_bar_norm",
    "t_rule",
    "BilinearResult",
    "bilinear_integral",
    "single_eigenvalue_bilinear",
    "plancherel_pairing",
    "riesz_ratio_battery",
    "cutoff_theta",
    "cutoff_values",
    "cutoff_check",
    "CRITERIA",
]

CRITERIA = {
    1: "exact cancellation",
    2: "exterior algebra identities",
    3: "Parseval and roundtrip",
    4: "kernel oracle",
    5: "Hodge decomposition and solvers",
    6: "Riesz energy identity",
    7: "Bellman function",
    8: "bilinear embedding",
    9: "Riesz L^p ratios",
    10: "spectral multipliers",
    11: "cut-off function",
}


def p_star(p: float) -> float:
    """``max(p, p/(p-1))``."""
    if not p > 1:
        raise InvalidConfig(f"exponent must exceed 1, got {p}")
    return max(p, p / (p - 1.0))


# ---------------------------------------------------------------------------
# configuration and reports


@dataclass
class TestConfig:
    """Knobs shared by the suites.

    ``None`` means "use the suite's own battery" (its dimensions, ranks,
    shifts, exponents, degrees).  ``cases`` overrides the per-battery sample
    count, ``tol`` overrides individual tolerances by name.
    """

    __test__ = False  # keep pytest from collecting this class

    d: int | None = None
    alpha: tuple | None = None
    r: int | None = None
    rho: float | None = None
    degree_cap: int | None = None
    quad_order: int | None = None
    t_count: int = 64
    t_min: float | None = None
    t_cap: float | None = None
    p_list: tuple | None = None
    seed: int = 0
    cases: int | None = None
    tol: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.d is not None and not 1 <= self.d <= 8:
            raise InvalidConfig(f"dimension must lie in [1, 8], got {self.d}")
        if self.alpha is not None:
            self.alpha = tuple(float(a) for a in self.alpha)
            if any(a <= -1 for a in self.alpha):
                raise InvalidConfig("every alpha_i must exceed -1")
            if self.d is not None and len(self.alpha) not in (1, self.d):
                raise InvalidConfig(f"alpha has {len(self.alpha)} entries but d = {self.d}")
        if self.r is not None and (self.r < 0 or (self.d is not None and self.r > self.d)):
            raise InvalidConfig(f"rank {self.r} outside [0, d]")
        if self.degree_cap is not None and self.degree_cap < 0:
            raise InvalidConfig("degree cap must be nonnegative")
        if self.quad_order is not None and self.quad_order < 2:
            raise InvalidConfig("quadrature order must be at least 2")
        if self.t_count < 16 or self.t_count % 8:
            raise InvalidConfig("t_count must be a multiple of 8 and at least 16")
        if self.t_min is not None and not 0 < self.t_min < 1:
            raise InvalidConfig("t_min must lie in (0, 1)")
        if self.p_list is not None:
            self.p_list = tuple(float(p) for p in self.p_list)
            if any(not p > 1 for p in self.p_list):
                raise InvalidConfig("every exponent must exceed 1")
        if self.cases is not None and self.cases < 1:
            raise InvalidConfig("case count must be positive")

    def alpha_for(self, d: int, rng: np.random.Generator, low: float = -0.5, high: float = 1.5) -> tuple:
        if self.alpha is None:
            return tuple(rng.uniform(low, high, d))
        return self.alpha * d if len(self.alpha) == 1 else self.alpha

    def count(self, default: int) -> int:
        return default if self.cases is None else self.cases

    def tolerance(self, name: str, default: float) -> float:
        return float(self.tol.get(name, default))

    def require_embedding_hypotheses(self, r: int, rho: float, alpha: Sequence[float]) -> None:
        """Shift at most ``r/2`` and every ``alpha_i >= -1/2``."""
        if rho > r / 2:
            raise InvalidConfig(f"shift {rho} exceeds r/2 = {r / 2}")
        if any(a < -0.5 for a in alpha):
            raise InvalidConfig("the embedding batteries need alpha_i >= -1/2")

    def to_json(self) -> dict:
        out = asdict(self)
        out["tol"] = dict(sorted(self.tol.items()))
        return out


def _finite_or_none(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass
class Case:
    """One measured quantity: ``pass`` iff ``residual <= bound``.

    Cases with ``enforced=False`` are logged only and never fail a suite.
    """

    name: str
    criterion: int
    residual: float
    bound: float
    ratio: float | None = None
    passed: bool = True
    enforced: bool = True

    @classmethod
    def check(cls, name: str, criterion: int, residual: float, bound: float, ratio=None, enforced: bool = True):
        residual = float(residual)
        bound = float(bound)
        ok = bool(np.isfinite(residual) and residual <= bound)
        if ratio is None and bound > 0:
            ratio = residual / bound
        return cls(name, criterion, residual, bound, ratio, ok, enforced)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "criterion": self.criterion,
            "residual": _finite_or_none(self.residual),
            "bound": _finite_or_none(self.bound),
            "ratio": _finite_or_none(self.ratio),
            "pass": self.passed,
            "enforced": self.enforced,
        }


@dataclass
class SuiteReport:
    suite: str
    config: dict
    cases: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    runtime: float = 0.0  # seconds; deliberately not serialized
    timings: dict = field(default_factory=dict)  # criterion -> seconds, not serialized either

    @property
    def failures(self) -> list:
        return [c for c in self.cases if c.enforced and not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def criteria(self) -> dict:
        out: dict[int, bool] = {}
        for c in self.cases:
            ok = c.passed or not c.enforced
            out[c.criterion] = out.get(c.criterion, True) and ok
        return dict(sorted(out.items()))

    def cases_for(self, criterion: int) -> list:
        return [c for c in self.cases if c.criterion == criterion]

    def summary(self) -> dict:
        ratios = [c.ratio for c in self.cases if c.ratio is not None and math.isfinite(c.ratio)]
        resid = [c.residual for c in self.cases if math.isfinite(c.residual)]
        return {
            "cases": len(self.cases),
            "failures": len(self.failures),
            "logged_violations": sum(1 for c in self.cases if not c.enforced and not c.passed),
            "max_residual": _finite_or_none(max(resid, default=0.0)),
            "ratio_max": _finite_or_none(max(ratios, default=0.0)),
            "ratio_mean": _finite_or_none(float(np.mean(ratios)) if ratios else 0.0),
            "criteria": {str(k): v for k, v in self.criteria().items()},
            "passed": self.passed,
        }

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "config": self.config,
            "cases": [c.to_json() for c in self.cases],
            "summary": self.summary(),
            "metadata": self.metadata,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "criterion", "residual", "bound", "ratio", "pass", "enforced"])
        for c in self.cases:
            row = c.to_json()
            w.writerow(["" if row[k] is None else (repr(row[k]) if isinstance(row[k], float) else row[k])
                        for k in ("name", "criterion", "residual", "bound", "ratio", "pass", "enforced")])
        return buf.getvalue()

    def write(self, path: str | Path) -> tuple[Path, Path]:
        """Write ``path`` (JSON) and a CSV mirror next to it."""
        path = Path(path)
        if path.suffix.lower() != ".json":
            path = path.with_suffix(".json")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dumps())
        csv_path = path.with_suffix(".csv")
        csv_path.write_text(self.to_csv())
        return path, csv_path

    def merge(self, other: "SuiteReport") -> None:
        self.cases.extend(other.cases)
        if other.metadata:
            self.metadata[other.suite] = other.metadata
        self.runtime += other.runtime
        for crit, sec in other.timings.items():
            self.timings[crit] = self.timings.get(crit, 0.0) + sec

    def finish(self, t0: float) -> None:
        """Record the runtime; a single-criterion suite charges all of it to that criterion."""
        self.runtime = time.perf_counter() - t0
        crits = {c.criterion for c in self.cases}
        if not self.timings and len(crits) == 1:
            self.timings[crits.pop()] = self.runtime


def _timed(report: SuiteReport, criterion: int, fn: Callable, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    report.timings[criterion] = report.timings.get(criterion, 0.0) + time.perf_counter() - t0
    return out


# ---------------------------------------------------------------------------
# parallel map


def _threads() -> int:
    raw = os.environ.get("HL_THREADS", "").strip()
    if not raw:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise InvalidConfig(f"HL_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InvalidConfig(f"HL_THREADS must be a positive integer, got {raw!r}")
    return n


def _pmap(fn: Callable, items: Sequence) -> list:
    """Order-preserving map, threaded up to ``HL_THREADS`` workers."""
    items = list(items)
    n = _threads()
    if n == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), *map(int, key)])


# ---------------------------------------------------------------------------
# L^p norms


def _lp_rules(alpha: Sequence[float], degree: int, p: float, margin: int = 8) -> list[QuadratureRule]:
    m = int(math.ceil(degree * max(p, 2.0) / 2.0)) + margin
    return [gauss_laguerre_rule(a, m) for a in alpha]


def lp_norm(form, p: float, rules: Sequence[QuadratureRule] | None = None, margin: int = 8) -> float:
    """``(int |w|^p dmu)^(1/p)`` by tensor quadrature.

    ``form`` is a :class:`SpectralForm` or a pair ``(values, weights)`` of
    pointwise component values ``(n, C(d, r))`` and quadrature weights.  The
    default rule has ``ceil(N max(p, 2)/2) + margin`` nodes per axis, which is
    exact for ``p = 2`` and a heuristic otherwise.
    """
    if not p >= 1:
        raise InvalidConfig(f"exponent must be >= 1, got {p}")
    if isinstance(form, SpectralForm):
        live = form.prune(0.0)
        if len(live.ks) == 0:
            return 0.0
        if rules is None:
            rules = _lp_rules(form.alpha, live.degree(), p, margin)
        pts, w = tensor_grid(rules)
        vals = synthesize_values(live, pts)
    else:
        vals, w = form
        vals = np.asarray(vals)
        w = np.asarray(w, dtype=float)
    mod = np.sqrt(np.sum(np.abs(vals) ** 2, axis=-1))
    return float(np.sum(w * mod ** p) ** (1.0 / p))


# ---------------------------------------------------------------------------
# the Poisson-extended gradient


def _decay_rates(form: SpectralForm, rho: float) -> NDArray:
    """Poisson decay rates ``sqrt(|k| - rho)`` per row."""
    shifted = form.eigenvalues - rho
    if np.any(shifted < -1e-12):
        raise InvalidShift(f"shift {rho} exceeds an occurring eigenvalue")
    return np.sqrt(np.clip(shifted, 0.0, None))


def _grad_sq(form: SpectralForm, rho: float, ev: FormEvaluator, ts: NDArray) -> NDArray:
    """``|grad_bar P_t w|^2`` at the evaluator's points, shape ``(n_points, n_t)``."""
    out = np.zeros((ev.points.shape[0], len(ts)))
    for p, I in enumerate(index_sets(form.d, form.r)):
        ks, c = form.component_rows(p)
        if len(ks) == 0:
            continue
        a = np.sqrt(np.clip(ks.sum(axis=1) - rho, 0.0, None))
        coef = c[:, None] * np.exp(-a[:, None] * ts[None, :])
        plain, *derivs = ev.gradient_matrices(I, ks)
        _add_square(out, plain @ (a[:, None] * coef))
        for mat in derivs:
            _add_square(out, mat @ coef)
    return out


def _add_square(acc: NDArray, v: NDArray) -> None:
    if np.iscomplexobj(v):
        acc += np.abs(v) ** 2
    else:
        np.multiply(v, v, out=v)
        acc += v


def grad_bar_norm(form: SpectralForm, rho: float, t: ArrayLike, x: ArrayLike) -> NDArray | float:
    """``|grad_bar P_t w(x)|``: all Laguerre derivatives plus the t-derivative.

    Spatial parts apply ``delta_i`` to every component; the t-part is the
    spectral derivative ``-sqrt(|k| - rho)`` of the Poisson semigroup.
    Returns ``(n_points, n_t)`` for array input, a float for a single point
    and a single time.
    """
    form = form.prune(0.0)
    lowest = form.occurring_eigenvalues()
    if len(lowest) and rho > lowest.min():
        raise InvalidShift(f"shift {rho} exceeds the smallest occurring eigenvalue {lowest.min()}")
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts <= 0):
        raise InvalidConfig("t must be positive")
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    if len(form.ks) == 0:
        out = np.zeros((pts.shape[0], len(ts)))
    else:
        ev = FormEvaluator(form.alpha, form.degree(), pts)
        out = np.sqrt(_grad_sq(form, rho, ev, ts))
    if np.ndim(t) == 0 and np.asarray(x).ndim == 1:
        return float(out[0, 0])
    return out


def t_rule(T: float, count: int = 64, t_min: float = 0.1) -> tuple[NDArray, NDArray]:
    """Composite 8-point Gauss rule for ``int_0^T f(t) dt``.

    One linear panel covers ``[0, t_min]``; the remaining ``count/8 - 1``
    panels are equal in ``log t`` on ``[t_min, T]``.
    """
    if count < 16 or count % 8:
        raise InvalidConfig("t rule needs a multiple of 8 nodes, at least 16")
    if not T > t_min > 0:
        raise InvalidConfig(f"need 0 < t_min < T, got t_min={t_min}, T={T}")
    g, w = np.polynomial.legendre.leggauss(8)
    nodes = [t_min / 2 * (g + 1)]
    weights = [t_min / 2 * w]
    edges = np.linspace(math.log(t_min), math.log(T), count // 8)
    for lo, hi in zip(edges[:-1], edges[1:]):
        s = (hi - lo) / 2 * g + (hi + lo) / 2
        nodes.append(np.exp(s))
        weights.append((hi - lo) / 2 * w * np.exp(s))
    return np.concatenate(nodes), np.concatenate(weights)


def _head_length(c_max: float, t_min: float | None) -> float:
    """First-panel length: short enough that ``exp(-c_max t)`` is resolved there."""
    if t_min is not None:
        return t_min
    return min(0.1, 1.6 / c_max)


# ---------------------------------------------------------------------------
# bilinear embedding integral


@dataclass(frozen=True)
class BilinearResult:
    """Value of ``int_0^inf int |grad_bar P_t w| |grad_bar P_t e| dmu t dt``.

    ``tail_bound`` bounds what the rule leaves out: times beyond the cap
    ``T`` and tensor nodes whose weight is below ``WEIGHT_CUTOFF`` times the
    largest.  ``error_estimate`` adds to it the changes seen under a coarser
    x-rule and a coarser t-rule.
    """

    value: float
    tail_bound: float
    error_estimate: float
    x_order: int
    t_cap: float

    @property
    def relative_error(self) -> float:
        return self.error_estimate / self.value if self.value > 0 else 0.0


def _default_x_order(d: int, r: int, degree: int) -> int:
    # |grad_bar P_t w| vanishes at isolated points of (x, t) when w has a
    # single component (r = 0 or r = d): d + 1 equations in d + 1 unknowns.
    # Those cone points make Gauss convergence algebraic, hence the large
    # orders.  With several components on both sides the integrand is smooth.
    single = math.comb(d, r) == 1 or math.comb(d, r + 1) == 1
    base = {1: 1280, 2: 160, 3: 64}.get(d, 24) if single else {2: 40, 3: 40}.get(d, 24)
    return base + 8 * max(degree - 5, 0)


def _energy_weight(form: SpectralForm, rho: float) -> tuple[float, float]:
    """``(A, a_min)``: ``||grad_bar P_t w||_2^2 <= A exp(-2 t a_min)``.

    Uses ``||delta_i f||^2 <= <L f, f>`` (valid for alpha_i >= -1/2) and
    ``|d/dt| = sqrt(|k| - rho)`` on every term.
    """
    a = _decay_rates(form, rho)
    mass = np.sum(np.abs(form.coeffs) ** 2, axis=1)
    live = a > 0
    if not np.any(live):
        return 0.0, math.inf
    A = float(np.sum((form.eigenvalues[live] + a[live] ** 2) * mass[live]))
    return A, float(a[live].min())


def _strip_stationary(form: SpectralForm, rho: float) -> SpectralForm:
    """Drop rows that do not move under the Poisson flow (they must be constants)."""
    form = form.prune(0.0)
    a = _decay_rates(form, rho)
    still = a == 0
    if np.any(still & np.any(form.ks != 0, axis=1)):
        raise InvalidConfig("a non-constant term has zero decay rate; the integral diverges")
    return SpectralForm(form.d, form.alpha, form.r, form.ks[~still], form.coeffs[~still], check=False)


def _check_pair(omega: SpectralForm, eta: SpectralForm, rho: float) -> None:
    if omega.d != eta.d or omega.alpha != eta.alpha:
        raise InvalidConfig("the two forms live on different spaces")
    if eta.r != omega.r + 1:
        raise InvalidConfig(f"ranks must be (r, r+1), got ({omega.r}, {eta.r})")
    if rho > omega.r / 2:
        raise InvalidConfig(f"shift {rho} exceeds r/2 = {omega.r / 2}")
    if any(a < -0.5 for a in omega.alpha):
        raise InvalidConfig("the embedding needs alpha_i >= -1/2")


WEIGHT_CUTOFF = 1e-30


def _majorant_constant(form: SpectralForm, rho: float) -> float:
    """``K`` with ``|grad_bar P_t w(x)| <= K exp(-t a_min) prod_i B_i(x_i)``.

    ``B_i`` bounds every one-dimensional factor (and its Laguerre derivative)
    on axis ``i``; a sum of squares is at most the square of the sum.
    """
    a = _decay_rates(form, rho)
    return float(np.sum(np.abs(form.coeffs).sum(axis=1) * (a + form.d)))


def _bilinear_values(omega, eta, rho, rules, t_rules, bound_dropped: bool) -> tuple[list[float], float]:
    """Quadrature values (one per t-rule) on the significant nodes, and a bound for the dropped ones."""
    pts, w = tensor_grid(rules)
    keep = w > WEIGHT_CUTOFF * w.max()
    n = max(omega.degree(), eta.degree(), 0)
    ev = FormEvaluator(omega.alpha, n, pts[keep])
    ts = np.concatenate([t for t, _ in t_rules])
    prod = w[keep] @ (np.sqrt(_grad_sq(omega, rho, ev, ts)) * np.sqrt(_grad_sq(eta, rho, ev, ts)))
    values, start = [], 0
    for t, wt in t_rules:
        values.append(float(prod[start:start + len(t)] @ (wt * t)))
        start += len(t)
    dropped = 0.0
    if bound_dropped and not np.all(keep):
        # separable bound on the dropped nodes; the integral over t of
        # t exp(-c t) is 1/c^2
        axis_pts = np.stack([r.nodes for r in rules], axis=1) if len({r.size for r in rules}) == 1 else None
        if axis_pts is None:
            raise InvalidConfig("dropped-node bound needs equal rule sizes on every axis")
        B = FormEvaluator(omega.alpha, n, axis_pts).axis_bounds()
        mesh = np.meshgrid(*[B[:, i] ** 2 for i in range(omega.d)], indexing="ij")
        B2 = np.prod(np.stack([m.reshape(-1) for m in mesh], axis=1), axis=1)
        c = _energy_weight(omega, rho)[1] + _energy_weight(eta, rho)[1]
        K = _majorant_constant(omega, rho) * _majorant_constant(eta, rho)
        dropped = K * float(w[~keep] @ B2[~keep]) / c ** 2
    return values, dropped


def bilinear_integral(
    omega: SpectralForm,
    eta: SpectralForm,
    rho: float = 0.0,
    config: TestConfig | None = None,
    *,
    x_order: int | None = None,
    tail_tol: float = 1e-14,
) -> BilinearResult:
    """Bilinear embedding integral of an r-form and an (r+1)-form.

    x is integrated with a tensor Gauss rule of ``x_order`` nodes per axis
    and t with :func:`t_rule` on ``[0, T]``.  ``T`` makes
    ``exp(-T (a_w + a_e))`` fall below ``tail_tol``, where ``a`` are the
    slowest Poisson decay rates.  The error estimate compares against
    rules with 3/4 of the x-nodes and 3/4 of the t-nodes and adds the
    tail bound.  Both integrands have near-kinks (square roots of sums of
    squares), so convergence is algebraic and the differences overstate
    the error of the finer rules.
    """
    config = config or TestConfig()
    _check_pair(omega, eta, rho)
    omega = _strip_stationary(omega, rho)
    eta = _strip_stationary(eta, rho)
    d = omega.d
    if len(omega.ks) == 0 or len(eta.ks) == 0:
        return BilinearResult(0.0, 0.0, 0.0, 0, 0.0)
    A1, a1 = _energy_weight(omega, rho)
    A2, a2 = _energy_weight(eta, rho)
    c = a1 + a2
    T = config.t_cap if config.t_cap is not None else max(math.log(1.0 / tail_tol) / c, 1.0)
    tail = math.sqrt(A1 * A2) * math.exp(-c * T) * (c * T + 1.0) / c ** 2
    n = max(omega.degree(), eta.degree())
    m = x_order or config.quad_order or _default_x_order(d, omega.r, n)
    m_coarse = max(int(round(0.75 * m)), 2)

    c_max = float(_decay_rates(omega, rho).max() + _decay_rates(eta, rho).max())
    head = _head_length(c_max, config.t_min)
    ts, wt = t_rule(T, config.t_count, head)
    ts_c, wt_c = t_rule(T, max(8 * round(0.75 * config.t_count / 8), 16), head)
    rules = [gauss_laguerre_rule(a, m) for a in omega.alpha]
    rules_c = [gauss_laguerre_rule(a, m_coarse) for a in omega.alpha]
    (fine,), dropped = _bilinear_values(omega, eta, rho, rules, [(ts, wt)], True)
    # the t-rule error hardly depends on the x-rule, so it is measured on the coarse grid
    (coarse_x, coarse_t), _ = _bilinear_values(omega, eta, rho, rules_c, [(ts, wt), (ts_c, wt_c)], False)
    err = abs(fine - coarse_x) + abs(coarse_x - coarse_t) + tail + dropped
    return BilinearResult(fine, tail + dropped, err, m, T)


def single_eigenvalue_bilinear(
    omega: SpectralForm, eta: SpectralForm, rho: float, x_order: int
) -> float:
    """Closed-form t-integral for forms that each occupy one eigenspace.

    Then ``|grad_bar P_t w| = exp(-t a) |grad_bar w|_{t=0}`` and the double
    integral is ``(a + b)^(-2) int |grad_bar w| |grad_bar e| dmu``.
    """
    _check_pair(omega, eta, rho)
    omega, eta = omega.prune(0.0), eta.prune(0.0)
    a_vals = [np.unique(_decay_rates(f, rho)) for f in (omega, eta)]
    if any(len(v) != 1 for v in a_vals):
        raise InvalidConfig("each form must occupy exactly one eigenspace")
    a, b = float(a_vals[0][0]), float(a_vals[1][0])
    if a + b == 0:
        raise InvalidConfig("both forms are stationary")
    rules = [gauss_laguerre_rule(al, x_order) for al in omega.alpha]
    pts, w = tensor_grid(rules)
    ev = FormEvaluator(omega.alpha, max(omega.degree(), eta.degree()), pts)
    zero = np.zeros(1)
    g1 = np.sqrt(_grad_sq(omega, rho, ev, zero))[:, 0]
    g2 = np.sqrt(_grad_sq(eta, rho, ev, zero))[:, 0]
    return float(w @ (g1 * g2)) / (a + b) ** 2


def plancherel_pairing(
    omega: SpectralForm, eta: SpectralForm, rho: float = 0.0, count: int = 64, t_min: float | None = None
) -> tuple[float, float]:
    """``(-4 int_0^inf <delta P_t w, d/dt P_t e> t dt, <R_rho w, e>)``.

    The first entry is computed per eigenvalue with :func:`t_rule`, the
    second directly from the Riesz transform; they should agree.
    """
    dw = apply_delta(omega.prune(0.0))
    a = _decay_rates(dw, rho) if len(dw.ks) else np.zeros(0)
    live = a > 0
    if not np.any(live):
        return 0.0, complex(riesz(rho, omega).inner(eta)).real
    T = max(math.log(1e16) / (2 * a[live].min()), 1.0)
    ts, wt = t_rule(T, count, _head_length(2 * a.max(), t_min))
    factors = np.zeros(len(a))
    for i in np.nonzero(live)[0]:
        factors[i] = -4.0 * np.sum(wt * ts * (-a[i]) * np.exp(-2.0 * ts * a[i]))
    via_t = dw.scale_rows(factors).inner(eta)
    direct = riesz(rho, omega).inner(eta)
    return float(np.real(via_t)), float(np.real(direct))


# ---------------------------------------------------------------------------
# Riesz L^p ratios


def riesz_ratio_battery(
    config: TestConfig,
    p_list: Sequence[float] = (1.5, 3.0),
    count: int = 200,
    dims: Sequence[int] = (1, 2, 3),
    degree: int = 4,
) -> SuiteReport:
    """Sampled ``||R_rho w||_p / ||w||_p`` and ``||R_rho^* w||_p / ||w||_p``.

    Forms cycle through ``(d, r, rho)`` with ``rho in {0, r/2}``; the
    empirical maximum is a lower bound for the operator norm and is compared
    one-sidedly with ``24 (p* - 1)``.
    """
    t0 = time.perf_counter()
    report = SuiteReport("riesz-ratio", config.to_json())
    dims = [config.d] if config.d is not None else list(dims)
    combos = []
    for d in dims:
        ranks = [config.r] if config.r is not None else range(d + 1)
        for r in ranks:
            shifts = [config.rho] if config.rho is not None else sorted({0.0, r / 2})
            combos.extend((d, r, rho) for rho in shifts)
    p_values = list(config.p_list or p_list)
    n = config.count(count)

    def one(idx):
        d, r, rho = combos[idx % len(combos)]
        rng = _rng(config.seed, 9, idx)
        alpha = config.alpha_for(d, rng)
        config.require_embedding_hypotheses(r, rho, alpha)
        N = config.degree_cap if config.degree_cap is not None else (degree if d < 3 else 3)
        w = random_form(d, alpha, r, N, rng, min_degree=1 if r == 0 else 0)
        out = {}
        for p in p_values:
            base = lp_norm(w, p)
            vals = []
            if r < d:
                vals.append(lp_norm(riesz(rho, w), p) / base)
            if r > 0:
                vals.append(lp_norm(riesz_star(rho, w), p) / base)
            out[p] = max(vals)
        return out

    results = _pmap(one, range(n))
    for p in p_values:
        worst = max(res[p] for res in results)
        bound = 24.0 * (p_star(p) - 1.0)
        report.cases.append(Case.check(f"riesz-ratio/p={p:g}/max-of-{n}", 9, worst, bound))
        report.metadata[f"riesz_ratio_max_p={p:g}"] = worst

    # p = 2, rho = 0: the energy identity caps both ratios by 1
    worst2 = 0.0
    for idx in range(min(n, 50)):
        d = dims[idx % len(dims)]
        rng = _rng(config.seed, 10, idx)
        alpha = config.alpha_for(d, rng)
        r = int(rng.integers(0, d + 1))
        w = random_form(d, alpha, r, 3, rng, min_degree=1)
        base = lp_norm(w, 2.0)
        if r < d:
            worst2 = max(worst2, lp_norm(riesz(0.0, w), 2.0) / base)
        if r > 0:
            worst2 = max(worst2, lp_norm(riesz_star(0.0, w), 2.0) / base)
    report.cases.append(Case.check("riesz-ratio/p=2/energy-cap", 9, worst2, 1.0 + 1e-10))

    # a single eigenform has a finite ratio at every exponent
    d = dims[-1]
    alpha = config.alpha_for(d, _rng(config.seed, 11))
    I = tuple(range(1, min(1, d) + 1))
    k = [1] * d
    eig = SpectralForm.unit(d, alpha, I, k)
    finite = all(math.isfinite(lp_norm(riesz(0.0, eig), p) / lp_norm(eig, p)) for p in p_values)
    report.cases.append(Case.check("riesz-ratio/eigenform-finite", 9, 0.0 if finite else 1.0, 0.0))
    report.finish(t0)
    return report


# ---------------------------------------------------------------------------
# cut-off function


def cutoff_theta(s: ArrayLike) -> tuple[NDArray, NDArray, NDArray]:
    """Smooth step ``Theta`` with its first two derivatives.

    ``Theta = 1`` on ``s <= 1``, ``0`` on ``s >= 2`` and
    ``h(2-s) / (h(2-s) + h(s-1))`` in between, ``h(t) = exp(-1/t)``.  In
    between this is ``logistic(-g)`` with ``g = 1/(2-s) - 1/(s-1)``.
    """
    s = np.asarray(s, dtype=float)
    th = np.where(s <= 1.0, 1.0, 0.0)
    d1 = np.zeros_like(s)
    d2 = np.zeros_like(s)
    mid = (s > 1.0) & (s < 2.0)
    if np.any(mid):
        a = s[mid] - 1.0
        b = 2.0 - s[mid]
        g = 1.0 / b - 1.0 / a
        g1 = 1.0 / a ** 2 + 1.0 / b ** 2
        g2 = -2.0 / a ** 3 + 2.0 / b ** 3
        e = np.exp(-np.abs(g))
        S = np.where(g > 0, e / (1 + e), 1 / (1 + e))  # logistic(-g)
        SS = e / (1 + e) ** 2  # S (1 - S), symmetric in g
        th[mid] = S
        d1[mid] = -SS * g1
        d2[mid] = SS * (1 - 2 * S) * g1 ** 2 - SS * g2
    return th, d1, d2


def cutoff_values(ell: float, alpha: Sequence[float], x: ArrayLike) -> tuple[NDArray, NDArray, NDArray]:
    """``(F, |delta F|, L_alpha F)`` for ``F(x) = Theta((x_1 + ... + x_d) / ell^2)``."""
    if not ell >= 1:
        raise InvalidConfig("ell must be at least 1")
    x = np.atleast_2d(np.asarray(x, dtype=float))
    alpha = np.asarray(alpha, dtype=float)
    if x.shape[1] != len(alpha):
        raise InvalidConfig("point dimension does not match alpha")
    s = x.sum(axis=1)
    u = s / ell ** 2
    th, d1, d2 = cutoff_theta(u)
    grad = np.sqrt(s) * np.abs(d1) / ell ** 2
    lap = -(u * d2 / ell ** 2 + ((alpha.sum() + len(alpha)) / ell ** 2 - u) * d1)
    return th, grad, lap


def cutoff_check(ell: float, alpha: Sequence[float], grid: ArrayLike | None = None) -> dict:
    """Suprema of ``|delta F_ell|`` and ``L_alpha F_ell`` over a grid.

    The default grid puts points on the diagonal at ``x_1 + ... + x_d``
    ranging over ``[0, 3 ell^2]`` (``F`` depends on that sum only) plus a
    random cloud in the same range.
    """
    d = len(alpha)
    if grid is None:
        s = np.linspace(0.0, 3.0, 6001) * ell ** 2
        diag = np.repeat(s[:, None] / d, d, axis=1)
        rng = np.random.default_rng(d)
        cloud = rng.dirichlet(np.ones(d), 2000) * rng.uniform(0, 3.0 * ell ** 2, (2000, 1))
        grid = np.vstack([diag, cloud])
    grid = np.asarray(grid, dtype=float)
    th, grad, lap = cutoff_values(ell, alpha, grid)
    inner = grid.sum(axis=1) <= ell ** 2
    return {
        "ell": float(ell),
        "sup_grad": float(grad.max()),
        "sup_lap": float(lap.max()),
        "inner_grad": float(grad[inner].max(initial=0.0)),
        "inner_defect": float(np.abs(th[inner] - 1.0).max(initial=0.0)),
    }


# ---------------------------------------------------------------------------
# suites


def _rank_combos(config: TestConfig, dims: Iterable[int]) -> list[tuple[int, int]]:
    dims = [config.d] if config.d is not None else list(dims)
    out = []
    for d in dims:
        ranks = [config.r] if config.r is not None else range(d + 1)
        out.extend((d, r) for r in ranks if r <= d)
    return out


def suite_exterior(config: TestConfig) -> SuiteReport:
    """Anticommutation of wedge and interior product with a covector."""
    t0 = time.perf_counter()
    report = SuiteReport("exterior", config.to_json())
    tol = config.tolerance("algebra", 1e-12)
    combos = _rank_combos(config, range(1, 7))
    n = config.count(200)

    def one(item):
        idx, (d, r) = item
        rng = _rng(config.seed, 2, idx)
        worst1 = worst2 = worst3 = 0.0
        width = math.comb(d, r)
        for _ in range(n):
            phi = AlternatingTensor(d, 1, rng.standard_normal(d))
            om = AlternatingTensor(d, r, rng.standard_normal(width))
            lhs = wedge(phi, interior(phi, om)) if r > 0 else AlternatingTensor.zeros(d, r)
            lhs = lhs + interior(phi, wedge(phi, om)) if r < d else lhs
            rhs = om * float(phi.norm() ** 2)
            worst1 = max(worst1, float(np.max(np.abs(lhs.coeffs - rhs.coeffs))))
            a = wedge(phi, om).norm() ** 2 if r < d else 0.0
            b = interior(phi, om).norm() ** 2 if r > 0 else 0.0
            worst2 = max(worst2, abs(a + b - phi.norm() ** 2 * om.norm() ** 2))
            ss = hodge_star(hodge_star(om))
            worst3 = max(worst3, float(np.max(np.abs(ss.coeffs - (-1) ** (r * (d - r)) * om.coeffs))))
        return d, r, worst1, worst2, worst3

    for d, r, w1, w2, w3 in _pmap(one, list(enumerate(combos))):
        report.cases.append(Case.check(f"anticommutator/d={d}/r={r}", 2, w1, tol))
        report.cases.append(Case.check(f"norm-split/d={d}/r={r}", 2, w2, tol))
        report.cases.append(Case.check(f"double-star/d={d}/r={r}", 2, w3, tol))
    report.finish(t0)
    return report


def _cancellation_cases(config: TestConfig) -> list[Case]:
    tol = config.tolerance("cancellation", 1e-12)
    combos = _rank_combos(config, (2, 3, 4))
    n = config.count(200)

    def one(item):
        idx, (d, r) = item
        rng = _rng(config.seed, 1, idx)
        N = config.degree_cap if config.degree_cap is not None else (4 if d < 4 else 3)
        res = dict.fromkeys(("delta^2", "delta*^2", "laplacian", "commute-delta", "commute-delta*"), 0.0)
        for _ in range(n):
            w = random_form(d, config.alpha_for(d, rng), r, N, rng)
            dw, sw = apply_delta(w), apply_delta_star(w)
            Lw = apply_laplacian(w)
            res["delta^2"] = max(res["delta^2"], _max_abs(apply_delta(dw)))
            res["delta*^2"] = max(res["delta*^2"], _max_abs(apply_delta_star(sw)))
            res["laplacian"] = max(res["laplacian"], (apply_delta(sw) + apply_delta_star(dw)).max_abs_diff(Lw))
            res["commute-delta"] = max(res["commute-delta"], apply_laplacian(dw).max_abs_diff(apply_delta(Lw)))
            res["commute-delta*"] = max(
                res["commute-delta*"], apply_laplacian(sw).max_abs_diff(apply_delta_star(Lw))
            )
        return d, r, res

    cases = []
    for d, r, res in _pmap(one, list(enumerate(combos))):
        for key, val in res.items():
            cases.append(Case.check(f"{key}/d={d}/r={r}", 1, val, tol))
    return cases


def _max_abs(form: SpectralForm) -> float:
    return float(np.max(np.abs(form.coeffs), initial=0.0))


def _roundtrip_cases(config: TestConfig) -> list[Case]:
    tol = config.tolerance("roundtrip", 1e-10)
    combos = _rank_combos(config, (1, 2, 3))
    reps = config.count(2)

    def one(item):
        idx, (d, r) = item
        rng = _rng(config.seed, 3, idx)
        N = config.degree_cap if config.degree_cap is not None else 12
        worst_rt = worst_norm = 0.0
        for _ in range(reps):
            alpha = config.alpha_for(d, rng, -0.5, 2.0)
            w = random_form(d, alpha, r, N, rng)
            back = analyze(lambda pts: synthesize_values(w, pts), BasisSpec(d, alpha, r, N))
            worst_rt = max(worst_rt, back.max_abs_diff(w))
            exact = w.norm()
            worst_norm = max(worst_norm, abs(quadrature_norm(w) - exact) / exact)
        return d, r, N, worst_rt, worst_norm

    cases = []
    for d, r, N, rt, nm in _pmap(one, list(enumerate(combos))):
        cases.append(Case.check(f"analyze-synthesize/d={d}/r={r}/N={N}", 3, rt, tol))
        cases.append(Case.check(f"quadrature-vs-parseval/d={d}/r={r}/N={N}", 3, nm, tol))
    return cases


def _energy_cases(config: TestConfig) -> list[Case]:
    tol = config.tolerance("energy", 1e-12)
    combos = _rank_combos(config, (1, 2, 3, 4))
    n = config.count(50)

    def one(item):
        idx, (d, r) = item
        rng = _rng(config.seed, 6, idx)
        N = config.degree_cap if config.degree_cap is not None else 4
        plain = shifted = 0.0
        excess = 0.0
        for _ in range(n):
            w = random_form(d, config.alpha_for(d, rng), r, N, rng, min_degree=1)
            total = w.norm() ** 2
            E = (riesz(0.0, w).norm() ** 2 if r < d else 0.0) + (riesz_star(0.0, w).norm() ** 2 if r > 0 else 0.0)
            plain = max(plain, abs(E - total) / total)
            lowest = int(w.occurring_eigenvalues().min())
            for rho in sorted({0.25, r / 2, lowest - 0.5}):
                if rho >= lowest:
                    continue
                Er = (riesz(rho, w).norm() ** 2 if r < d else 0.0) + (
                    riesz_star(rho, w).norm() ** 2 if r > 0 else 0.0
                )
                per = 0.0
                worst_factor = 0.0
                mass = np.sum(np.abs(w.coeffs) ** 2, axis=1)
                for n_ev in np.unique(w.eigenvalues):
                    sel = w.eigenvalues == n_ev
                    per += n_ev / (n_ev - rho) * mass[sel].sum()
                    worst_factor = max(worst_factor, n_ev / (n_ev - rho))
                shifted = max(shifted, abs(Er - per) / total)
                excess = max(excess, Er / (worst_factor * total))
        return d, r, plain, shifted, excess

    cases = []
    for d, r, plain, shifted, excess in _pmap(one, list(enumerate(combos))):
        if r == 0:
            cases.append(Case.check(f"riesz-energy/d={d}/r=0/constant-free", 6, plain, tol))
        else:
            cases.append(Case.check(f"riesz-energy/d={d}/r={r}", 6, plain, tol))
        cases.append(Case.check(f"shifted-energy-per-eigenvalue/d={d}/r={r}", 6, shifted, tol))
        cases.append(Case.check(f"shifted-energy-factor-cap/d={d}/r={r}", 6, excess, 1.0 + tol))
    return cases


def suite_spectral(config: TestConfig) -> SuiteReport:
    """Exact cancellations, Parseval roundtrip and the Riesz energy identity."""
    t0 = time.perf_counter()
    report = SuiteReport("spectral", config.to_json())
    report.cases.extend(_timed(report, 1, _cancellation_cases, config))
    report.cases.extend(_timed(report, 3, _roundtrip_cases, config))
    report.cases.extend(_timed(report, 6, _energy_cases, config))
    report.finish(t0)
    return report


def suite_kernel(config: TestConfig) -> SuiteReport:
    """Closed-form kernels against eigen-expansions, domination, mass and semigroup law."""
    t0 = time.perf_counter()
    report = SuiteReport("kernel", config.to_json())
    tol = config.tolerance("kernel", 1e-6)
    tol_mass = config.tolerance("mass", 1e-8)
    alphas = list(config.alpha) if config.alpha is not None else [-0.5, 0.0, 1.5]
    n = config.count(50)

    def one(item):
        idx, a = item
        rng = _rng(config.seed, 4, idx)
        ts = rng.uniform(0.2, 3.0, n)
        xs = rng.uniform(0.05, 6.0, n)
        ys = rng.uniform(0.05, 6.0, n)
        G = heat_kernel_1d(a, ts, xs, ys)
        Gt = heat_kernel_tilde_1d(a, ts, xs, ys)
        Ge = np.array([heat_kernel_eigensum(a, t, x, y) for t, x, y in zip(ts, xs, ys)])
        Gte = np.array([heat_kernel_tilde_eigensum(a, t, x, y) for t, x, y in zip(ts, xs, ys)])
        err = float(np.max(np.abs(G - Ge) / np.abs(Ge)))
        err_t = float(np.max(np.abs(Gt - Gte) / np.abs(Gte)))
        dom = float(np.max(Gt / (np.exp(-ts / 2) * G))) if a >= -0.5 else None
        rule = gauss_laguerre_rule(a, 160)
        mass = 0.0
        law = 0.0
        for t, x, y in zip(ts[:10], xs[:10], ys[:10]):
            t = 0.5 + 1.5 * (t - 0.2) / 2.8
            x = min(x, 5.0)
            mass = max(mass, abs(rule.integrate(heat_kernel_1d(a, t, x, rule.nodes)) - 1.0))
            s = 0.5 * t
            conv = rule.integrate(heat_kernel_1d(a, t, x, rule.nodes) * heat_kernel_1d(a, s, rule.nodes, y))
            ref = heat_kernel_1d(a, t + s, x, y)
            law = max(law, abs(conv - ref) / ref)
        return a, err, err_t, dom, mass, law

    for a, err, err_t, dom, mass, law in _pmap(one, list(enumerate(alphas))):
        report.cases.append(Case.check(f"heat-kernel-vs-eigensum/alpha={a:g}", 4, err, tol))
        report.cases.append(Case.check(f"tilde-kernel-vs-eigensum/alpha={a:g}", 4, err_t, tol))
        if dom is not None:
            # equality is approached as the Bessel ratio tends to 1; allow rounding
            report.cases.append(Case.check(f"domination-ratio/alpha={a:g}", 4, dom, 1.0 + 1e-12))
        report.cases.append(Case.check(f"stochastic-completeness/alpha={a:g}", 4, mass, tol_mass))
        report.cases.append(Case.check(f"semigroup-law/alpha={a:g}", 4, law, tol_mass))
    report.finish(t0)
    return report


def suite_hodge(config: TestConfig) -> SuiteReport:
    """Projection identities and the two solvers on constructed feasible data."""
    t0 = time.perf_counter()
    report = SuiteReport("hodge", config.to_json())
    tol = config.tolerance("projection", 1e-12)
    tol_solve = config.tolerance("solver", 1e-10)
    dims = [config.d] if config.d is not None else [2, 3, 4]
    n = config.count(100)

    def one(idx):
        rng = _rng(config.seed, 5, idx)
        d = dims[idx % len(dims)]
        r = config.r if config.r is not None else int(rng.integers(0, d + 1))
        N = config.degree_cap if config.degree_cap is not None else 4
        alpha = config.alpha_for(d, rng)
        w = random_form(d, alpha, r, N, rng)
        other = random_form(d, alpha, r, N, rng)
        split = decompose(w)
        P, Q = exact_projection, coexact_projection
        Pw, Qw = split.exact_part, split.coexact_part
        res = {
            "sum-is-identity": split.total().max_abs_diff(w),
            "exact-idempotent": P(Pw).max_abs_diff(Pw),
            "coexact-idempotent": Q(Qw).max_abs_diff(Qw),
            "mutual-annihilation": max(_max_abs(P(Qw)), _max_abs(Q(Pw))),
            "range-orthogonality": abs(P(w).inner(Q(other))),
        }
        u = random_form(d, alpha, r, N, rng)
        v = random_form(d, alpha, r, N, rng)
        phi = apply_delta(u) if r < d else None
        psi = apply_delta_star(v) if r > 0 else None
        if phi is None and psi is None:
            solve = 0.0
        else:
            sol = solve_hodge_system(phi, psi, r=r)
            solve = 0.0
            if phi is not None:
                solve = max(solve, apply_delta(sol).max_abs_diff(phi))
            if psi is not None:
                solve = max(solve, apply_delta_star(sol).max_abs_diff(psi))
        derham = 0.0
        if r >= 1:
            phi = apply_delta(random_form(d, alpha, r - 1, N, rng))
            sol = solve_derham(phi)
            derham = max(apply_delta(sol).max_abs_diff(phi), _max_abs(apply_delta_star(sol)))
        # a form that is not closed must be rejected
        rejected = 1.0
        if r < d - 1:
            bad = random_form(d, alpha, r + 1, N, rng, min_degree=1)
            try:
                solve_hodge_system(bad, None, r=r)
            except InfeasibleInput:
                rejected = 0.0
        else:
            rejected = 0.0
        return res, solve, derham, rejected

    results = _pmap(one, range(n))
    for key in results[0][0]:
        worst = max(res[0][key] for res in results)
        report.cases.append(Case.check(f"{key}/max-of-{n}", 5, worst, tol))
    report.cases.append(Case.check(f"hodge-system-residual/max-of-{n}", 5, max(r[1] for r in results), tol_solve))
    report.cases.append(Case.check(f"derham-residual/max-of-{n}", 5, max(r[2] for r in results), tol_solve))
    report.cases.append(Case.check("infeasible-rejected", 5, max(r[3] for r in results), 0.0))
    report.finish(t0)
    return report


def _sample_block(rng, count, dim, low, high):
    vec = rng.standard_normal((count, dim))
    vec /= np.linalg.norm(vec, axis=1, keepdims=True)
    return vec * np.exp(rng.uniform(np.log(low), np.log(high), (count, 1)))


def _fd_hessian(params: BellmanParams, zeta: NDArray, h: float) -> NDArray:
    m = params.m
    dim = len(zeta)
    E = np.eye(dim) * h
    Qf = lambda z: float(bellman_q(params, z[:m], z[m:]))
    H = np.zeros((dim, dim))
    for i in range(dim):
        for j in range(i, dim):
            val = (
                Qf(zeta + E[i] + E[j]) - Qf(zeta + E[i] - E[j]) - Qf(zeta - E[i] + E[j]) + Qf(zeta - E[i] - E[j])
            ) / (4 * h * h)
            H[i, j] = H[j, i] = val
    return H


def suite_bellman(config: TestConfig) -> SuiteReport:
    """Hessian lower bound, finite-difference Hessians and growth bounds."""
    t0 = time.perf_counter()
    report = SuiteReport("bellman", config.to_json())
    p_values = list(config.p_list or (2.0, 2.5, 4.0, 8.0))
    n = config.count(10000)
    n_fd = min(config.count(100), 100)
    n_growth = min(config.count(1000), 1000)
    C_growth = 4.0

    def one(item):
        idx, p = item
        rng = _rng(config.seed, 7, idx)
        params = BellmanParams(p, m=2, n=3)
        xi = _sample_block(rng, n, 2, 0.05, 20.0)
        eta = _sample_block(rng, n, 3, 0.05, 20.0)
        keep = np.asarray(classify(params, xi, eta)) != BOUNDARY
        xi, eta = xi[keep], eta[keep]
        x = rng.standard_normal((len(xi), 2))
        y = rng.standard_normal((len(xi), 3))
        H = np.asarray(hessian_form(params, xi, eta, x, y))
        LB = np.asarray(hessian_lower_bound(params, xi, eta, x, y))
        deficit = (LB - H) / LB
        violations = int(np.sum(H < LB * (1 - 1e-10)))

        # finite differences at moderate scale, away from the singular set
        fd_err = 0.0
        checked = 0
        while checked < n_fd:
            z = np.concatenate([_sample_block(rng, 1, 2, 0.5, 2.0)[0], _sample_block(rng, 1, 3, 0.5, 2.0)[0]])
            u, v = np.linalg.norm(z[:2]), np.linalg.norm(z[2:])
            if abs(u ** p - v ** params.q) < 0.2 * max(u ** p, v ** params.q):
                continue
            a, b, c = hessian_matrices(params, z[:2], z[2:])
            exact = np.block([[a, b], [b.T, c]])
            approx = _fd_hessian(params, z, 1e-4 * np.linalg.norm(z))
            fd_err = max(fd_err, float(np.max(np.abs(approx - exact)) / np.max(np.abs(exact))))
            checked += 1

        u = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), n_growth))
        v = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), n_growth))
        bval = np.asarray(beta(params, u, v))
        upper = (1 + params.gamma) * (u ** p + v ** params.q)
        range_res = float(max(np.max(-bval), np.max((bval - upper) / upper)))
        du, dv = beta_partials(params, u, v)
        du, dv = np.asarray(du), np.asarray(dv)
        neg = float(max(np.max(-du), np.max(-dv), 0.0))
        g_u = float(np.max(du / (p * np.maximum(u ** (p - 1), v))))
        g_v = float(np.max(dv / v ** (params.q - 1)))

        # C^1 across the branch surface
        us = np.exp(rng.uniform(np.log(0.1), np.log(10.0), 200))
        vs = us ** (p / params.q)
        lo = np.asarray(beta_partials(params, us, vs * (1 + 1e-11)))
        hi = np.asarray(beta_partials(params, us, vs * (1 - 1e-11)))
        c1 = float(np.max(np.abs(lo - hi) / np.abs(hi)))
        return p, float(np.max(deficit)), violations, len(xi), fd_err, range_res, neg, g_u, g_v, c1

    for p, deficit, viol, m, fd, rng_res, neg, g_u, g_v, c1 in _pmap(one, list(enumerate(p_values))):
        report.cases.append(Case.check(f"hessian-lower-bound/p={p:g}/violations-of-{m}", 7, viol, 0))
        report.cases.append(Case.check(f"hessian-lower-bound/p={p:g}/max-relative-deficit", 7, deficit, 1e-10))
        report.cases.append(Case.check(f"hessian-vs-finite-differences/p={p:g}", 7, fd, 1e-4))
        report.cases.append(Case.check(f"beta-range/p={p:g}", 7, max(rng_res, 0.0), 1e-12))
        report.cases.append(Case.check(f"partials-nonnegative/p={p:g}", 7, neg, 0.0))
        report.cases.append(Case.check(f"C1-across-branch/p={p:g}", 7, c1, 1e-8))
        report.cases.append(Case.check(f"partial-u-growth/p={p:g}/C={C_growth:g}", 7, g_u, C_growth, enforced=False))
        report.cases.append(Case.check(f"partial-v-growth/p={p:g}/C={C_growth:g}", 7, g_v, C_growth, enforced=False))
        report.metadata[f"growth_sup_p={p:g}"] = {"u": g_u, "v": g_v}
    report.finish(t0)
    return report


def _bilinear_cases(config: TestConfig, report: SuiteReport) -> None:
    dims = [config.d] if config.d is not None else [1, 2, 3]
    p_values = list(config.p_list or (1.5, 2.0, 3.0))
    n = config.count(50)
    budget = config.tolerance("bilinear-budget", 1e-4)
    combos = []
    for d in dims:
        ranks = [config.r] if config.r is not None else [0, 1]
        for r in ranks:
            shifts = [config.rho] if config.rho is not None else sorted({0.0, r / 2})
            combos.extend((d, r, rho) for rho in shifts)
    degrees = {1: 5, 2: 4, 3: 3}

    def one(item):
        cidx, idx = item
        d, r, rho = combos[cidx]
        rng = _rng(config.seed, 8, cidx, idx)
        alpha = config.alpha_for(d, rng)
        config.require_embedding_hypotheses(r, rho, alpha)
        N = config.degree_cap if config.degree_cap is not None else degrees.get(d, 2)
        om = random_form(d, alpha, r, N, rng)
        et = random_form(d, alpha, r + 1, N, rng)
        res = bilinear_integral(om, et, rho, config)
        norms = {p: (lp_norm(om, p), lp_norm(et, p / (p - 1))) for p in p_values}
        return cidx, res, norms

    jobs = [(c, i) for c in range(len(combos)) for i in range(n)]
    results = _pmap(one, jobs)
    for cidx, (d, r, rho) in enumerate(combos):
        rows = [(res, norms) for c, res, norms in results if c == cidx]
        tag = f"d={d}/r={r}/rho={rho:g}"
        if r + 1 > d:
            worst = max(res.value for res, _ in rows)
            report.cases.append(Case.check(f"bilinear/{tag}/eta-vanishes", 8, worst, 0.0))
            continue
        rel = max(res.relative_error for res, _ in rows)
        report.cases.append(Case.check(f"bilinear/{tag}/quadrature-error", 8, rel, budget))
        for p in p_values:
            const = 6.0 * (p_star(p) - 1.0)
            ratio = max((res.value + res.error_estimate) / (const * a * b) for res, (a, b) in
                        ((res, norms[p]) for res, norms in rows))
            report.cases.append(Case.check(f"bilinear/{tag}/p={p:g}/bound-ratio", 8, ratio, 1.0))

    # closed-form t-integral for one-eigenspace pairs
    worst = 0.0
    worst_planch = 0.0
    for idx in range(6):
        rng = _rng(config.seed, 12, idx)
        d = dims[idx % len(dims)]
        r = 0 if d == 1 else idx % 2
        rho = r / 2 * (idx % 3 == 0)
        alpha = config.alpha_for(d, rng)
        n1 = int(rng.integers(max(r, 1), 4))
        n2 = int(rng.integers(r + 1, 5))
        om = _eigenspace_form(d, alpha, r, n1, rng)
        et = _eigenspace_form(d, alpha, r + 1, n2, rng)
        m = _default_x_order(d, r, max(n1, n2))
        closed = single_eigenvalue_bilinear(om, et, rho, m)
        full = bilinear_integral(om, et, rho, config, x_order=m).value
        worst = max(worst, abs(full - closed) / closed)
        w = random_form(d, alpha, r, 4, rng, min_degree=1)
        e = random_form(d, alpha, r + 1, 4, rng)
        via_t, direct = plancherel_pairing(w, e, 0.0, config.t_count, config.t_min)
        worst_planch = max(worst_planch, abs(via_t - direct) / max(abs(direct), 1e-300))
    report.cases.append(Case.check("bilinear/one-eigenspace-closed-form", 8, worst, 1e-6))
    report.cases.append(Case.check("bilinear/plancherel-pairing", 8, worst_planch, 1e-8))


def _eigenspace_form(d, alpha, r, n, rng) -> SpectralForm:
    """Random form supported on the ``|k| = n`` eigenspace."""
    base = random_form(d, alpha, r, n, rng, min_degree=n)
    if len(base.ks) == 0:
        raise InvalidConfig(f"no admissible terms of degree {n} at rank {r}")
    return base


def _cutoff_cases(config: TestConfig, report: SuiteReport) -> None:
    if config.alpha is not None:
        alphas = [config.alpha * (config.d or 1) if len(config.alpha) == 1 else config.alpha]
    else:
        alphas = [(0.0,), (-0.5, 1.5), (-0.5, 0.0, 1.5), (2.0, 2.0, 2.0, 2.0)]
    ells = (1.0, 2.0, 4.0, 8.0)
    for alpha in alphas:
        tag = "alpha=" + ",".join(f"{a:g}" for a in alpha)
        base = cutoff_check(1.0, alpha)
        C = max(base["sup_grad"], base["sup_lap"])
        report.metadata[f"cutoff_C/{tag}"] = C
        prev = None
        for ell in ells:
            chk = base if ell == 1.0 else cutoff_check(ell, alpha)
            report.cases.append(Case.check(f"cutoff/{tag}/ell={ell:g}/grad", 11, chk["sup_grad"] * ell, C * (1 + 1e-12)))
            report.cases.append(Case.check(f"cutoff/{tag}/ell={ell:g}/laplacian", 11, chk["sup_lap"], C * (1 + 1e-12)))
            report.cases.append(Case.check(f"cutoff/{tag}/ell={ell:g}/flat-inside", 11,
                                           max(chk["inner_grad"], chk["inner_defect"]), 0.0))
            if prev is not None:
                halving = prev / chk["sup_grad"]
                report.cases.append(Case.check(f"cutoff/{tag}/ell={ell:g}/doubling-halves-grad", 11,
                                               abs(math.log(halving / 2.0)), math.log(1.2)))
            prev = chk["sup_grad"]


def suite_bilinear(config: TestConfig) -> SuiteReport:
    """Bilinear embedding battery, Riesz L^p ratios and the cut-off function."""
    t0 = time.perf_counter()
    report = SuiteReport("bilinear", config.to_json())
    _timed(report, 8, _bilinear_cases, config, report)
    ratio = _timed(report, 9, riesz_ratio_battery, config)
    report.cases.extend(ratio.cases)
    report.metadata.update(ratio.metadata)
    _timed(report, 11, _cutoff_cases, config, report)
    report.finish(t0)
    return report


def suite_multiplier(config: TestConfig) -> SuiteReport:
    """L^2 norms of multipliers, semigroup decay, subordination and the table resolvent."""
    t0 = time.perf_counter()
    report = SuiteReport("multiplier", config.to_json())
    tol = config.tolerance("multiplier", 1e-12)
    tol_int = config.tolerance("subordination", 1e-8)
    combos = _rank_combos(config, (1, 2, 3))

    # L^2 operator norm attained on an eigenform
    def norm_case(item):
        idx, (d, r) = item
        rng = _rng(config.seed, 13, idx)
        N = config.degree_cap if config.degree_cap is not None else (5 if d < 3 else 3)
        alpha = config.alpha_for(d, rng)
        lowest = r
        specs = [
            MultiplierSpec(rho=r / 2, kind="heat", params={"t": 0.7}),
            MultiplierSpec(rho=r / 2, kind="poisson", params={"t": 1.3}),
            MultiplierSpec(rho=lowest - 0.5, kind="power", params={"s": 0.5}),
            MultiplierSpec.from_function(
                lambda k, z=rng.standard_normal(N + 1) + 1j * rng.standard_normal(N + 1): z[k], range(N + 1)
            ),
        ]
        worst = excess = 0.0
        ns = np.arange(lowest, N + 1)
        for spec in specs:
            sup = spec.sup_abs(ns)
            best = 0.0
            full = random_form(d, alpha, r, N, rng)
            for row, k in enumerate(full.ks):
                for p, I in enumerate(index_sets(d, r)):
                    if all(k[i - 1] >= 1 for i in I):
                        e = SpectralForm.unit(d, alpha, I, k)
                        best = max(best, apply_multiplier(spec, e).norm())
            worst = max(worst, abs(best - sup))
            excess = max(excess, apply_multiplier(spec, full).norm() / full.norm() - sup)
        return d, r, worst, excess

    for d, r, worst, excess in _pmap(norm_case, list(enumerate(combos))):
        report.cases.append(Case.check(f"l2-norm-attained/d={d}/r={r}", 10, worst, tol))
        report.cases.append(Case.check(f"l2-norm-upper/d={d}/r={r}", 10, max(excess, 0.0), tol))

    # semigroup decay at rate gamma(rho, r, p)
    p_values = list(config.p_list or (1.5, 2.0, 3.0))

    def decay_case(item):
        idx, (d, r) = item
        rng = _rng(config.seed, 14, idx)
        N = config.degree_cap if config.degree_cap is not None else (4 if d < 3 else 3)
        worst = 0.0
        for rho in sorted({0.0, r / 2}):
            for _ in range(config.count(5)):
                alpha = config.alpha_for(d, rng)
                w = random_form(d, alpha, r, N, rng)
                for p in p_values:
                    g = rho - (1 - abs(0.5 - 1.0 / p)) * r
                    base = lp_norm(w, p)
                    for t in (0.5, 1.0, 2.0):
                        worst = max(worst, lp_norm(heat(t, rho, w), p) / (math.exp(g * t) * base))
        return d, r, worst

    for d, r, worst in _pmap(decay_case, list(enumerate(combos))):
        report.cases.append(Case.check(f"semigroup-decay/d={d}/r={r}", 10, worst, 1.05))

    # subordination and Gamma-integral identities, per eigenvalue
    sub = gam = 0.0
    for lam in (1.0, 2.0, 5.0):
        rho = 0.5
        n_ev = lam + rho
        for t in (0.5, 1.0):
            poisson_val = float(MultiplierSpec(rho=rho, kind="poisson", params={"t": t}).values(n_ev))
            integrand = lambda v: 2.0 / math.sqrt(math.pi) * math.exp(-v * v) * float(
                MultiplierSpec(rho=rho, kind="heat", params={"t": t * t / (4 * v * v)}).values(n_ev)
            )
            val, _ = quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
            sub = max(sub, abs(val - poisson_val) / poisson_val)
        for s in (0.5, 1.0, 1.5):
            power_val = float(MultiplierSpec(rho=rho, kind="power", params={"s": s}).values(n_ev))
            integrand = lambda v: 2.0 * v ** (2 * s - 1) * float(
                MultiplierSpec(rho=rho, kind="heat", params={"t": v * v}).values(n_ev)
            ) / gamma_fn(s)
            val, _ = quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
            gam = max(gam, abs(val - power_val) / power_val)
    report.cases.append(Case.check("subordination-per-eigenvalue", 10, sub, tol_int))
    report.cases.append(Case.check("gamma-integral-per-eigenvalue", 10, gam, tol_int))

    # table multiplier 1/(n - r/2 + 1) against the shifted resolvent
    worst = 0.0
    for idx, (d, r) in enumerate(combos):
        rng = _rng(config.seed, 15, idx)
        N = 5 if d < 3 else 3
        w = random_form(d, config.alpha_for(d, rng), r, N, rng)
        spec = MultiplierSpec.from_function(lambda k, r=r: 1.0 / (k - r / 2 + 1.0), range(r, N + 1))
        worst = max(worst, apply_multiplier(spec, w).max_abs_diff(inverse_power(1.0, r / 2 - 1.0, w)))
    report.cases.append(Case.check("table-multiplier-vs-resolvent", 10, worst, tol))

    report.metadata["constants"] = {
        f"p={p:g}": {"embedding": 6.0 * (p_star(p) - 1.0), "proof": 5.7 * (p - 1.0)} for p in (2.0, 2.5, 3.0, 4.0, 8.0)
    }
    report.finish(t0)
    return report


SUITES: dict[str, Callable[[TestConfig], SuiteReport]] = {
    "exterior": suite_exterior,
    "spectral": suite_spectral,
    "kernel": suite_kernel,
    "hodge": suite_hodge,
    "bellman": suite_bellman,
    "bilinear": suite_bilinear,
    "multiplier": suite_multiplier,
}


def run_suite(name: str, config: TestConfig | None = None) -> SuiteReport:
    """Run one suite, or every suite for ``name == "all"``."""
    config = config or TestConfig()
    if name == "all":
        report = SuiteReport("all", config.to_json())
        for key in SUITES:
            report.merge(SUITES[key](config))
        return report
    if name not in SUITES:
        raise InvalidConfig(f"unknown suite {name!r}; expected one of {sorted(SUITES) + ['all']}")
    return SUITES[name](config)
