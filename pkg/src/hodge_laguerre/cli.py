"""Command-line front end.

Exit status is 0 on success, 1 when a check fails (a verification suite
or a solver residual above tolerance) and 2 for malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import HodgeLaguerreError
from .exterior_algebra import index_sets
from .fourier_laguerre import (
    BasisSpec,
    FormEvaluator,
    PolynomialForm,
    SpectralForm,
    admissible_mask,
    analyze,
    multi_indices,
)
from .hodge_solver import FEASIBILITY_TOL, decompose, solve_derham, solve_hodge_system
from .laguerre_core import gauss_laguerre_rule
from .spectral_operators import (
    MultiplierSpec,
    apply_delta,
    apply_delta_star,
    apply_laplacian,
    apply_multiplier,
    heat,
    inverse_power,
    poisson,
    riesz,
    riesz_star,
)
from .verify import SUITES, TestConfig, run_suite

OPS = ("delta", "delta-star", "laplacian", "heat", "poisson", "riesz", "riesz-star", "power", "multiplier")


class UsageError(Exception):
    """Malformed command line or input file (exit status 2)."""


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _alpha(args, d: int) -> tuple:
    if args.alpha is None:
        return (0.0,) * d
    if len(args.alpha) == 1:
        return tuple(args.alpha) * d
    if len(args.alpha) != d:
        raise UsageError(f"--alpha has {len(args.alpha)} entries but the dimension is {d}")
    return tuple(args.alpha)


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _read_form(path: str) -> SpectralForm:
    obj = _read_json(path)
    if not isinstance(obj, dict):
        raise UsageError(f"{path}: expected a JSON object")
    return SpectralForm.from_json(obj)


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_basis(args) -> int:
    d = args.d or 1
    alpha = _alpha(args, d)
    r = args.rank or 0
    n = 3 if args.degree is None else args.degree
    BasisSpec(d, alpha, r, max(n, r))
    x = np.asarray(args.x if args.x is not None else [1.0] * d, dtype=float)
    if x.shape != (d,):
        raise UsageError(f"--x needs {d} coordinates")
    ks = multi_indices(d, n)
    mask = admissible_mask(d, r, ks)
    ev = FormEvaluator(alpha, n, x.reshape(1, -1))
    rows = []
    for p, I in enumerate(index_sets(d, r)):
        sel = ks[mask[:, p]]
        vals = ev.matrix(I, sel)[0] if len(sel) else []
        rows.extend({"I": list(I), "k": k.tolist(), "value": float(v)} for k, v in zip(sel, vals))
    _emit({"d": d, "alpha": list(alpha), "r": r, "x": x.tolist(), "basis": rows}, args.out)
    return 0


def cmd_analyze(args) -> int:
    obj = _read_json(args.input)
    poly = PolynomialForm.from_json(obj)
    alpha = _alpha(args, poly.d)
    n = 4 if args.degree is None else args.degree
    spec = BasisSpec(poly.d, alpha, poly.r, max(n, poly.r))
    rules = None
    if args.quad_order is not None:
        rules = [gauss_laguerre_rule(a, args.quad_order) for a in alpha]
    form = analyze(poly, spec, rules)
    if args.tol is not None:
        form = form.prune(args.tol)
    _emit(form.to_json(), args.out)
    return 0


def _apply(op: str, form: SpectralForm, args) -> SpectralForm:
    rho = args.rho or 0.0
    if op == "delta":
        return apply_delta(form)
    if op == "delta-star":
        return apply_delta_star(form)
    if op == "laplacian":
        return apply_laplacian(form)
    if op in ("heat", "poisson"):
        if args.t is None:
            raise UsageError(f"--op {op} needs --t")
        return (heat if op == "heat" else poisson)(args.t, rho, form)
    if op == "riesz":
        return riesz(rho, form)
    if op == "riesz-star":
        return riesz_star(rho, form)
    if op == "power":
        return inverse_power(args.s, rho, form)
    if args.multiplier is None:
        raise UsageError("--op multiplier needs --multiplier FILE")
    return apply_multiplier(MultiplierSpec.from_json(_read_json(args.multiplier)), form)


def cmd_apply(args) -> int:
    form = _read_form(args.input)
    _emit(_apply(args.op, form, args).to_json(), args.out)
    return 0


def cmd_decompose(args) -> int:
    form = _read_form(args.input)
    split = decompose(form)
    residual = split.total().max_abs_diff(form)
    _emit(
        {
            "exact": split.exact_part.to_json(),
            "coexact": split.coexact_part.to_json(),
            "harmonic": split.harmonic_part.to_json(),
            "residual": residual,
        },
        args.out,
    )
    return 0


def cmd_solve(args) -> int:
    tol = FEASIBILITY_TOL if args.tol is None else args.tol
    if args.system == "derham":
        if args.input is None:
            raise UsageError("solve derham needs an input form")
        phi = _read_form(args.input)
        sol = solve_derham(phi, tol=tol)
        residual = apply_delta(sol).max_abs_diff(phi)
    else:
        phi = _read_form(args.phi) if args.phi else None
        psi = _read_form(args.psi) if args.psi else None
        if phi is None and psi is None:
            raise UsageError("solve hodge needs --phi and/or --psi")
        sol = solve_hodge_system(phi, psi, r=args.rank, tol=tol)
        residual = 0.0
        if phi is not None:
            residual = max(residual, apply_delta(sol).max_abs_diff(phi))
        if psi is not None:
            residual = max(residual, apply_delta_star(sol).max_abs_diff(psi))
    ok = residual <= tol
    _emit({"solution": sol.to_json(), "residual": residual, "tol": tol, "pass": ok}, args.out)
    return 0 if ok else 1


def _tol_overrides(items: Sequence[str] | None) -> dict:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects NAME=VALUE, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise UsageError(f"--tol value for {name!r} is not a number") from None
    return out


def cmd_verify(args) -> int:
    config = TestConfig(
        d=args.d,
        alpha=None if args.alpha is None else tuple(args.alpha),
        r=args.rank,
        rho=args.rho,
        degree_cap=args.degree,
        quad_order=args.quad_order,
        t_cap=args.t,
        p_list=None if args.p is None else tuple(args.p),
        seed=args.seed,
        cases=args.cases,
        tol=_tol_overrides(args.tol),
    )
    report = run_suite(args.suite, config)
    out = args.out or f"verify-{args.suite}.json"
    json_path, csv_path = report.write(out)
    for crit, ok in report.criteria().items():
        sec = report.timings.get(crit)
        timing = "" if sec is None else f" ({sec:.1f} s)"
        print(f"criterion {crit:>2}: {'PASS' if ok else 'FAIL'}{timing}")
    summary = report.summary()
    print(f"{args.suite}: {summary['cases']} cases, {summary['failures']} failures, {report.runtime:.1f} s")
    print(f"report: {json_path} (csv: {csv_path})")
    if not report.passed:
        for c in report.failures:
            print(f"  FAIL {c.name}: residual {c.residual:.3e} > bound {c.bound:.3e}")
        return 1
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hodge-laguerre", description="Hodge-Laguerre spectral toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, form_space=True):
        p.add_argument("--alpha", type=_floats, help="type parameters a1,a2,... (one value is broadcast)")
        p.add_argument("--out", help="output path (default: stdout)")
        if form_space:
            p.add_argument("--d", type=int, help="dimension")
            p.add_argument("--rank", type=int, help="form rank r")
            p.add_argument("--degree", type=int, help="degree cap N")

    p = sub.add_parser("basis", help="values of the basis forms at one point")
    common(p)
    p.add_argument("--x", type=_floats, help="evaluation point (default 1,...,1)")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("analyze", help="polynomial form JSON -> spectral coefficients")
    common(p, form_space=False)
    p.add_argument("input", help="polynomial form JSON file or - for stdin")
    p.add_argument("--degree", type=int, help="degree cap N (default 4)")
    p.add_argument("--quad-order", type=int, help="Gauss nodes per axis")
    p.add_argument("--tol", type=float, help="drop coefficients below this magnitude")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("apply", help="apply an operator to a spectral form")
    p.add_argument("input", help="spectral form JSON file or - for stdin")
    p.add_argument("--op", required=True, choices=OPS)
    p.add_argument("--rho", type=float, help="spectral shift (default 0)")
    p.add_argument("--t", type=float, help="semigroup time")
    p.add_argument("--s", type=float, default=0.5, help="exponent for --op power (default 0.5)")
    p.add_argument("--multiplier", help="multiplier JSON for --op multiplier")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("decompose", help="exact / coexact / harmonic split")
    p.add_argument("input", help="spectral form JSON file or - for stdin")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("solve", help="solve the Hodge system or the de Rham equation")
    p.add_argument("system", choices=("hodge", "derham"))
    p.add_argument("input", nargs="?", help="right-hand side for derham")
    p.add_argument("--phi", help="closed (r+1)-form for hodge")
    p.add_argument("--psi", help="co-closed (r-1)-form for hodge")
    p.add_argument("--rank", type=int, help="rank of the unknown (hodge)")
    p.add_argument("--tol", type=float, help=f"feasibility and residual tolerance (default {FEASIBILITY_TOL:g})")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES) + ["all"])
    common(p)
    p.add_argument("--quad-order", type=int, help="x-quadrature nodes per axis")
    p.add_argument("--rho", type=float, help="spectral shift")
    p.add_argument("--p", type=_floats, help="exponents p1,p2,...")
    p.add_argument("--t", type=float, help="cap of the t-integration")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, help="override the per-battery sample count")
    p.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a named tolerance")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors itself
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, HodgeLaguerreError) as exc:
        code = getattr(exc, "code", "usage")
        print(f"error [{code}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
