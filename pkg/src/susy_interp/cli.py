"""Command-line front end.

Usage::

    susy-interp list [--json] [--family wilson]
    susy-interp interp radial-oscillator --omega 1 --g 1 --s 1
    susy-interp interp continuous-hahn --a 1 --b 1 --s 0.5 --json
    susy-interp eigensolve spt --g 2 --s 0.5 -k 5
    susy-interp verify all --seed 42

Exit codes: 0 pass, 2 invalid input, 3 identity check failed,
4 internal numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import continuum_families as cf
from . import continuum_interp as ci
from . import discrete_families as df
from .errors import (BranchError, ConvergenceError, DefectError, DomainError, EvaluationError,
                     IllConditionedError, ParameterError, PoleError)
from .spectral import Grid1D, discretize, eigen_lowest

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_IDENTITY = 3
EXIT_NUMERICAL = 4

DEFAULT_S_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
DEFAULT_DRAWS = 20
DEFAULT_MAX_DEGREE = 10

# per-check tolerances; SUSY_INTERP_TOL replaces all of them
TOLERANCES = {
    "operator": 1e-9,
    "prepotential": 1e-11,
    "shape": 1e-9,
    "potential": 1e-9,
    "boundary": 1e-10,
    "spectrum": 1e-8,
}

PARAM_FLAGS = ("omega", "g", "h", "mu", "lambda", "a", "b", "c", "d")


class InputError(Exception):
    pass


def tolerance(check: str) -> float:
    env = os.environ.get("SUSY_INTERP_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            raise InputError(f"SUSY_INTERP_TOL is not a number: {env!r}") from None
    return TOLERANCES[check]


@dataclass
class Report:
    command: str
    family: str
    parameters: dict
    s_values: list
    results: list = field(default_factory=list)
    passed: bool = True
    wall_time: float = 0.0
    notes: list = field(default_factory=list)

    def add(self, row: dict) -> None:
        self.results.append(row)
        if not row.get("pass", True):
            self.passed = False

    def as_dict(self) -> dict:
        return asdict(self)


def _num(v):
    """JSON-safe number: complex values become ``[re, im]``."""
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return v.real if v.imag == 0 else [v.real, v.imag]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _params(pv) -> dict:
    return {k: _num(v) for k, v in pv.as_dict().items()}


# --- family resolution -----------------------------------------------------------

def _resolve(name: str):
    try:
        return "continuum", cf.get_family(name)
    except KeyError:
        pass
    try:
        return "discrete", df.get_family(name)
    except KeyError:
        raise InputError(f"unknown family {name!r}; see `susy-interp list`") from None


def _all_families():
    return [("continuum", f) for f in cf.CONTINUUM_FAMILIES.values()] + \
           [("discrete", f) for f in df.DISCRETE_FAMILIES.values()]


def _collect_params(args, family) -> dict:
    given = {k: getattr(args, k.replace("lambda", "lam")) for k in PARAM_FLAGS}
    given = {k: v for k, v in given.items() if v is not None}
    names = family.parameter_names
    extra = set(given) - set(names)
    if extra:
        raise InputError(f"{family.id} does not take {sorted('--' + e for e in extra)}")
    missing = [n for n in names if n not in given]
    if missing:
        raise InputError(f"{family.id} needs {' '.join('--' + m for m in missing)}")
    return {n: given[n] for n in names}


def _parse_s(text: Optional[str]) -> Optional[list]:
    if text is None:
        return None
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"cannot parse s values {text!r}") from None
    for v in vals:
        if not 0.0 <= v <= 1.0:
            raise InputError(f"s must lie in [0, 1], got {v}")
    return vals


# --- output ----------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, list) and len(v) == 2 and all(isinstance(t, float) for t in v):
        return f"{v[0]:.10g}{v[1]:+.10g}i"
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, dict):
        return "(" + ", ".join(f"{k}={_fmt(x)}" for k, x in v.items()) + ")"
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def render_table(report: Report) -> str:
    out = [f"{report.command}: {report.family} {_fmt(report.parameters) if report.parameters else ''}".rstrip()]
    for row in report.results:
        out.append("  " + "  ".join(f"{k}={_fmt(v)}" for k, v in row.items()))
    out.extend(f"  note: {n}" for n in report.notes)
    out.append(f"{'PASS' if report.passed else 'FAIL'}  ({report.wall_time:.2f}s)")
    return "\n".join(out)


def render_csv(report: Report) -> str:
    pnames: list = []
    for row in report.results:
        for k in row.get("params", report.parameters):
            if k not in pnames:
                pnames.append(k)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, ["family", "s", *pnames, "residual", "pass", "check", "tolerance"],
                            restval="", extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in report.results:
        rec = {"family": row.get("family", report.family), "s": row.get("s", ""),
               "check": row.get("check", ""), "residual": row.get("residual", ""),
               "tolerance": row.get("tolerance", ""), "pass": row.get("pass", "")}
        for k, v in row.get("params", report.parameters).items():
            rec[k] = repr(v) if isinstance(v, float) else _fmt(v)
        writer.writerow(rec)
    return buf.getvalue()


def emit(report: Report, args) -> None:
    if getattr(args, "json", False):
        text = json.dumps(report.as_dict(), indent=2)
    elif getattr(args, "csv", False):
        text = render_csv(report)
    else:
        text = render_table(report)
    text = text.rstrip("\n")
    print(text)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


# --- list ---------------------------------------------------------------------------------

def _bound(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    for k, name in ((1, "pi"), (0.5, "pi/2")):
        if math.isclose(v, k * math.pi):
            return name
    return f"{v:g}"


def describe(kind: str, family) -> dict:
    if kind == "continuum":
        d = family.delta
        delta = f"{d[0]:g}" if len(d) == 1 else "(" + ",".join(f"{v:g}" for v in d) + ")"
        lo, hi = family.domain
        domain = f"({_bound(lo)}, {_bound(hi)})"
    else:
        delta = family.delta_text()
        if family.variable == "z":
            domain = "z = exp(i theta), 0 < theta < pi"
        elif family.id in ("continuous-dual-hahn", "wilson"):
            domain = "(0, inf)"
        else:
            domain = "(-inf, inf)"
    info = {"id": family.id, "kind": kind, "parameters": list(family.parameter_names),
            "ranges": family.ranges(), "delta": delta, "domain": domain}
    if kind == "discrete" and family.q is not None:
        info["q"] = family.q
    return info


def cmd_list(args) -> int:
    rows = _all_families()
    if args.family:
        rows = [_resolve(args.family)]
    descs = [describe(k, f) for k, f in rows]
    if args.json:
        print(json.dumps(descs if not args.family else descs[0], indent=2))
        return EXIT_OK
    for d in descs:
        print(f"{d['id']:<26} {d['kind']:<9} delta={d['delta']:<18} "
              f"params={','.join(d['parameters']):<10} {d['ranges']}  x in {d['domain']}")
    return EXIT_OK


# --- interp ----------------------------------------------------------------------------------

def _interp_continuum(report, family, params, s_values, mode):
    for s in s_values:
        if mode == "prepotential":
            res = cf.prepotential_coupling_map(family, params, s)
            chk = ci.verify_prepotential_interpolation(family, params, s)
            residual, tol = chk.max_abs_residual, tolerance("prepotential")
        else:
            res = cf.coupling_map(family, params, s)
            chk = ci.verify_operator_interpolation(family, params, s)
            residual, tol = chk.max_rel_residual, tolerance("operator")
        report.add({"family": family.id, "s": s, "check": mode, "params": dict(params),
                    "lambda_prime": _params(res.lambda_prime), "delta_E": res.delta_E,
                    "alpha": res.alpha, "residual": residual, "tolerance": tol,
                    "pass": bool(residual <= tol), "branch": res.branch_note})


def _interp_discrete(report, family, params, s_values, max_degree):
    for s in s_values:
        res = df.solve_shifted_parameters(family, params, s)
        chk = df.verify_potential_identity(family, params, s, solved=res)
        tol = tolerance("potential")
        row = {"family": family.id, "s": s, "check": "potential", "params": dict(params),
               "lambda_prime": [_num(v) for v in res.lambda_prime.values],
               "delta_E": res.delta_E_tilde, "alpha": res.alpha,
               "residual": chk.max_rel_residual, "tolerance": tol,
               "pass": bool(chk.max_rel_residual <= tol)}
        if res.boundary_matched is not None:
            row["boundary_matched"] = res.boundary_matched
            row["pass"] = row["pass"] and res.boundary_matched
        report.add(row)
        if max_degree:
            spec = df.verify_interpolated_spectrum(family, params, s, max_degree)
            tol = tolerance("spectrum")
            worst = max(spec.max_rel_residual, spec.triangular_defect)
            report.add({"family": family.id, "s": s, "check": "spectrum", "params": dict(params),
                        "eigenvalues": [float(np.real(v)) for v in spec.diagonal],
                        "residual": worst, "tolerance": tol, "pass": bool(worst <= tol)})


def cmd_interp(args) -> int:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", cf.ParameterWarning)
        report = _interp(args)
    report.notes.extend(str(w.message) for w in caught)
    return _finish(report, args)


def _interp(args) -> Report:
    kind, family = _resolve(args.family)
    if kind == "discrete":
        family = family.with_q(args.q)
    elif args.q is not None:
        raise InputError("--q applies to askey-wilson only")
    params = _collect_params(args, family)
    family.coerce(params)
    s_values = _parse_s(args.s) or [0.5]
    report = Report("interp", family.id, dict(params), s_values)
    if family.__class__ is df.DiscreteFamily and family.q is not None:
        report.notes.append(f"q={family.q}")
    if kind == "continuum":
        _interp_continuum(report, family, params, s_values, args.mode)
    else:
        _interp_discrete(report, family, params, s_values, args.max_degree)
    return report


# --- eigensolve -------------------------------------------------------------------------------

def cmd_eigensolve(args) -> int:
    kind, family = _resolve(args.family)
    if kind != "continuum":
        raise InputError("eigensolve supports the continuum families only")
    params = _collect_params(args, family)
    pv = family.coerce(params)
    s_values = _parse_s(args.s) or [0.0]
    if len(s_values) != 1:
        raise InputError("eigensolve takes a single s value")
    s = s_values[0]
    res = cf.coupling_map(family, pv, s)
    a, b = args.window if args.window else (family.eigen_window or family.window)
    grid = Grid1D(a, b, args.n)
    lo, hi = family.domain
    if grid.points[0] <= lo or grid.points[-1] >= hi:
        raise InputError(f"window [{a}, {b}] leaves the domain ({lo}, {hi})")
    k = args.k
    levels = cf.bound_state_count(family, res.lambda_prime)
    report = Report("eigensolve", family.id, dict(params), [s])
    if k > levels:
        report.notes.append(f"only {levels} bound states at lambda'={res.lambda_prime}; k reduced")
        k = int(levels)
    op = discretize(lambda x: ci.interp_potential_U_s(family, pv, s, x), grid)
    numeric = eigen_lowest(op, k)
    tol = args.tol
    for n in range(k):
        exact = cf.spectrum(family, res.lambda_prime, n) + res.delta_E
        err = abs(numeric[n] - exact) / max(1.0, abs(exact))
        report.add({"family": family.id, "s": s, "check": "eigenvalue", "n": n,
                    "params": dict(params), "numeric": float(numeric[n]), "analytic": exact,
                    "residual": err, "tolerance": tol, "pass": bool(err <= tol)})
    report.notes.append(f"lambda'={res.lambda_prime}, dE={res.delta_E:.12g}, grid=[{a:g}, {b:g}] n={args.n}")
    return _finish(report, args)


# --- verify ------------------------------------------------------------------------------------

def _verify_continuum(report, family, rng, s_values, draws):
    tol_op, tol_pp, tol_sh = tolerance("operator"), tolerance("prepotential"), tolerance("shape")
    for _ in range(draws):
        pv = cf.sample_parameters(family, rng)
        p = _params(pv)
        for s in s_values:
            r = ci.verify_operator_interpolation(family, pv, s)
            report.add({"family": family.id, "s": s, "check": "operator", "params": p,
                        "residual": r.max_rel_residual, "tolerance": tol_op,
                        "pass": bool(r.max_rel_residual <= tol_op)})
            r = ci.verify_prepotential_interpolation(family, pv, s)
            report.add({"family": family.id, "s": s, "check": "prepotential", "params": p,
                        "residual": r.max_abs_residual, "tolerance": tol_pp,
                        "pass": bool(r.max_abs_residual <= tol_pp)})
        r = ci.verify_shape_invariance(family, pv)
        report.add({"family": family.id, "s": None, "check": "shape", "params": p,
                    "residual": r.max_rel_residual, "tolerance": tol_sh,
                    "pass": bool(r.max_rel_residual <= tol_sh)})


def _verify_discrete(report, family, rng, s_values, draws, max_degree):
    tol_v, tol_b, tol_sp = tolerance("potential"), tolerance("boundary"), tolerance("spectrum")
    for _ in range(draws):
        pv = df.sample_parameters(family, rng)
        p = _params(pv)
        for s in s_values:
            res = df.solve_shifted_parameters(family, pv, s)
            r = df.verify_potential_identity(family, pv, s, solved=res)
            report.add({"family": family.id, "s": s, "check": "potential", "params": p,
                        "residual": r.max_rel_residual, "tolerance": tol_v,
                        "pass": bool(r.max_rel_residual <= tol_v)})
            if s in (0.0, 1.0):
                expected = pv if s == 0.0 else family.shifted(pv)
                dist = df.multiset_distance(res.lambda_prime.values, expected.values)
                report.add({"family": family.id, "s": s, "check": "boundary", "params": p,
                            "residual": dist, "tolerance": tol_b, "pass": bool(dist <= tol_b)})
            if max_degree:
                sp = df.verify_interpolated_spectrum(family, pv, s, max_degree)
                worst = max(sp.max_rel_residual, sp.triangular_defect)
                report.add({"family": family.id, "s": s, "check": "spectrum", "params": p,
                            "residual": worst, "tolerance": tol_sp, "pass": bool(worst <= tol_sp)})


def summarize(report: Report) -> list:
    groups: dict = {}
    for row in report.results:
        key = (row["family"], row["check"])
        g = groups.setdefault(key, {"family": row["family"], "check": row["check"], "cases": 0,
                                    "worst_residual": 0.0, "tolerance": row["tolerance"], "pass": True})
        g["cases"] += 1
        g["worst_residual"] = max(g["worst_residual"], row["residual"])
        g["pass"] = g["pass"] and row["pass"]
    return list(groups.values())


def cmd_verify(args) -> int:
    s_values = _parse_s(args.s) or list(DEFAULT_S_GRID)
    if args.scope == "all":
        targets = _all_families()
    else:
        targets = [_resolve(args.scope)]
    report = Report("verify", args.scope, {"seed": args.seed, "draws": args.draws}, s_values)
    for index, (kind, family) in enumerate(targets):
        rng = np.random.default_rng([args.seed, index])
        if kind == "continuum":
            _verify_continuum(report, family, rng, s_values, args.draws)
        else:
            _verify_discrete(report, family.with_q(args.q), rng, s_values, args.draws, args.max_degree)
    failing = next((r for r in report.results if not r["pass"]), None)
    if failing is not None:
        report.notes.append("first failure: " + json.dumps({k: _num(v) for k, v in failing.items()}))
    if not (args.json or args.csv):
        detail, report.results = report.results, summarize(report)
        code = _finish(report, args)
        report.results = detail
        return code
    return _finish(report, args)


def _finish(report: Report, args) -> int:
    report.wall_time = round(time.perf_counter() - args._t0, 3)
    emit(report, args)
    return EXIT_OK if report.passed else EXIT_IDENTITY


# --- parser ---------------------------------------------------------------------------------------

def _add_param_flags(p):
    g = p.add_argument_group("coupling constants")
    for name in PARAM_FLAGS:
        g.add_argument(f"--{name}", dest=name.replace("lambda", "lam"), type=float, default=None)
    g.add_argument("--q", type=float, default=None, help="Askey-Wilson base, 0 < q < 1 (default 0.5)")


def _add_output_flags(p):
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    p.add_argument("--out", default=None, help="also write the output to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="susy-interp",
                                     description="Interpolated SUSY-partner Hamiltonians of "
                                                 "shape-invariant systems")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="list the family catalog")
    p.add_argument("--family", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("interp", help="shifted couplings and identity residual")
    p.add_argument("family")
    _add_param_flags(p)
    p.add_argument("--s", "--s-grid", dest="s", default=None, help="s value or comma list")
    p.add_argument("--mode", choices=("operator", "prepotential"), default="operator",
                   help="continuum interpolation: operator mixture or prepotential mixture")
    p.add_argument("--max-degree", type=int, default=0,
                   help="discrete families: also check H~_s on polynomials up to this degree")
    _add_output_flags(p)
    p.set_defaults(func=cmd_interp)

    p = sub.add_parser("eigensolve", help="finite-difference spectrum of H_s vs closed form")
    p.add_argument("family")
    _add_param_flags(p)
    p.add_argument("--s", default=None)
    p.add_argument("--n", type=int, default=2000, help="interior grid points")
    p.add_argument("-k", type=int, default=5, help="number of levels")
    p.add_argument("--window", type=float, nargs=2, default=None, metavar=("A", "B"))
    p.add_argument("--tol", type=float, default=5e-3, help="max relative eigenvalue error")
    _add_output_flags(p)
    p.set_defaults(func=cmd_eigensolve)

    p = sub.add_parser("verify", help="randomized sweep of every identity check")
    p.add_argument("scope", help="'all' or a family id")
    p.add_argument("--s", "--s-grid", dest="s", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--draws", type=int, default=DEFAULT_DRAWS)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--max-degree", type=int, default=DEFAULT_MAX_DEGREE)
    _add_output_flags(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args._t0 = time.perf_counter()
    try:
        return args.func(args)
    except (InputError, ParameterError, BranchError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DefectError as exc:
        print(f"identity failure: {exc}", file=sys.stderr)
        return EXIT_IDENTITY
    except (ConvergenceError, IllConditionedError, PoleError, EvaluationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
