"""Command line entry point ``regdet``.

Subcommands::

    regdet symbolic verify --max-m 8 [--json out.json]
    regdet numeric verify --dim 6 --max-m 5 --trials 20 --seed 42 --norm 0.4 --tol 1e-9
    regdet show Xm --m 3 [--grade K1 K2]
    regdet detm matrix.json --m 2 --method all

Exit codes: 0 all pass, 1 verification failure, 2 usage or I/O error,
3 numerical breakdown.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from regdet import formulas, matnum
from regdet.freealg import bigraded_component
from regdet.report import SuiteReport, report_json

log = logging.getLogger("regdet")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(report: SuiteReport, json_out: str | None) -> None:
    if json_out:
        try:
            report_json(report, json_out)
        except OSError as exc:
            raise UsageError(f"cannot write report: {exc}") from exc
        status = "PASS" if report.passed else "FAIL"
        print(f"{report.suite}: {status} ({len(report.cases)} cases) -> {json_out}")
    else:
        print(report.to_json())


def cmd_symbolic_verify(max_m: int, json_out: str | None = None) -> tuple[SuiteReport, int]:
    if max_m < 1:
        raise UsageError("--max-m must be >= 1")
    t0 = time.perf_counter()
    report = SuiteReport("symbolic")
    for rec in formulas.symbolic_records(max_m):
        counts = rec.term_counts
        report.add(
            rec.identity,
            rec.parameters,
            rec.passed,
            term_count=next(iter(counts.values()), None),
            term_counts=counts or None,
        )
        log.info("%s %s %s", "PASS" if rec.passed else "FAIL", rec.identity, rec.parameters)
    report.elapsed = time.perf_counter() - t0
    _emit(report, json_out)
    return report, EXIT_OK if report.passed else EXIT_FAIL


def _numeric_trial(A, B, trial: int, max_m: int, tol: float) -> tuple[list[dict], bool]:
    cases = []
    breakdown = False
    with_series = max(matnum.schatten_norm(A, math.inf), matnum.schatten_norm(B, math.inf)) < 1
    trace_scale = max(1.0, matnum.schatten_norm(A, 1), matnum.schatten_norm(B, 1))
    for m in range(1, max_m + 1):
        params = {"trial": trial, "m": m}
        res = matnum.product_formula_residual(A, B, m)
        cases.append({"name": "product_formula", "parameters": params, "pass": res < tol,
                      "residual": res})

        methods = ["regularized", "spectral"] + (["logseries"] if with_series else [])
        rep = matnum.detm_report(A, m, methods)
        case = {"name": "detm_cross_path", "parameters": params,
                "pass": not rep.errors and rep.cross_path_spread < tol,
                "residual": rep.cross_path_spread}
        if rep.errors:
            case["error"] = "; ".join(f"{k}: {v}" for k, v in rep.errors.items())
            breakdown = True
        cases.append(case)

        gap = matnum.trace_identity_check(A, B, m) / trace_scale ** (2 * m)
        cases.append({"name": "trace_identity", "parameters": params, "pass": gap < tol,
                      "residual": gap})
    return cases, breakdown


def cmd_numeric_verify(dim: int = 6, max_m: int = 5, trials: int = 20, seed: int = 42,
                       norm: float = 0.4, tol: float = 1e-9, json_out: str | None = None,
                       threads: int | None = None, fixed=None) -> tuple[SuiteReport, int]:
    """``fixed`` is an optional (A, B) pair used instead of random matrices."""
    if dim < 1 or trials < 1 or max_m < 1:
        raise UsageError("--dim, --trials and --max-m must be >= 1")
    if not norm > 0 or not tol > 0:
        raise UsageError("--norm and --tol must be positive")
    t0 = time.perf_counter()
    if fixed is not None:
        pairs = [fixed]
    else:
        pairs = [
            (matnum.random_test_matrix(dim, norm, [seed, t, 0]),
             matnum.random_test_matrix(dim, norm, [seed, t, 1]))
            for t in range(trials)
        ]
    with ThreadPoolExecutor(max_workers=threads or os.cpu_count() or 1) as pool:
        results = list(pool.map(lambda it: _numeric_trial(it[1][0], it[1][1], it[0], max_m, tol),
                                enumerate(pairs)))
    report = SuiteReport("numeric")
    breakdown = False
    for cases, broke in results:
        report.cases.extend(cases)
        breakdown |= broke
    report.elapsed = time.perf_counter() - t0
    _emit(report, json_out)
    if breakdown:
        return report, EXIT_NUMERIC
    return report, EXIT_OK if report.passed else EXIT_FAIL


def cmd_show(what: str, m: int | None, grade: tuple[int, int] | None = None) -> str:
    builders = {"Xm": formulas.build_X_m, "Xtilde": formulas.build_Xtilde_m, "Zm": formulas.build_Z_m}
    if what == "zk":
        if grade is None:
            raise UsageError("show zk needs --grade K1 K2")
        k1, k2 = grade
        if k1 < 0 or k2 < 0:
            raise UsageError("grade entries must be >= 0")
        return str(formulas.build_z_bigraded(k1, k2))
    if what not in builders:
        raise UsageError(f"unknown selector {what!r}")
    if m is None or m < 1:
        raise UsageError("--m must be >= 1")
    p = builders[what](m)
    if grade is not None:
        if min(grade) < 0:
            raise UsageError("grade entries must be >= 0")
        p = bigraded_component(p, *grade)
    return str(p)


_METHODS = {"lu": ["regularized"], "eig": ["spectral"], "series": ["logseries"],
            "all": ["regularized", "spectral", "logseries"]}


def cmd_detm(input_a: str, m: int, method: str = "all") -> tuple[dict, int]:
    if m < 1:
        raise UsageError("--m must be >= 1")
    try:
        with open(input_a, encoding="utf-8") as fh:
            A = matnum.load_matrix(fh.read())
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    rep = matnum.detm_report(A, m, _METHODS[method])
    out = rep.to_dict()
    code = EXIT_OK
    for name, msg in rep.errors.items():
        inapplicable_series = method == "all" and name == "logseries" and "norm" in msg
        if not inapplicable_series:
            code = EXIT_NUMERIC
    return out, code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regdet", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sym = sub.add_parser("symbolic", help="exact identities in Q<a,b>")
    sym_sub = sym.add_subparsers(dest="action", required=True)
    sv = sym_sub.add_parser("verify")
    sv.add_argument("--max-m", type=int, default=8)
    sv.add_argument("--json", dest="json_out")

    num = sub.add_parser("numeric", help="finite-matrix product formula checks")
    num_sub = num.add_subparsers(dest="action", required=True)
    nv = num_sub.add_parser("verify")
    nv.add_argument("--dim", type=int, default=6)
    nv.add_argument("--max-m", type=int, default=5)
    nv.add_argument("--trials", type=int, default=20)
    nv.add_argument("--seed", type=int, default=42)
    nv.add_argument("--norm", type=float, default=0.4)
    nv.add_argument("--tol", type=float, default=1e-9)
    nv.add_argument("--threads", type=int, default=None)
    nv.add_argument("--a", dest="matrix_a", help="matrix JSON for A (with --b)")
    nv.add_argument("--b", dest="matrix_b", help="matrix JSON for B (with --a)")
    nv.add_argument("--json", dest="json_out")

    sh = sub.add_parser("show", help="print a polynomial")
    sh.add_argument("what", choices=["Xm", "Xtilde", "Zm", "zk"])
    sh.add_argument("--m", type=int)
    sh.add_argument("--grade", type=int, nargs=2, metavar=("K1", "K2"))

    dt = sub.add_parser("detm", help="regularized determinant of a matrix file")
    dt.add_argument("input_a")
    dt.add_argument("--m", type=int, required=True)
    dt.add_argument("--method", choices=list(_METHODS), default="all")
    return parser


def _read_matrix(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return matnum.load_matrix(fh.read())
    except (OSError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "symbolic":
            return cmd_symbolic_verify(args.max_m, args.json_out)[1]
        if args.command == "numeric":
            fixed = None
            if args.matrix_a or args.matrix_b:
                if not (args.matrix_a and args.matrix_b):
                    raise UsageError("--a and --b must be given together")
                fixed = (_read_matrix(args.matrix_a), _read_matrix(args.matrix_b))
                if fixed[0].shape != fixed[1].shape:
                    raise UsageError("--a and --b have different dimensions")
            return cmd_numeric_verify(args.dim, args.max_m, args.trials, args.seed, args.norm,
                                      args.tol, args.json_out, args.threads, fixed)[1]
        if args.command == "show":
            print(cmd_show(args.what, args.m, tuple(args.grade) if args.grade else None))
            return EXIT_OK
        if args.command == "detm":
            out, code = cmd_detm(args.input_a, args.m, args.method)
            print(json.dumps(out, indent=2))
            if code == EXIT_NUMERIC:
                print("; ".join(out.get("errors", {}).values()), file=sys.stderr)
            return code
    except UsageError as exc:
        print(f"regdet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except matnum.ConvergenceError as exc:
        print(f"regdet: numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
