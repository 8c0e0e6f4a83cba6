"""Command-line driver: ``phibvp solve | bounds | verify``.

Exit codes: 0 ok, 2 non-convergence or threshold miss, 3 invalid problem,
4 parse error.  Data goes to files or stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .apriori import bound_certificate, certify
from .errors import IterationCap, NonConvergence, ParseError, ValidationError
from .expr import Expression
from .grid import to_csv, write_atomic
from .operators import bc_residuals
from .oracle import CATALOG, compare, manufactured_problem, shooting_solve
from .phi import PhiModel, PowerSum, check_assumptions
from .problem import (
    Dirichlet,
    ProblemInstance,
    RhsFunction,
    SturmLiouville,
    check_sign_condition,
    default_v_box,
    estimate_growth_constants,
    sign_condition_witness,
)
from .solver import SolverConfig, solve

EXIT_OK = 0
EXIT_NONCONVERGENCE = 2
EXIT_INVALID = 3
EXIT_PARSE = 4

PHI_SAMPLES = np.concatenate([-np.logspace(-3, 3, 200)[::-1], [0.0], np.logspace(-3, 3, 200)])


class ProblemFileError(Exception):
    """Invalid problem file; ``code`` is the exit code to use."""

    def __init__(self, field, message, code=EXIT_INVALID, position=None):
        self.field = field
        self.message = message
        self.code = code
        self.position = position
        super().__init__(f"{field}: {message}")


def _get(d, key, path, kind=float, default=...):
    if not isinstance(d, dict):
        raise ProblemFileError(path, "expected an object")
    if key not in d:
        if default is ...:
            raise ProblemFileError(f"{path}.{key}" if path else key, "missing required field")
        return default
    val = d[key]
    where = f"{path}.{key}" if path else key
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
            raise ProblemFileError(where, f"expected a finite number, got {val!r}")
        return float(val)
    if kind is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise ProblemFileError(where, f"expected an integer, got {val!r}")
        return val
    if not isinstance(val, kind):
        raise ProblemFileError(where, f"expected {kind.__name__}, got {val!r}")
    return val


def problem_from_dict(data) -> tuple[ProblemInstance, dict]:
    """Build an instance and the solver overrides from decoded JSON."""
    if not isinstance(data, dict):
        raise ProblemFileError("$", "top level must be an object")
    try:
        phi_d = _get(data, "phi", "", dict)
        exps = _get(phi_d, "exponents", "phi", list)
        for i, e in enumerate(exps):
            if isinstance(e, bool) or not isinstance(e, (int, float)):
                raise ProblemFileError(f"phi.exponents[{i}]", f"expected a number, got {e!r}")
        weights = _get(phi_d, "weights", "phi", list, None)
        spec = PowerSum.of(exps, weights)
        k_phi = _get(phi_d, "k_phi", "phi", float, None)
        phi = PhiModel(spec, k_phi=k_phi)

        bc_d = _get(data, "bc", "", dict)
        kind = _get(bc_d, "kind", "bc", str)
        if kind == "dirichlet":
            bc = Dirichlet(_get(bc_d, "A", "bc"), _get(bc_d, "B", "bc"))
        elif kind == "sturm_liouville":
            bc = SturmLiouville(*(_get(bc_d, k, "bc") for k in ("alpha", "beta", "A", "a", "b", "B")))
        else:
            raise ProblemFileError("bc.kind", f"expected 'dirichlet' or 'sturm_liouville', got {kind!r}")

        f_d = _get(data, "f", "", dict)
        src = _get(f_d, "expr", "f", str)
        try:
            expr = Expression(src)
        except ParseError as exc:
            raise ProblemFileError("f.expr", str(exc), EXIT_PARSE, exc.position) from None
        rhs = RhsFunction(
            expr,
            _get(f_d, "R", "f"),
            _get(f_d, "S0", "f", float, 0.0),
            _get(f_d, "T0", "f", float, 0.0),
            _get(f_d, "v_box", "f", float, None),
        )
        grid_n = _get(data, "grid_n", "", int, 200)
        singular = _get(data, "left_endpoint_singular", "", bool, False)
        problem = ProblemInstance(phi, bc, rhs, grid_n, singular)

        overrides = _get(data, "solver", "", dict, {})
        allowed = set(SolverConfig.__dataclass_fields__)
        for key in overrides:
            if key not in allowed:
                raise ProblemFileError(f"solver.{key}", f"unknown option; expected one of {sorted(allowed)}")
    except ValidationError as exc:
        raise ProblemFileError(exc.field, exc.message) from None
    return problem, dict(overrides)


def load_problem(path) -> tuple[ProblemInstance, dict]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFileError("$", f"cannot read {path}: {exc.strerror}", EXIT_INVALID) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError("$", f"invalid JSON: {exc.msg}", EXIT_PARSE, exc.pos) from None
    return problem_from_dict(data)


def validate(problem: ProblemInstance, cert=None) -> dict:
    """Sampled hypothesis checks; returns a JSON-ready report with failures listed."""
    phi_rep = check_assumptions(problem.phi, PHI_SAMPLES)
    failures = []
    for name in phi_rep.failures():
        field = "phi.k_phi" if name == "phi4_k_inequality" else "phi"
        failures.append({"field": field, "check": name, "detail": phi_rep.checks[name].detail})
    report = {"phi": phi_rep.to_dict()}
    try:
        sign_ok = check_sign_condition(problem)
        witness = None if sign_ok else sign_condition_witness(problem)
    except ArithmeticError as exc:
        sign_ok, witness = False, str(exc)
    report["f1_sign"] = {
        "passed": sign_ok,
        "R": problem.f.R,
        "witness": witness,
        "note": "sampled on R < |x| <= 2R, not proven",
    }
    if not sign_ok:
        failures.append(
            {"field": "f.expr", "check": "f1_sign", "detail": f"x*f(t,x,0) > 0 fails for |x| > R={problem.f.R:g} at (t, x) = {witness}"}
        )
    if cert is not None and cert.r0 > 0:
        try:
            growth = estimate_growth_constants(problem, cert.r0, v_box=default_v_box(problem, cert.r1))
            report["f2_growth"] = growth.to_dict()
            if not growth.passed:
                failures.append(
                    {
                        "field": "f.T0",
                        "check": "f2_growth",
                        "detail": f"|f| exceeds S0*(phi(v)v - Phi(v)) + T0 at (t, x, v) = {growth.witness}; "
                        f"T0 >= {growth.min_T0:.6g} needed with S0={problem.f.S0:g}",
                    }
                )
        except ArithmeticError as exc:
            report["f2_growth"] = {"passed": False, "error": str(exc)}
            failures.append({"field": "f.expr", "check": "f2_growth", "detail": str(exc)})
    report["passed"] = not failures
    report["failures"] = failures
    return report


def _blank_summary(command, path):
    return {
        "command": command,
        "problem": str(path),
        "status": None,
        "exit_code": None,
        "message": "",
        "lambda_reached": None,
        "fixpoint_residual": None,
        "strong_residual": None,
        "picard_iters_total": None,
        "bc_residuals": None,
        "certificate": None,
        "certify": None,
        "assumption_report": None,
        "oracle_check": None,
        "timings": {},
        "version": __version__,
    }


def _emit_summary(summary, path):
    text = json.dumps(summary, indent=2, sort_keys=True, default=_json_default) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        write_atomic(path, text)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj)}")


def _err(msg):
    print(msg, file=sys.stderr)


def cmd_solve(args) -> int:
    path = Path(args.problem)
    out = Path(args.out) if args.out else path.with_suffix(".solution.csv")
    summary_path = args.summary if args.summary else path.with_suffix(".summary.json")
    summary = _blank_summary("solve", path)
    clock = time.perf_counter()

    def finish(code, status, message=""):
        summary["exit_code"] = code
        summary["status"] = status
        summary["message"] = message
        summary["timings"]["total_s"] = time.perf_counter() - clock
        _emit_summary(summary, summary_path)
        if message:
            _err(f"phibvp solve: {message}")
        return code

    try:
        problem, overrides = load_problem(path)
    except ProblemFileError as exc:
        status = "parse_error" if exc.code == EXIT_PARSE else "invalid_problem"
        msg = str(exc) if exc.position is None else f"{exc} [byte {exc.position}]"
        summary["error_field"] = exc.field
        summary["error_position"] = exc.position
        return finish(exc.code, status, msg)

    if args.n is not None:
        try:
            problem = problem.with_grid(args.n)
        except ValidationError as exc:
            return finish(EXIT_INVALID, "invalid_problem", str(exc))
    if args.tol is not None:
        overrides["fixpoint_tol"] = args.tol
    if args.theta is not None:
        overrides["theta"] = args.theta
    try:
        cfg = SolverConfig(**overrides)
    except (TypeError, ValueError) as exc:
        return finish(EXIT_INVALID, "invalid_problem", f"solver: {exc}")

    t0 = time.perf_counter()
    cert = None
    try:
        cert = bound_certificate(problem)
        summary["certificate"] = cert.to_dict()
    except (ValueError, IterationCap) as exc:
        return finish(EXIT_INVALID, "invalid_problem", f"certificate: {exc}")
    report = validate(problem, cert)
    summary["assumption_report"] = report
    summary["timings"]["validate_s"] = time.perf_counter() - t0
    if not report["passed"]:
        first = report["failures"][0]
        return finish(EXIT_INVALID, "invalid_problem", f"{first['field']}: {first['detail']}")

    t0 = time.perf_counter()
    try:
        sol = solve(problem, cfg)
    except NonConvergence as exc:
        summary["lambda_reached"] = exc.lambda_reached
        summary["fixpoint_residual"] = exc.last_residual
        summary["timings"]["solve_s"] = time.perf_counter() - t0
        return finish(EXIT_NONCONVERGENCE, "nonconvergence", str(exc))
    except ArithmeticError as exc:
        summary["timings"]["solve_s"] = time.perf_counter() - t0
        return finish(EXIT_INVALID, "invalid_problem", f"f.expr: {exc}")
    summary["timings"]["solve_s"] = time.perf_counter() - t0
    summary["lambda_reached"] = sol.lambda_reached
    summary["fixpoint_residual"] = sol.fixpoint_residual
    summary["strong_residual"] = sol.strong_residual
    summary["picard_iters_total"] = sol.picard_iters_total
    summary["bc_residuals"] = list(bc_residuals(sol.u, problem.bc))
    summary["certify"] = certify(sol.u, cert).to_dict()
    summary["grid_n"] = problem.grid_n

    if args.check:
        t0 = time.perf_counter()
        try:
            shot = shooting_solve(problem)
            eu, edu = compare(sol.u, shot.u)
            summary["oracle_check"] = {
                "sup_err_u": eu,
                "sup_err_du": edu,
                "free_param": shot.free_param,
                "bc_residual": shot.bc_residual,
            }
        except Exception as exc:  # oracle inapplicability is reported, not fatal
            summary["oracle_check"] = {"error": f"{type(exc).__name__}: {exc}"}
        summary["timings"]["oracle_s"] = time.perf_counter() - t0

    write_atomic(out, to_csv(sol.u))
    summary["solution_csv"] = str(out)
    return finish(EXIT_OK, "ok")


def cmd_bounds(args) -> int:
    try:
        problem, _ = load_problem(args.problem)
        cert = bound_certificate(problem)
    except ProblemFileError as exc:
        _err(f"phibvp bounds: {exc}")
        return exc.code
    except ValueError as exc:
        _err(f"phibvp bounds: {exc}")
        return EXIT_INVALID
    for key in ("r0", "r1", "C", "C0", "E", "k_phi", "s0_used", "t0_used"):
        print(f"{key}={getattr(cert, key):.17g}")
    print(f"branch={cert.branch}")
    print(f"degenerate={str(cert.degenerate).lower()}")
    return EXIT_OK


THRESHOLDS = {"linear": 1e-10}


def verify_threshold(profile, p):
    if profile in THRESHOLDS:
        return THRESHOLDS[profile]
    return 5e-4 if p == 2.0 else 5e-3


def cmd_verify(args) -> int:
    if args.profile not in CATALOG:
        _err(f"phibvp verify: unknown profile {args.profile!r}; choose from {', '.join(CATALOG)}")
        return EXIT_INVALID
    try:
        phi = PhiModel.power_sum([args.p])
    except ValidationError as exc:
        _err(f"phibvp verify: {exc}")
        return EXIT_INVALID
    rows = []
    try:
        for n in args.n_list:
            problem, exact = manufactured_problem(phi, args.profile, args.bc, n)
            sol = solve(problem)
            eu, edu = compare(sol.u, exact)
            rows.append((n, eu, edu, problem.left_endpoint_singular))
    except (ValueError, ValidationError) as exc:
        _err(f"phibvp verify: {exc}")
        return EXIT_INVALID
    except NonConvergence as exc:
        _err(f"phibvp verify: {exc}")
        return EXIT_NONCONVERGENCE
    print(f"# profile={args.profile} p={args.p:g} bc={args.bc}")
    print(f"{'n':>6} {'sup_err_u':>12} {'sup_err_du':>12} {'order':>6}")
    prev = None
    for n, eu, edu, singular in rows:
        order = ""
        if prev is not None and prev[1] > 0 and eu > 0:
            order = f"{math.log(prev[1] / eu) / math.log(n / prev[0]):6.2f}"
        flag = "  (endpoint t=0 extrapolated)" if singular else ""
        print(f"{n:6d} {eu:12.4e} {edu:12.4e} {order:>6}{flag}")
        prev = (n, eu)
    thr = verify_threshold(args.profile, args.p)
    final = rows[-1][1]
    ok = final <= thr
    print(f"# final error {final:.4e} {'<=' if ok else '>'} threshold {thr:.1e}")
    return EXIT_OK if ok else EXIT_NONCONVERGENCE


def build_parser():
    ap = argparse.ArgumentParser(prog="phibvp", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a problem file")
    s.add_argument("problem")
    s.add_argument("--n", type=int, help="grid intervals (even, >= 16)")
    s.add_argument("--tol", type=float, help="fixed-point tolerance in the C1 norm")
    s.add_argument("--theta", type=float, help="damping in (0, 1]")
    s.add_argument("--out", help="solution CSV (default: <problem>.solution.csv)")
    s.add_argument("--summary", help="summary JSON, '-' for stdout (default: <problem>.summary.json)")
    s.add_argument("--check", action="store_true", help="cross-check against the shooting oracle")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bounds", help="print the a priori radii and their constants")
    b.add_argument("problem")
    b.set_defaults(func=cmd_bounds)

    v = sub.add_parser("verify", help="grid-convergence study on a manufactured profile")
    v.add_argument("--profile", default="sin")
    v.add_argument("--p", "--p-exponent", dest="p", type=float, default=2.0)
    v.add_argument("--bc", choices=["dirichlet", "sturm_liouville"], default="dirichlet")
    v.add_argument("--n-list", dest="n_list", type=int, nargs="+", default=[50, 100, 200])
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
