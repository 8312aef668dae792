"""Command-line harness: ``hvi run``, ``hvi validate`` and ``hvi suite``.

Exit codes
  run       0 ok, 2 monitor violation, 3 solver failure, 4 invalid input
  validate  0 consistent, 2 refuted, 3 no reference point available, 4 invalid input
  suite     0 all checks pass, 2 some check failed, 4 invalid or empty directory

Verbosity is read from the ``HVI_LOG`` environment variable (a logging level
name such as ``DEBUG``; default ``WARNING``).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .errors import HVIError, OracleNotAvailable
from .fields import monotonicity_falsifier
from .gap import eps_solution_check, fixed_point_residual, gap_estimate, solve_reference
from .manifold import Point
from .problem import ProblemSpec, load_problem
from .properties import enlargement_suite, geometry_suite
from .solver import run

EXIT_OK, EXIT_REFUTED, EXIT_FAILURE, EXIT_INVALID = 0, 2, 3, 4
log = logging.getLogger("hadamard_vi")


def _load(path, args) -> ProblemSpec:
    prob = load_problem(path)
    return prob.with_overrides(getattr(args, "max_iter", None), getattr(args, "stop_tol", None),
                               getattr(args, "seed", None))


def _reference(prob: ProblemSpec) -> Point:
    try:
        return solve_reference(prob).result
    except OracleNotAvailable:
        if prob.reference is not None:
            return prob.reference
        raise


def cmd_run(args) -> int:
    try:
        prob = _load(args.problem, args)
    except (HVIError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    report = run(prob.field, prob.omega, prob.solver, prob.p0, prob.reference)
    if args.trace:
        report.write_trace(args.trace)
    if args.cert:
        report.write_certificate(args.cert)
    print(json.dumps(report.certificate(), sort_keys=True))
    if report.status == "failure":
        print(f"solver failure: {report.message}", file=sys.stderr)
        return EXIT_FAILURE
    if not report.monitors_clean:
        for k, v in report.monitor_violations:
            print(f"monitor violation at step {k}: {v}", file=sys.stderr)
        return EXIT_REFUTED
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        prob = _load(args.problem, args)
        point = Point(prob.manifold, json.loads(args.point)) if args.point else None
    except (HVIError, OSError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if point is None:
        try:
            point = _reference(prob)
        except OracleNotAvailable as exc:
            print(f"no point supplied and no reference available: {exc}", file=sys.stderr)
            return EXIT_FAILURE
    if not prob.omega.contains(point, tol=1e-7):
        print("invalid input: point is not in omega", file=sys.stderr)
        return EXIT_INVALID
    est = gap_estimate(prob.field, prob.omega, point, args.samples, prob.seed)
    check = eps_solution_check(prob.field, prob.omega, point, args.eps, args.samples, prob.seed)
    cfg = prob.solver
    residuals = {str(a): fixed_point_residual(prob.field, prob.omega, point, a)
                 for a in (cfg.alpha_minus, 1.0, cfg.alpha_plus)}
    out = {"point": point.to_json(), "gap": est.to_json(), "eps_solution": check.to_json(),
           "fixed_point_residual": residuals,
           "verdict": "refuted" if check.refuted else "consistent"}
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_REFUTED if check.refuted else EXIT_OK


def _problem_checks(prob: ProblemSpec, samples: int) -> dict:
    checks = {}
    mono = monotonicity_falsifier(prob.field, 2000, prob.seed, center=prob.p0)
    checks["monotonicity"] = {"pass": not mono.refuted, "worst_margin": mono.worst_margin}
    ref = prob.reference
    if ref is None:
        try:
            ref = solve_reference(prob).result
        except OracleNotAvailable:
            ref = None
    report = run(prob.field, prob.omega, prob.solver, prob.p0, ref)
    checks["solver"] = {"pass": report.status != "failure", "status": report.status,
                        "iterations": report.iterations, "message": report.message}
    checks["monitors"] = {"pass": report.monitors_clean,
                          "violations": [f"{k}: {v}" for k, v in report.monitor_violations]}
    if report.status == "eps_solution":
        cert = eps_solution_check(prob.field, prob.omega, report.final_point, report.final_eps,
                                  samples, prob.seed)
        checks["certificate"] = {"pass": not cert.refuted, "worst_margin": cert.worst_margin}
    if ref is not None:
        fejer = [s.monitors.fejer_decrement for s in report.steps
                 if s.monitors.fejer_decrement is not None]
        checks["fejer"] = {"pass": all(f >= -1e-7 for f in fejer),
                           "worst_margin": min(fejer) if fejer else None}
        gap = gap_estimate(prob.field, prob.omega, ref, samples, prob.seed)
        checks["reference_gap"] = {"pass": gap.value_lower_bound <= 1e-6,
                                   "worst_margin": 1e-6 - gap.value_lower_bound}
    return checks


def cmd_suite(args) -> int:
    suite = Path(args.suite_dir)
    files = sorted(suite.glob("*.json")) if suite.is_dir() else []
    if not files:
        print(f"invalid input: no problem files in {suite}", file=sys.stderr)
        return EXIT_INVALID
    problems = {}
    manifolds = {}
    for f in files:
        try:
            prob = _load(f, args)
        except (HVIError, OSError) as exc:
            problems[f.name] = {"pass": False, "error": str(exc)}
            continue
        manifolds[json.dumps(prob.manifold.to_json(), sort_keys=True)] = prob.manifold
        checks = _problem_checks(prob, args.samples)
        failed = sorted(k for k, c in checks.items() if not c["pass"])
        problems[f.name] = {"pass": not failed, "failed": failed, "checks": checks}
        log.info("%s: %s", f.name, "pass" if not failed else f"FAIL {failed}")
    properties = {}
    for key in sorted(manifolds):
        g = geometry_suite(manifolds[key], n=10_000, seed=0)
        ok = (g["coslaw_violation"] <= 1e-8 and g["coslaw2_violation"] <= 1e-8
              and g["transport_isometry_error"] <= 1e-10 and g["exp_log_roundtrip_error"] <= 1e-8)
        properties[f"geometry {key}"] = {"pass": ok, **g}
    e = enlargement_suite()
    properties["enlargement"] = {"pass": e["zero_eps_exact"] and e["nesting_worst_margin"] >= -1e-9
                                 and e["interval_error"] <= 1e-3, **e}
    all_pass = all(p["pass"] for p in problems.values()) and all(p["pass"] for p in properties.values())
    report = {"pass": all_pass, "problems": problems, "properties": properties}
    text = json.dumps(report, indent=2, sort_keys=True, default=float)
    if args.report:
        Path(args.report).write_text(text + "\n")
    for name, p in problems.items():
        offenders = "" if p["pass"] else f" ({', '.join(p.get('failed', [])) or p.get('error')})"
        print(f"{'PASS' if p['pass'] else 'FAIL'} {name}{offenders}")
    for name, p in properties.items():
        print(f"{'PASS' if p['pass'] else 'FAIL'} {name}")
    return EXIT_OK if all_pass else EXIT_REFUTED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hvi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def overrides(p):
        p.add_argument("--max-iter", type=int, default=None)
        p.add_argument("--stop-tol", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("run", help="run the solver on a problem file")
    p.add_argument("problem")
    p.add_argument("--trace", help="CSV trace output path")
    p.add_argument("--cert", help="JSON certificate output path")
    overrides(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="gap and residual checks at a point")
    p.add_argument("problem")
    p.add_argument("--point", help="JSON array of ambient coordinates (default: reference solution)")
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--samples", type=int, default=4096)
    overrides(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("suite", help="run every problem in a directory plus the property suites")
    p.add_argument("suite_dir")
    p.add_argument("--report", help="aggregate JSON report path")
    p.add_argument("--samples", type=int, default=4096)
    overrides(p)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    level = getattr(logging, os.environ.get("HVI_LOG", "WARNING").upper(), None)
    logging.basicConfig(level=level if isinstance(level, int) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
