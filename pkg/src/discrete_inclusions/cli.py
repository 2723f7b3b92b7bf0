"""Command-line front end.

    discrete-inclusions build-matrix "fourth_order(9)"
    discrete-inclusions spectrum "second_order(5)"
    discrete-inclusions check    --scenario s.json
    discrete-inclusions interval --scenario s.json
    discrete-inclusions solve    --scenario s.json [--out DIR] [--seed N] [--tol X]
    discrete-inclusions oracle   --scenario s.json [--radius R] [--points N]
    discrete-inclusions run      --scenario s.json --out DIR

Exit codes: 0 success, 2 hypotheses fail, 3 solver shortfall,
64 unreadable scenario, 65 invalid scenario contents.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from .errors import InclusionError, ParseError, ValidationError
from .matrix_zoo import spectrum
from .scenario import (
    EXIT_HYPOTHESIS,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_SHORTFALL,
    EXIT_VALIDATION,
    build_matrix,
    load_scenario,
    resolve,
    run_scenario,
    write_solutions_csv,
)
from .solvers import brute_force_oracle, find_multiplicity, start_box_radius

DEFAULT_POINTS = {1: 4001, 2: 401, 3: 61}


def _matrix_from_args(args):
    if args.spec is not None:
        return build_matrix(args.spec)
    if args.scenario is None:
        raise ParseError("give a matrix spec such as 'second_order(5)' or --scenario")
    return build_matrix(load_scenario(args.scenario).matrix_spec)


def _resolved(args):
    if args.scenario is None:
        raise ParseError("--scenario is required")
    return resolve(load_scenario(args.scenario), args.seed, args.tol)


def _print_solutions(solutions):
    for s in solutions:
        comps = " ".join(f"{x:.12g}" for x in s.u)
        print(f"{s.kind:<16} residual={s.residual:.3e} energy={s.energy:.12g}  u=[{comps}]")


def cmd_build_matrix(args):
    A = _matrix_from_args(args)
    for row in A.entries:
        print(" ".join(f"{x:g}" for x in row))
    return EXIT_OK


def cmd_spectrum(args):
    for x in spectrum(_matrix_from_args(args)).eigenvalues:
        print(repr(x))
    return EXIT_OK


def cmd_check(args):
    r = _resolved(args)
    print(json.dumps({"satisfied": r.satisfied, **r.hypothesis}, indent=2, default=str))
    return EXIT_OK if r.satisfied else EXIT_HYPOTHESIS


def cmd_interval(args):
    r = _resolved(args)
    left, right = r.admissible
    print(f"{left!r} {right!r}")
    return EXIT_OK if r.satisfied else EXIT_HYPOTHESIS


def cmd_solve(args):
    r = _resolved(args)
    if r.lam is None:
        raise ValidationError("lambda is auto_mid but the hypotheses fail; give lambda explicitly")
    p = r.problem()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = find_multiplicity(p, r.cfg, r.scenario.kind, delta=r.scenario.delta, admissible=r.admissible)
    print(f"lambda = {p.lam!r}, claims met: {report.claims_met}")
    _print_solutions(report.solutions)
    for note in report.warnings:
        print(f"warning: {note}", file=sys.stderr)
    if args.out:
        from pathlib import Path

        Path(args.out).mkdir(parents=True, exist_ok=True)
        write_solutions_csv(Path(args.out) / "solutions.csv", report.solutions, p.order)
    return EXIT_OK if report.claims_met else EXIT_SHORTFALL


def cmd_oracle(args):
    r = _resolved(args)
    if r.lam is None:
        raise ValidationError("lambda is auto_mid but the hypotheses fail; give lambda explicitly")
    p = r.problem()
    radius = args.radius if args.radius is not None else start_box_radius(p, r.scenario.delta)
    points = args.points if args.points is not None else DEFAULT_POINTS.get(p.order, 2)
    sols = brute_force_oracle(p, radius, points, r.cfg)
    print(f"lambda = {p.lam!r}, radius = {radius!r}, points per axis = {points}")
    _print_solutions(sols)
    return EXIT_OK


def cmd_run(args):
    if args.scenario is None:
        raise ParseError("--scenario is required")
    code, report = run_scenario(load_scenario(args.scenario), args.out, args.seed, args.tol)
    print(f"lambda = {report['lambda']!r}, hypotheses satisfied: {report['hypotheses_satisfied']}, "
          f"claims met: {report['claims_met']}, solutions: {len(report['solutions'])}")
    return code


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario JSON file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="seed for the random starts")
    common.add_argument("--tol", type=float, help="residual tolerance for certification")

    parser = argparse.ArgumentParser(prog="discrete-inclusions", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, helptext in (
        ("build-matrix", cmd_build_matrix, "print a structured matrix"),
        ("spectrum", cmd_spectrum, "print the eigenvalues, ascending"),
    ):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("spec", nargs="?", help="matrix spec, e.g. 'tridiagonal(5,-1,2)'")
        sp.set_defaults(func=fn)
    for name, fn, helptext in (
        ("check", cmd_check, "evaluate the scenario's hypotheses"),
        ("interval", cmd_interval, "print the admissible lambda range"),
        ("solve", cmd_solve, "search for multiple solutions"),
        ("run", cmd_run, "check, solve and write report.json and solutions.csv"),
    ):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.set_defaults(func=fn)
    sp = sub.add_parser("oracle", parents=[common], help="lattice scan for all solutions (T <= 3)")
    sp.add_argument("--radius", type=float)
    sp.add_argument("--points", type=int)
    sp.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, InclusionError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
