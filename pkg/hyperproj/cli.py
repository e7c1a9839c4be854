"""Command-line front end.

    python -m hyperproj project PROBLEM      project the query point
    python -m hyperproj gap PROBLEM          gap vector between A and H
    python -m hyperproj classify PROBLEM     classify a pair of hyperplanes
    python -m hyperproj experiment --out CSV cyclic projection experiment
    python -m hyperproj example NAME         write a demonstration problem

Mathematical outcomes (empty intersections, infeasible systems) always exit
with status 0.
"""
import argparse
import enum
import logging
import sys
import typing

import numpy as np

from hyperproj.config import cfg
from hyperproj.errors import (
    DimensionMismatchError,
    HyperprojError,
    InvalidExperimentConfigError,
    InvalidToleranceError,
    ProblemFileParseError,
)
from hyperproj.geometry import Infeasible, Tolerances, affine_from_linear_system, affine_project
from hyperproj.intersection import classify_hyperplane_pair, gap_vector, project_affine_hyperplane, project_two_hyperplanes
from hyperproj.problem_file import (
    EXAMPLES,
    ProblemFile,
    ProblemKind,
    example_problem,
    format_number,
    format_problem,
    format_vector,
    load_problem,
    random_problem,
)
from hyperproj.solvers import ExperimentConfig, run_experiment

logging_config = cfg["logging"]

logger = logging.getLogger(__name__)

class ExitCode(enum.IntEnum):
    OK = 0
    PARSE_ERROR = 2
    DIMENSION_MISMATCH = 3
    OUTPUT_ERROR = 4

Output = typing.TextIO

def _read_problem(path: str) -> ProblemFile:
    try:
        return load_problem(path)
    except OSError as e:
        raise ProblemFileParseError(0, "file", f"cannot read {path}: {e.strerror}")

def _tolerances(args: argparse.Namespace) -> Tolerances:
    overrides = {
        name: value
        for name, value in (("tol_orth", args.tol_orth), ("tol_rank", args.tol_rank), ("tol_feas", args.tol_feas))
        if value is not None
    }
    return Tolerances(**overrides)

def _require_kind(problem: ProblemFile, *kinds: ProblemKind) -> None:
    if problem.kind not in kinds:
        expected = " or ".join(kind.value for kind in kinds)
        raise ProblemFileParseError(0, "kind", f"expected a {expected} problem, got {problem.kind.value}")

def _print_field(out: Output, name: str, value: str) -> None:
    print(f"{name}: {value}", file=out)

def cmd_project(args: argparse.Namespace, out: Output) -> ExitCode:
    tol = _tolerances(args)
    problem = _read_problem(args.problem)
    _print_field(out, "kind", problem.kind.value)

    if problem.kind is ProblemKind.LINEAR_SYSTEM:
        matrix, rhs = problem.linear_system()
        solution_set = affine_from_linear_system(matrix, rhs, tol)
        if isinstance(solution_set, Infeasible):
            _print_field(out, "status", "infeasible")
            _print_field(out, "residual", format_number(solution_set.residual))
            return ExitCode.OK
        _print_field(out, "status", "feasible")
        _print_field(out, "anchor", format_vector(solution_set.anchor))
        _print_field(out, "solution_dim", str(solution_set.dim))
        if problem.query is not None:
            _print_field(out, "point", format_vector(affine_project(solution_set, problem.query)))
        return ExitCode.OK

    if problem.kind is ProblemKind.TWO_HYPERPLANES:
        first, second = problem.hyperplanes
        result = project_two_hyperplanes(first, second, problem.query, tol)
    else:
        result = project_affine_hyperplane(problem.affine_subspace(tol), problem.hyperplanes[0], problem.query, tol)
    _print_field(out, "case", result.case.value)
    _print_field(out, "point", format_vector(result.point))
    if np.any(result.gap):
        _print_field(out, "gap", format_vector(result.gap))
        _print_field(out, "gap_norm", format_number(float(np.linalg.norm(result.gap))))
    _print_field(out, "parallel_norm", format_number(result.parallel_norm))
    if result.determinant is not None:
        _print_field(out, "determinant", format_number(result.determinant))
    return ExitCode.OK

def cmd_gap(args: argparse.Namespace, out: Output) -> ExitCode:
    tol = _tolerances(args)
    problem = _read_problem(args.problem)
    _require_kind(problem, ProblemKind.AFFINE_HYPERPLANE, ProblemKind.TWO_HYPERPLANES)
    gap = gap_vector(problem.affine_subspace(tol), problem.hyperplanes[-1], tol)
    _print_field(out, "gap", format_vector(gap))
    _print_field(out, "gap_norm", format_number(float(np.linalg.norm(gap))))
    _print_field(out, "status", "disjoint" if np.any(gap) else "intersecting")
    return ExitCode.OK

def cmd_classify(args: argparse.Namespace, out: Output) -> ExitCode:
    tol = _tolerances(args)
    problem = _read_problem(args.problem)
    _require_kind(problem, ProblemKind.TWO_HYPERPLANES)
    classification = classify_hyperplane_pair(*problem.hyperplanes, tol)
    _print_field(out, "pair", classification.kind.value)
    _print_field(out, "determinant", format_number(classification.determinant))
    return ExitCode.OK

def cmd_experiment(args: argparse.Namespace, out: Output) -> ExitCode:
    tol = _tolerances(args)
    flags = {
        "rows": args.rows,
        "cols": args.cols,
        "instances": args.instances,
        "starts_per_instance": args.starts,
        "iterations": args.iters,
        "seed": args.seed,
        "processes": args.processes,
    }
    config = ExperimentConfig(**{name: value for name, value in flags.items() if value is not None}, orthonormal_rows=args.orthonormal_rows)
    try:
        f = open(args.out, "w", encoding="utf-8", newline="")
    except OSError as e:
        print(f"error: cannot write {args.out}: {e.strerror}", file=sys.stderr)
        return ExitCode.OUTPUT_ERROR
    with f:
        table = run_experiment(config, tol)
        f.write(table.to_csv_text())
    single = table.median_db_single[-1]
    paired = table.median_db_paired[-1]
    _print_field(out, "iterations", str(config.iterations))
    _print_field(out, "final_median_db_single", format_number(single))
    _print_field(out, "final_median_db_paired", format_number(paired))
    _print_field(out, "db_gap", format_number(single - paired))
    return ExitCode.OK

def cmd_example(args: argparse.Namespace, out: Output) -> ExitCode:
    if args.random is not None:
        problem = random_problem(ProblemKind(args.random), dim=args.dim, seed=args.seed)
    elif args.name in EXAMPLES:
        problem = example_problem(args.name)
    elif args.name is not None:
        raise ProblemFileParseError(0, "example", f"unknown example {args.name!r}")
    else:
        raise ProblemFileParseError(0, "example", "give an example name or --random KIND")
    text = format_problem(problem)
    if args.out is None:
        out.write(text)
        return ExitCode.OK
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        print(f"error: cannot write {args.out}: {e.strerror}", file=sys.stderr)
        return ExitCode.OUTPUT_ERROR
    return ExitCode.OK

def build_parser() -> argparse.ArgumentParser:
    tolerance_flags = argparse.ArgumentParser(add_help=False)
    tolerance_flags.add_argument("--tol-orth", type=float, default=None, help="orthonormality drift bound")
    tolerance_flags.add_argument("--tol-rank", type=float, default=None, help="relative threshold deciding P_U(c) = 0")
    tolerance_flags.add_argument("--tol-feas", type=float, default=None, help="relative residual deciding feasibility")

    parser = argparse.ArgumentParser(prog="hyperproj", description="Exact projections onto intersections of affine subspaces and hyperplanes.")
    parser.add_argument("--verbose", action="store_true", help="log progress at INFO level")
    commands = parser.add_subparsers(dest="command", required=True)

    for name, handler, help_text in (
        ("project", cmd_project, "project the query point of a problem file"),
        ("gap", cmd_gap, "gap vector between A and H"),
        ("classify", cmd_classify, "classify the two hyperplanes of a problem file"),
    ):
        command = commands.add_parser(name, parents=[tolerance_flags], help=help_text)
        command.add_argument("problem", help="problem file")
        command.set_defaults(handler=handler)

    experiment = commands.add_parser("experiment", parents=[tolerance_flags], help="cyclic projection experiment")
    experiment.add_argument("--rows", type=int, default=None)
    experiment.add_argument("--cols", type=int, default=None)
    experiment.add_argument("--instances", type=int, default=None)
    experiment.add_argument("--starts", type=int, default=None, help="starting points per instance")
    experiment.add_argument("--iters", type=int, default=None, help="sweeps per starting point")
    experiment.add_argument("--seed", type=int, default=None)
    experiment.add_argument("--processes", type=int, default=None)
    experiment.add_argument("--orthonormal-rows", action="store_true", help="orthonormalize the rows of each M")
    experiment.add_argument("--out", required=True, help="CSV output path")
    experiment.set_defaults(handler=cmd_experiment)

    example = commands.add_parser("example", help="write a demonstration problem file")
    example.add_argument("name", nargs="?", help=f"one of: {', '.join(sorted(EXAMPLES))}")
    example.add_argument("--random", choices=[kind.value for kind in ProblemKind], default=None, help="seeded random problem of this kind")
    example.add_argument("--dim", type=int, default=5)
    example.add_argument("--seed", type=int, default=0)
    example.add_argument("--out", default=None, help="output path (default: stdout)")
    example.set_defaults(handler=cmd_example)
    return parser

def main(argv: typing.Optional[typing.List[str]] = None, out: typing.Optional[Output] = None) -> int:
    if out is None:
        out = sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging_config["level"])
    try:
        return int(args.handler(args, out))
    except DimensionMismatchError as e:
        print(f"error: {e}", file=sys.stderr)
        return ExitCode.DIMENSION_MISMATCH
    except (ProblemFileParseError, InvalidToleranceError, InvalidExperimentConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return ExitCode.PARSE_ERROR
    except HyperprojError as e:
        logger.error("%s", e)
        return ExitCode.PARSE_ERROR
