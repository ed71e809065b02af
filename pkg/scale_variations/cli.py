"""
scale-variations: solve and check nondifferentiable variational problems
=======================================================================

Problem files are JSON documents (run `scale-variations schema` for the
schema). Results go to --output-dir: report.json, one trajectory CSV per
root, identities.json.

Usage:
    # Find every free terminal point and its extremal
    scale-variations solve problem.json --output-dir out/

    # Re-check a trajectory against a problem
    scale-variations verify problem.json out/trajectory.csv

    # Residuals of the Leibniz, Barrow, parts and Taylor rules
    scale-variations identities --function weierstrass:0.5,3 --interval 0,1

    # Print the Euler-Lagrange equation and natural conditions
    scale-variations derive problem.json

Exit codes:
    0 - success (a verified root, a passing verdict, all identities pass)
    1 - invalid input: schema, expression, selector or grid mismatch
    2 - no root of the transversality condition (or none verified)
    3 - terminal point not determined (flat transversality residual)
    4 - the candidate fails the residual verdict (verify) or an identity fails (identities)
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ValidationError

from scale_variations.config import print_config_summary, settings
from scale_variations.exceptions import (
    ExpressionSyntaxError,
    GridMismatch,
    IndeterminateT,
    NoRoot,
    ScaleCalculusError,
)
from scale_variations.grid_core import SampledFn, make_grid
from scale_variations.holder_gen import parse_weierstrass_selector, smooth_catalogue, weierstrass
from scale_variations.identities import (
    IdentityReport,
    barrow_residual,
    default_ladder,
    default_offsets,
    holder_ladder,
    leibniz_residual,
    parts_residual,
    taylor_order_fit,
)
from scale_variations.logging_config import clear_run_context, get_logger, set_run_context, setup_logging
from scale_variations.models import (
    GateauxOut,
    IdentitiesReport,
    IdentityOut,
    LadderRungOut,
    ProblemFile,
    ResidualOut,
    RootOut,
    SolveReport,
    VerifyReport,
)
from scale_variations.scale_ops import LadderConfig, hscale_values_n, richardson_levels
from scale_variations.validation import validate_function_selector, validate_interval, validate_ladder
from scale_variations.variational import (
    Candidate,
    FixedTAB,
    FixedTC,
    VariationalProblem,
    admissible_variation,
    el_symbolic,
    gateaux_derivative,
    hypothesis_checks,
    residual_report,
    solve_free_T,
)

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_ROOT = 2
EXIT_INDETERMINATE = 3
EXIT_VERDICT = 4

GRID_ATOL = 1e-9
T_COMMENT = "# T = "
DEFAULT_LADDER = f"{2.0**-6!r},0.5,5"


# =============================================================================
# FILE HELPERS
# =============================================================================


def load_problem_file(path: Path) -> ProblemFile:
    """
    Read and validate a problem file.

    Raises:
        ValueError: unreadable JSON, with line and column
        ValidationError: schema violations
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    return ProblemFile.model_validate(data)


def write_json(path: Path, model: BaseModel) -> None:
    payload = model.model_dump(mode="json", by_alias=True)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def trajectory_frame(problem: VariationalProblem, candidate: Candidate) -> pd.DataFrame:
    """Columns t, re_y, im_y and re_dyk, im_dyk for k = 1..n; blank where Q^k y is undefined."""
    y = candidate.y
    size = y.grid.size
    frame = {"t": y.grid.nodes, "re_y": y.values.real, "im_y": y.values.imag}
    for k in range(1, problem.order + 1):
        column = np.full(size, np.nan, dtype=complex)
        column[k : size - k] = hscale_values_n(y.values, y.grid.h, k)
        frame[f"re_dy{k}"] = column.real
        frame[f"im_dy{k}"] = column.imag
    return pd.DataFrame(frame)


def write_trajectory(path: Path, problem: VariationalProblem, candidate: Candidate) -> None:
    """CSV preceded by a '# T = ...' comment line carrying the terminal point."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"{T_COMMENT}{candidate.T!r}\n")
        trajectory_frame(problem, candidate).to_csv(fh, index=False, float_format="%.17g", na_rep="")


def read_terminal_point(path: Path) -> Optional[float]:
    """T from the leading comment of a trajectory CSV, None when absent."""
    with Path(path).open(encoding="utf-8") as fh:
        first = fh.readline()
    if not first.startswith(T_COMMENT):
        return None
    try:
        return float(first[len(T_COMMENT) :])
    except ValueError as e:
        raise GridMismatch(f"{path}: unreadable terminal point {first.strip()!r}") from e


def read_trajectory(path: Path, problem: VariationalProblem) -> SampledFn:
    """
    Load t, re_y, im_y and check the nodes sit on the problem lattice.

    Raises:
        GridMismatch: step or offset differs from the problem grid by more than 1e-9
    """
    frame = pd.read_csv(path, comment="#")
    missing = {"t", "re_y", "im_y"} - set(frame.columns)
    if missing:
        raise GridMismatch(f"{path}: missing columns {sorted(missing)}")
    t = frame["t"].to_numpy(dtype=float)
    h = problem.grid_h
    if len(t) < 2 or np.max(np.abs(np.diff(t) - h)) > GRID_ATOL:
        raise GridMismatch(f"{path}: node spacing does not match h={h}")
    halo = int(round((problem.a - t[0]) / h))
    if halo < 0 or abs(problem.a - halo * h - t[0]) > GRID_ATOL:
        raise GridMismatch(f"{path}: first node {t[0]!r} is not a - k*h for the problem grid")
    cells = len(t) - 1 - 2 * halo
    if cells < 1:
        raise GridMismatch(f"{path}: no core nodes beyond the halo")
    grid = make_grid(problem.a, problem.a + cells * h, h, halo)
    values = frame["re_y"].to_numpy(dtype=float) + 1j * frame["im_y"].to_numpy(dtype=float)
    return SampledFn(grid, values)


# =============================================================================
# COMMANDS
# =============================================================================


def _root_out(extremal, name: Optional[str], warnings: List[str]) -> RootOut:
    base = ResidualOut.of(extremal.T, extremal.report)
    return RootOut(**base.model_dump(), iterations=extremal.iterations, trajectory=name, warnings=warnings)


def _extrapolate_roots(rungs: List[LadderRungOut], ratio: float) -> Optional[List[float]]:
    counts = {len(r.roots) for r in rungs}
    if len(rungs) < 3 or len(counts) != 1 or counts == {0}:
        return None
    per_root = zip(*[r.roots for r in rungs])
    return [float(richardson_levels(list(values), ratio)[-1][0]) for values in per_root]


def cmd_solve(args: argparse.Namespace) -> int:
    pf = load_problem_file(args.problem)
    steps = [args.h] if args.h else pf.grid.steps()
    out_dir = Path(args.output_dir)
    problem = pf.to_problem(steps[-1], args.tol)
    described = problem.describe()

    ladder: List[LadderRungOut] = []
    for h in steps[:-1]:
        try:
            coarse = solve_free_T(pf.to_problem(h, args.tol), scan_points=args.scan_points)
            ladder.append(LadderRungOut(h=h, roots=[r.T for r in coarse.roots]))
        except (NoRoot, IndeterminateT) as e:
            logger.warning("Ladder rung without a root", h=h, error=str(e))
            ladder.append(LadderRungOut(h=h, roots=[]))

    try:
        result = solve_free_T(problem, scan_points=args.scan_points)
    except NoRoot as e:
        write_json(out_dir / "report.json", SolveReport(status="no_root", exit_code=EXIT_NO_ROOT, problem=described, message=str(e)))
        logger.error("No root", error=str(e))
        return EXIT_NO_ROOT
    except IndeterminateT as e:
        write_json(
            out_dir / "report.json",
            SolveReport(status="indeterminate", exit_code=EXIT_INDETERMINATE, problem=described, message=str(e)),
        )
        logger.error("Terminal point indeterminate", error=str(e))
        return EXIT_INDETERMINATE

    roots = []
    for k, extremal in enumerate(result.roots):
        name = "trajectory.csv" if k == 0 else f"trajectory_{k}.csv"
        write_trajectory(out_dir / name, problem, extremal.candidate)
        warnings = hypothesis_checks(problem, extremal.candidate)
        roots.append(_root_out(extremal, name, warnings))

    if len(steps) > 1:
        ladder.append(LadderRungOut(h=steps[-1], roots=[r.T for r in result.roots]))
    verified = bool(result.verified)
    exit_code = EXIT_OK if verified else EXIT_NO_ROOT
    report = SolveReport(
        status="ok" if verified else "unverified",
        exit_code=exit_code,
        problem=described,
        roots=roots,
        ladder=ladder or None,
        T_extrapolated=_extrapolate_roots(ladder, pf.grid.ladder.ratio) if pf.grid.ladder and not args.h else None,
    )
    write_json(out_dir / "report.json", report)
    if not args.quiet:
        for r in roots:
            print(f"T = {r.T:.12g}  verdict={'pass' if r.verdict else 'fail'}  I = {r.functional_value.re:.12g}{r.functional_value.im:+.3g}i")
    return exit_code


def cmd_verify(args: argparse.Namespace) -> int:
    pf = load_problem_file(args.problem)
    problem = pf.to_problem(args.h, args.tol)
    y = read_trajectory(Path(args.candidate), problem)

    if isinstance(problem.regime, (FixedTAB, FixedTC)):
        T = problem.regime.T
    elif args.T is not None:
        T = args.T
    else:
        recorded = read_terminal_point(Path(args.candidate))
        T = recorded if recorded is not None else y.grid.b
    candidate = Candidate(y, T)
    candidate.check(problem)
    report = residual_report(problem, candidate)

    rng = np.random.default_rng(0)
    deltas = [0.0] + ([0.01] if problem.regime.free_T else [])
    gateaux = []
    for delta in deltas:
        eta = admissible_variation(problem, candidate, rng, delta=delta)
        estimate = gateaux_derivative(problem, candidate, eta, delta)
        gateaux.append(GateauxOut.of(estimate, delta))

    exit_code = EXIT_OK if report.verdict else EXIT_VERDICT
    write_json(
        Path(args.output_dir) / "report.json",
        VerifyReport(exit_code=exit_code, problem=problem.describe(), residuals=ResidualOut.of(T, report), gateaux=gateaux),
    )
    if not args.quiet:
        for c in report.natural_conditions:
            print(f"{c.label:>28}  {c.magnitude:.3e}")
        print(f"{'EL':>28}  {report.el_norm:.3e}")
        print(f"verdict: {'pass' if report.verdict else 'fail'} (tolerance {report.tolerance:.3g})")
    return exit_code


def cmd_identities(args: argparse.Namespace) -> int:
    for validator, value in (
        (validate_function_selector, args.function),
        (validate_interval, args.interval),
        (validate_ladder, args.ladder or DEFAULT_LADDER),
    ):
        ok, message = validator(value)
        if not ok:
            raise ValueError(message)

    a, b = (float(x) for x in args.interval.split(","))
    holder = args.function.startswith("weierstrass")
    params = parse_weierstrass_selector(args.function) if holder else None
    if args.ladder:
        h0, ratio, rungs = (float(x) for x in args.ladder.split(","))
        ladder = LadderConfig(h0=h0, ratio=ratio, rungs=int(rungs))
    elif holder:
        ladder = holder_ladder(params.freq)
    else:
        ladder = default_ladder()
    warnings: List[str] = []

    if holder:
        f = weierstrass(params)
        taylor = IdentityReport("taylor", ((0.0, 0.0),), None, True, note="skipped: function is not C2")
        warnings.append("Taylor order fit skipped: Weierstrass functions are not twice differentiable")
        logger.warning("Taylor order fit skipped", function=args.function)
    else:
        f = smooth_catalogue(args.function).f
        taylor = taylor_order_fit(f, a, default_offsets(ladder))

    reports = [
        leibniz_residual(f, f, (a, b), ladder, holder=holder),
        barrow_residual(f, (a, b), ladder, holder=holder),
        parts_residual(f, f, (a, b), ladder, holder=holder),
        taylor,
    ]
    passed = all(r.passed for r in reports)
    exit_code = EXIT_OK if passed else EXIT_VERDICT
    write_json(
        Path(args.output_dir) / "identities.json",
        IdentitiesReport(
            exit_code=exit_code,
            function=args.function,
            interval=(a, b),
            identities=[IdentityOut.of(r) for r in reports],
            warnings=warnings,
        ),
    )
    if not args.quiet:
        for r in reports:
            order = f"{r.fitted_order:.3f}" if r.fitted_order is not None else "-"
            print(f"{r.name:>8}  final={r.residuals[-1]:.3e}  order={order}  {'pass' if r.passed else 'FAIL'}")
    return exit_code


def cmd_derive(args: argparse.Namespace) -> int:
    problem = load_problem_file(args.problem).to_problem(args.h, args.tol)
    print(el_symbolic(problem).render())
    return EXIT_OK


def cmd_schema(args: argparse.Namespace) -> int:
    schema = {
        "problem": ProblemFile.model_json_schema(),
        "solve_report": SolveReport.model_json_schema(),
        "verify_report": VerifyReport.model_json_schema(),
        "identities_report": IdentitiesReport.model_json_schema(by_alias=True),
    }
    print(json.dumps(schema, indent=2, sort_keys=True))
    return EXIT_OK


# =============================================================================
# ENTRY POINT
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="Residual tolerance (before the O(h) allowance)")
    common.add_argument("--h", type=float, default=None, help="Override the grid step")
    common.add_argument("--scan-points", type=int, default=None, help=f"Free-T scan points (default {settings.scan_points})")
    common.add_argument("--output-dir", default=".", help="Directory for reports and trajectories")
    common.add_argument("--quiet", action="store_true", help="Only warnings and errors on stderr, no summary")

    parser = argparse.ArgumentParser(
        prog="scale-variations",
        description="Scale calculus at finite h and nondifferentiable variational problems",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="Solve a problem file for every free terminal point")
    p.add_argument("problem", type=Path)
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("verify", parents=[common], help="Check a trajectory CSV against a problem file")
    p.add_argument("problem", type=Path)
    p.add_argument("candidate", type=Path)
    p.add_argument("--T", type=float, default=None, help="Terminal point (default: fixed T, else the T recorded in the CSV, else the last core node)")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("identities", parents=[common], help="Leibniz, Barrow, parts and Taylor residuals")
    p.add_argument("--function", required=True, help="sin | cos | exp | poly_k | quadratic_shift(c) | weierstrass:a,b[,K]")
    p.add_argument("--interval", default="0,1", help="a,b")
    p.add_argument(
        "--ladder",
        default=None,
        help=f"h0,ratio,rungs (default {DEFAULT_LADDER}; Weierstrass selectors default to freq^-3,1/freq,5)",
    )
    p.set_defaults(handler=cmd_identities)

    p = sub.add_parser("derive", parents=[common], help="Print the Euler-Lagrange equation and natural conditions")
    p.add_argument("problem", type=Path)
    p.set_defaults(handler=cmd_derive)

    p = sub.add_parser("schema", parents=[common], help="Print the JSON schemas of problem files and reports")
    p.set_defaults(handler=cmd_schema)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging("WARNING" if args.quiet else settings.log_level, settings.log_json)
    if settings.log_level.upper() == "DEBUG":
        print_config_summary()
    set_run_context(command=args.command, problem=str(getattr(args, "problem", "") or "") or None)
    try:
        return args.handler(args)
    except ExpressionSyntaxError as e:
        logger.error("Expression syntax error", error=str(e))
        print(f"error: {e}\n{e.caret()}", file=sys.stderr)
        return EXIT_INPUT
    except ValidationError as e:
        logger.error("Problem file rejected", errors=e.error_count())
        print(f"error: invalid problem file\n{e}", file=sys.stderr)
        return EXIT_INPUT
    except (ScaleCalculusError, ValueError, OSError) as e:
        logger.error("Command failed", error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        clear_run_context()


if __name__ == "__main__":
    sys.exit(main())
