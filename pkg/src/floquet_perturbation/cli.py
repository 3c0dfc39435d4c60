# SPDX-FileCopyrightText: 2026 floquet-perturbation contributors
#
# SPDX-License-Identifier: MIT

"""Command-line front end.

Every subcommand reads a problem file (``--spec``), lets flags override its
settings, and writes CSV or JSON to ``--out`` (standard output by default).

Exponents use the ``exp(-mu t)`` convention throughout: a solution grows when
``Re(mu) < 0``. The stability chart reports ``re_mu_min``, the smallest real
part, and ``unstable`` when it is negative.

Exit status is 0 on success, 2 for invalid input and 3 for a numerical
failure; whatever was computed before a failure is still written.
"""

import argparse
import contextlib
import csv
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import (
    Any,
    Dict,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    TextIO,
    Tuple,
    Union,
)

import numpy as np

from . import __version__
from .base import (
    BasisIndex,
    biorthogonality_error,
    build_floquet_basis,
    canonical_exponent,
    mode_residual,
    monodromy_decompose,
)
from .errors import (
    AmbiguousMatch,
    FloquetError,
    InputError,
    NumericalError,
    UsageError,
    ValidationError,
)
from .fundamental import (
    FundamentalMatrix,
    assemble_fundamental,
    evaluate_fundamental,
    floquet_property_check,
    modes_from_solutions,
    solve_inhomogeneous,
    time_grid,
)
from .perturb import (
    DRIFT_FACTOR,
    Method,
    PerturbationProblem,
    PerturbationSolution,
    direct_eigensolve,
    direct_exponents,
    rs_solve,
    scan_small_denominators,
    wb_solve,
)
from .problem import (
    ProblemSpec,
    forcing_series,
    full_system,
    load_problem,
    perturbation,
    sequence_to_pairs,
    sweep_points,
    unperturbed_system,
    with_parameters,
)
from .types import (
    ChartPoint,
    CompareRow,
    InvariantResult,
    MethodResult,
    RunReport,
    TargetReport,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

#: Growth rates smaller than this count as marginal on a stability chart.
STABILITY_FLOOR = 1e-8

EXPONENT_FIELDS = [
    "j",
    "re_aleph",
    "im_aleph",
    "method",
    "order",
    "re_mu",
    "im_mu",
    "converged",
    "iterations",
    "residual",
    "cutoff_drift",
    "error",
]
CHART_FIELDS = [
    "row",
    "col",
    "x",
    "y",
    "re_mu_min",
    "unstable",
    "method",
    "converged",
    "cutoff_drift",
    "error",
]
COMPARE_FIELDS = [
    "scale",
    "j",
    "method",
    "order",
    "error",
    "converged",
    "decay_exponent",
    "failure",
]
CHECK_FIELDS = ["name", "value", "limit", "passed"]


def _pair(z: complex) -> List[float]:
    return [float(z.real), float(z.imag)]


def _describe(exc: BaseException) -> str:
    return f"{type(exc).__name__}: {exc}"


# Pipeline


def build_problem(spec: ProblemSpec) -> PerturbationProblem:
    """The unperturbed basis of ``a0`` and the perturbation ``V`` of a problem."""
    basis = build_floquet_basis(
        unperturbed_system(spec),
        spec.cutoff,
        harmonics=spec.harmonics,
        aliasing_tolerance=spec.tolerances.aliasing,
    )
    return PerturbationProblem.create(
        basis,
        perturbation(spec),
        degeneracy_threshold=spec.tolerances.degeneracy * spec.omega,
    )


def requested_methods(spec: ProblemSpec) -> Tuple[Method, ...]:
    if spec.method == "all":
        return (Method.RS, Method.WB, Method.DIRECT)
    return (Method(spec.method),)


def solve(
    problem: PerturbationProblem,
    spec: ProblemSpec,
    method: Method,
    target: BasisIndex,
    order: Optional[int] = None,
) -> PerturbationSolution:
    """Run one solver with the problem's tolerances."""
    tol = spec.tolerances
    order = spec.order if order is None else order
    if method is Method.RS:
        return rs_solve(problem, target, order, tol=tol.tol)
    if method is Method.WB:
        return wb_solve(
            problem,
            target,
            order,
            tol=tol.wb_tol,
            max_iter=tol.max_iter,
            damping=tol.damping,
        )
    return direct_eigensolve(problem, target, tol=tol.tol)


def method_result(solution: PerturbationSolution) -> MethodResult:
    return {
        "method": solution.method.value,
        "order": solution.order,
        "mu": _pair(solution.mu),
        "converged": solution.converged,
        "iterations": solution.iterations,
        "residual": solution.residual,
        "cutoff_drift": solution.cutoff_drift,
        "order_contributions": sequence_to_pairs(solution.order_contributions),
        "notes": list(solution.notes),
    }


def failed_result(method: Method, order: Optional[int], exc: FloquetError) -> MethodResult:
    return {
        "method": method.value,
        "order": order,
        "converged": False,
        "error": type(exc).__name__,
        "message": str(exc),
    }


def cmd_exponents(spec: ProblemSpec) -> RunReport:
    """The physical exponents ``mu_j`` at ``k = 0`` by each requested method."""
    started = time.perf_counter()
    problem = build_problem(spec)
    targets: List[TargetReport] = []
    failures: List[str] = []
    for j in spec.target_modes:
        target = BasisIndex(j, 0)
        results: List[MethodResult] = []
        for method in requested_methods(spec):
            order = None if method is Method.DIRECT else spec.order
            try:
                results.append(method_result(solve(problem, spec, method, target)))
            except NumericalError as exc:
                logger.warning("mode %d, %s: %s", j, method.value, exc)
                failures.append(f"mode {j} {method.value}: {_describe(exc)}")
                results.append(failed_result(method, order, exc))
        targets.append(
            {
                "j": j,
                "aleph": _pair(problem.eigenvalue(target)),
                "gaps": [
                    {"j": idx.j, "k": idx.k, "gap": _pair(gap)}
                    for idx, gap in scan_small_denominators(problem, target)
                ],
                "results": results,
            }
        )
    return {
        "command": "exponents",
        "version": __version__,
        "n": spec.n,
        "omega": spec.omega,
        "cutoff": spec.cutoff,
        "targets": targets,
        "failures": failures,
        "elapsed": time.perf_counter() - started,
    }


def exponent_rows(report: RunReport) -> List[Dict[str, Any]]:
    rows = []
    for target in report.get("targets", []):
        for result in target["results"]:
            mu = result.get("mu")
            rows.append(
                {
                    "j": target["j"],
                    "re_aleph": target["aleph"][0],
                    "im_aleph": target["aleph"][1],
                    "method": result["method"],
                    "order": result.get("order"),
                    "re_mu": None if mu is None else mu[0],
                    "im_mu": None if mu is None else mu[1],
                    "converged": result.get("converged"),
                    "iterations": result.get("iterations"),
                    "residual": result.get("residual"),
                    "cutoff_drift": result.get("cutoff_drift"),
                    "error": result.get("error"),
                }
            )
    return rows


def fundamental_from(
    spec: ProblemSpec, problem: PerturbationProblem
) -> Tuple[FundamentalMatrix, Method]:
    """Fundamental matrix from the perturbed modes of the selected method."""
    method = Method.DIRECT if spec.method == "all" else Method(spec.method)
    solutions = [
        solve(problem, spec, method, BasisIndex(j, 0)) for j in range(1, spec.n + 1)
    ]
    return assemble_fundamental(modes_from_solutions(problem.basis, solutions)), method


def cmd_solve(spec: ProblemSpec) -> Tuple[RunReport, List[Dict[str, Any]]]:
    """Driven trajectory ``y(t)`` over ``periods`` periods, and its residual."""
    if spec.forcing is None and spec.y0 is None:
        raise UsageError("solve needs a forcing or an initial condition y0")
    started = time.perf_counter()
    problem = build_problem(spec)
    fm, method = fundamental_from(spec, problem)
    t = time_grid(spec.omega, spec.grid, spec.periods)
    system = full_system(spec)
    solution = solve_inhomogeneous(fm, forcing_series(spec), spec.y0, t, system=system)
    rows = []
    for time_value, y in zip(solution.t_grid, solution.y_values):
        row: Dict[str, Any] = {"t": float(time_value)}
        for i, value in enumerate(y):
            row[f"re_y{i + 1}"] = float(value.real)
            row[f"im_y{i + 1}"] = float(value.imag)
        rows.append(row)
    report: RunReport = {
        "command": "solve",
        "version": __version__,
        "n": spec.n,
        "omega": spec.omega,
        "cutoff": spec.cutoff,
        "checks": floquet_property_check(fm, spec.grid, system),
        "trajectory": {
            "points": len(solution.t_grid),
            "periods": spec.periods,
            "residual_max": solution.residual_max,
            "method": method.value,
        },
        "failures": [],
        "elapsed": time.perf_counter() - started,
    }
    return report, rows


def chart_point(spec: ProblemSpec, point: Tuple[int, int, float, float]) -> ChartPoint:
    """Smallest real exponent at one sweep point; failures are recorded, not raised."""
    row, col, x, y = point
    first, second = spec.sweep
    result: ChartPoint = {"row": row, "col": col, "x": x, "y": y}
    method = Method.DIRECT if spec.method == "all" else Method(spec.method)
    result["method"] = method.value
    try:
        local = with_parameters(spec, {first.path: x, second.path: y})
        problem = build_problem(local)
        if method is Method.DIRECT:
            exponents = list(direct_exponents(problem))
            wider = direct_exponents(problem.with_cutoff(problem.cutoff + 2))
            drift = abs(min(z.real for z in wider) - min(z.real for z in exponents))
            converged = bool(drift <= DRIFT_FACTOR * local.tolerances.tol)
        else:
            solutions = [
                solve(problem, local, method, BasisIndex(j, 0))
                for j in range(1, local.n + 1)
            ]
            exponents = [s.mu for s in solutions]
            drift = max(s.cutoff_drift for s in solutions)
            converged = all(s.converged for s in solutions)
    except FloquetError as exc:
        result["converged"] = False
        result["error"] = _describe(exc)
        return result
    re_mu_min = float(min(z.real for z in exponents))
    floor = max(spec.tolerances.tol, STABILITY_FLOOR)
    result["re_mu_min"] = re_mu_min
    result["unstable"] = re_mu_min < -floor
    result["converged"] = converged
    result["cutoff_drift"] = float(drift)
    return result


def _chart_task(args: Tuple[ProblemSpec, Tuple[int, int, float, float]]) -> ChartPoint:
    return chart_point(*args)


def cmd_stability_chart(spec: ProblemSpec, jobs: Optional[int] = None) -> List[ChartPoint]:
    """Evaluate a two-parameter sweep, row-major, ``jobs`` points at a time."""
    if len(spec.sweep) != 2:
        raise UsageError(
            f"stability-chart needs exactly 2 swept parameters, got {len(spec.sweep)}"
        )
    points = sweep_points(spec)
    tasks = [(spec, point) for point in points]
    workers = jobs or os.cpu_count() or 1
    logger.info("charting %d points with %d workers", len(points), workers)
    if workers == 1:
        return [_chart_task(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(tasks) // (4 * workers))
        return list(pool.map(_chart_task, tasks, chunksize=chunk))


def compare_series(spec: ProblemSpec) -> Tuple[Tuple[Method, int], ...]:
    if spec.method == "direct":
        raise UsageError("compare needs a series method: rs, wb or all")
    if spec.method == "all":
        return ((Method.RS, 1), (Method.RS, 2), (Method.WB, 2))
    return ((Method(spec.method), spec.order),)


def decay_exponent(scales: Sequence[float], errors: Sequence[float]) -> Optional[float]:
    """Slope of ``log(error)`` against ``log(scale)``, if enough errors are nonzero."""
    pairs = [(s, e) for s, e in zip(scales, errors) if e > 0.0 and math.isfinite(e)]
    if len(pairs) < 2:
        return None
    x = np.log([s for s, _ in pairs])
    y = np.log([e for _, e in pairs])
    return float(np.polyfit(x, y, 1)[0])


Outcome = Union[PerturbationSolution, NumericalError]


def compare_reference(
    problem: PerturbationProblem,
    spec: ProblemSpec,
    target: BasisIndex,
    anchor: complex,
) -> complex:
    """Dense exponent of ``target``; inside a tongue, the one nearest ``anchor``."""
    try:
        return solve(problem, spec, Method.DIRECT, target).mu
    except AmbiguousMatch as exc:
        logger.info("%s; taking the dense exponent nearest %s", exc, anchor)
        candidates = direct_exponents(problem)
        return complex(
            min(candidates, key=lambda z: _branch_distance(z, anchor, spec.omega))
        )


def cmd_compare(spec: ProblemSpec) -> List[CompareRow]:
    """Errors of the series against the dense solve as ``V`` is scaled."""
    series = compare_series(spec)
    base = build_problem(spec)
    rows: List[CompareRow] = []
    for scale in spec.scales:
        problem = base.scaled(scale)
        for j in spec.target_modes:
            target = BasisIndex(j, 0)
            outcomes: Dict[Tuple[Method, int], Outcome] = {}
            for method, order in series:
                try:
                    outcomes[method, order] = solve(problem, spec, method, target, order)
                except NumericalError as exc:
                    outcomes[method, order] = exc
            anchor = complex(problem.basis.exponents[j - 1])
            wb = outcomes.get((Method.WB, 2), outcomes.get((Method.WB, 1)))
            if isinstance(wb, PerturbationSolution):
                anchor = wb.mu
            reference: Optional[complex] = None
            reference_failure = ""
            try:
                reference = compare_reference(problem, spec, target, anchor)
            except NumericalError as exc:
                reference_failure = "reference " + _describe(exc)
            for (method, order), outcome in outcomes.items():
                row: CompareRow = {
                    "scale": scale,
                    "j": j,
                    "method": method.value,
                    "order": order,
                }
                failures: List[str] = []
                if isinstance(outcome, NumericalError):
                    row["converged"] = False
                    failures.append(_describe(outcome))
                else:
                    row["converged"] = outcome.converged
                    if reference is not None:
                        row["error"] = _branch_distance(
                            outcome.mu, reference, spec.omega
                        )
                if reference is None:
                    failures.append(reference_failure)
                if failures:
                    row["failure"] = "; ".join(failures)
                rows.append(row)
    return rows


def compare_rows(spec: ProblemSpec, rows: Sequence[CompareRow]) -> List[Dict[str, Any]]:
    """Rows with the fitted decay exponent of their series attached."""
    groups: Dict[Tuple[int, str, int], List[CompareRow]] = {}
    for row in rows:
        groups.setdefault((row["j"], row["method"], row["order"]), []).append(row)
    slopes = {
        key: decay_exponent(
            [r["scale"] for r in group if "error" in r],
            [r["error"] for r in group if "error" in r],
        )
        for key, group in groups.items()
    }
    out = []
    for row in rows:
        out.append(
            {
                "scale": row["scale"],
                "j": row["j"],
                "method": row["method"],
                "order": row["order"],
                "error": row.get("error"),
                "converged": row.get("converged"),
                "decay_exponent": slopes[(row["j"], row["method"], row["order"])],
                "failure": row.get("failure"),
            }
        )
    return out


def _branch_distance(a: complex, b: complex, omega: float) -> float:
    d = a - b
    return abs(complex(d.real, d.imag - round(d.imag / omega) * omega))


def _invariant(name: str, value: float, limit: float) -> InvariantResult:
    return {
        "name": name,
        "value": float(value),
        "limit": limit,
        "passed": bool(value <= limit),
    }


def cmd_check(spec: ProblemSpec) -> List[InvariantResult]:
    """Run the invariant suite on a problem."""
    problem = build_problem(spec)
    basis = problem.basis
    a0 = unperturbed_system(spec)
    tol = spec.tolerances.tol
    results = [
        _invariant("biorthogonality", biorthogonality_error(basis, min(3, spec.cutoff)), 1e-9),
        _invariant(
            "mode_residual",
            max(mode_residual(a0, m.shape, m.exponent) for m in basis.modes),
            1e-7,
        ),
    ]
    try:
        solutions = [
            direct_eigensolve(problem, BasisIndex(j, 0), tol=tol)
            for j in range(1, spec.n + 1)
        ]
    except NumericalError as exc:
        logger.error("dense solve failed: %s", exc)
        return results + [_invariant("direct_solve", math.inf, 0.0)]
    results.append(_invariant("eigen_residual", max(s.residual for s in solutions), 1e-10))
    results.append(
        _invariant(
            "cutoff_drift", max(s.cutoff_drift for s in solutions), DRIFT_FACTOR * tol
        )
    )
    fm = assemble_fundamental(modes_from_solutions(basis, solutions))
    checks = floquet_property_check(fm, spec.grid, full_system(spec))
    results.append(_invariant("identity", checks["identity"], 1e-9))
    results.append(_invariant("floquet", checks["floquet"], 1e-6))
    results.append(_invariant("coefficient", checks["coefficient"], 1e-7))
    try:
        oracle = monodromy_decompose(full_system(spec)).exponents
    except NumericalError as exc:
        logger.error("monodromy oracle failed: %s", exc)
        results.append(_invariant("monodromy", math.inf, 1e-6))
    else:
        UT = evaluate_fundamental(fm, fm.period)
        ours = [
            canonical_exponent(complex(-np.log(rho) / fm.period), spec.omega)
            for rho in np.linalg.eigvals(UT)
        ]
        worst = max(
            min(_branch_distance(z, w, spec.omega) for w in oracle) for z in ours
        )
        results.append(_invariant("monodromy", worst, 1e-6))
    if spec.cutoff >= 1:
        try:
            shifted = direct_eigensolve(problem, BasisIndex(1, 1), tol=tol).mu
            value = abs(shifted - solutions[0].mu - 1j * spec.omega)
        except NumericalError as exc:
            logger.error("shifted solve failed: %s", exc)
            value = math.inf
        results.append(_invariant("k_shift", value, 1e-8))
    return results


# Output


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def write_csv(
    stream: TextIO, fieldnames: Sequence[str], rows: Iterable[Dict[str, Any]]
) -> None:
    writer = csv.DictWriter(stream, fieldnames=list(fieldnames), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _cell(row.get(key)) for key in fieldnames})


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return _pair(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def write_json(stream: TextIO, document: Any) -> None:
    json.dump(document, stream, indent=2, default=_json_default, allow_nan=True)
    stream.write("\n")


@contextlib.contextmanager
def _output(path: Optional[str]) -> Iterator[TextIO]:
    """The ``--out`` file, or standard output for ``None`` and ``-``."""
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as f:
            yield f


# Command line


def apply_overrides(spec: ProblemSpec, args: argparse.Namespace) -> ProblemSpec:
    """Flags take precedence over the problem file."""
    changes: Dict[str, Any] = {}
    if args.method is not None:
        changes["method"] = args.method
    if args.order is not None:
        changes["order"] = args.order
    if args.grid is not None:
        if args.grid < 8:
            raise UsageError("--grid needs at least 8 points per period")
        changes["grid"] = args.grid
    if args.cutoff is not None:
        highest = max((abs(m) for m, _ in spec.V + spec.a0), default=0)
        if args.cutoff < highest:
            raise ValidationError(
                f"harmonic {highest} exceeds cutoff {args.cutoff}", "cutoff"
            )
        changes["cutoff"] = args.cutoff
    if args.tol is not None:
        if args.tol <= 0.0:
            raise UsageError("--tol must be positive")
        changes["tolerances"] = replace(spec.tolerances, tol=args.tol)
    return replace(spec, **changes)


def run_exponents(spec: ProblemSpec, args: argparse.Namespace) -> int:
    report = cmd_exponents(spec)
    with _output(args.out) as stream:
        if args.format == "json":
            write_json(stream, report)
        else:
            write_csv(stream, EXPONENT_FIELDS, exponent_rows(report))
    return EXIT_NUMERICAL if report["failures"] else EXIT_OK


def run_solve(spec: ProblemSpec, args: argparse.Namespace) -> int:
    report, rows = cmd_solve(spec)
    logger.info("trajectory residual %.3g", report["trajectory"]["residual_max"])
    with _output(args.out) as stream:
        if args.format == "json":
            write_json(stream, report)
        else:
            fieldnames = ["t"] + [
                f"{part}_y{i}" for i in range(1, spec.n + 1) for part in ("re", "im")
            ]
            write_csv(stream, fieldnames, rows)
    return EXIT_OK


def run_stability_chart(spec: ProblemSpec, args: argparse.Namespace) -> int:
    points = cmd_stability_chart(spec, args.jobs)
    failed = sum(1 for p in points if "error" in p)
    if failed:
        logger.warning("%d of %d chart points failed", failed, len(points))
    with _output(args.out) as stream:
        if args.format == "json":
            write_json(
                stream,
                {
                    "command": "stability-chart",
                    "version": __version__,
                    "axes": [
                        {"path": axis.path, "values": list(axis.values)}
                        for axis in spec.sweep
                    ],
                    "points": points,
                },
            )
        else:
            write_csv(stream, CHART_FIELDS, [dict(p) for p in points])
    return EXIT_NUMERICAL if points and failed == len(points) else EXIT_OK


def run_compare(spec: ProblemSpec, args: argparse.Namespace) -> int:
    rows = compare_rows(spec, cmd_compare(spec))
    with _output(args.out) as stream:
        if args.format == "json":
            write_json(
                stream, {"command": "compare", "version": __version__, "rows": rows}
            )
        else:
            write_csv(stream, COMPARE_FIELDS, rows)
    references_failed = any(
        part.startswith("reference ")
        for row in rows
        for part in (row["failure"] or "").split("; ")
    )
    return EXIT_NUMERICAL if references_failed else EXIT_OK


def run_check(spec: ProblemSpec, args: argparse.Namespace) -> int:
    results = cmd_check(spec)
    for result in results:
        if not result["passed"]:
            logger.warning(
                "%s = %.3g exceeds %.3g", result["name"], result["value"], result["limit"]
            )
    with _output(args.out) as stream:
        if args.format == "json":
            write_json(
                stream, {"command": "check", "version": __version__, "results": results}
            )
        else:
            write_csv(stream, CHECK_FIELDS, [dict(r) for r in results])
    return EXIT_OK if all(r["passed"] for r in results) else EXIT_NUMERICAL


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", required=True, help="Problem file (JSON).")
    common.add_argument(
        "--method",
        choices=["rs", "wb", "direct", "all"],
        help="Solver to use; 'all' runs every solver with the dense one as reference.",
    )
    common.add_argument("--order", type=int, choices=[1, 2], help="Series order.")
    common.add_argument("--cutoff", type=int, help="Harmonic cutoff K of the basis.")
    common.add_argument("--tol", type=float, help="Solver and cutoff-drift tolerance.")
    common.add_argument("--grid", type=int, help="Time grid points per period.")
    common.add_argument(
        "--jobs",
        type=_positive_int,
        help="Parallel workers for sweeps (default: available CPUs).",
    )
    common.add_argument("--out", help="Output file (default: standard output).")
    common.add_argument("--format", choices=["csv", "json"], default="csv")

    parser = argparse.ArgumentParser(
        prog="floquet-perturbation",
        description=(
            "Floquet exponents and modes of periodic linear ODEs by perturbation"
            " series. Growth corresponds to Re(mu) < 0."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="More logging (repeatable)."
    )
    parser.add_argument("-q", "--quiet", action="count", default=0, help="Less logging.")
    commands = parser.add_subparsers(dest="command", required=True)
    for name, handler, text in [
        ("exponents", run_exponents, "Floquet exponents of each mode by each method."),
        ("solve", run_solve, "Trajectory of the driven system."),
        ("stability-chart", run_stability_chart, "Two-parameter stability sweep."),
        ("compare", run_compare, "Series errors against the dense solve as V is scaled."),
        ("check", run_check, "Run the invariant suite."),
    ]:
        sub = commands.add_parser(name, parents=[common], help=text, description=text)
        sub.set_defaults(handler=handler)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=max(logging.DEBUG, logging.WARNING - 10 * args.verbose + 10 * args.quiet),
        format="%(levelname)s %(name)s: %(message)s",
    )
    logging.captureWarnings(True)
    try:
        spec = apply_overrides(load_problem(args.spec), args)
        return int(args.handler(spec, args))
    except OSError as exc:
        logger.error("cannot use %s: %s", exc.filename, exc.strerror)
        return EXIT_INPUT
    except InputError as exc:
        logger.error("%s", exc)
        return EXIT_INPUT
    except NumericalError as exc:
        logger.error("%s", _describe(exc))
        return EXIT_NUMERICAL
