import argparse
import logging
import sys
from enum import StrEnum
from pathlib import Path
from typing import Callable, Optional

import pandas as pd
from pydantic import BaseModel, Field, ValidationError, model_validator

from analytics.analytic_solution import MuBranch, Regime, analytic_solution, critical_q, explosion_regime
from core.exceptions import DomainError, StudyError
from core.grids import boundary_g, g_zero, make_grid_1d, make_grid_2d
from core.parameters import PhysicalParams, dimensionless_q
from core.schemas import NewtonConfig, NewtonReport
from file_generator.gnuplot_generator import GnuplotScriptGenerator
from file_generator.result_writer import (
    RunOutput,
    SolutionPayload,
    order_frame,
    solution_frame_1d,
    solution_frame_2d,
    sweep_frame,
    write_csv,
    write_json,
)
from solvers.newton_solver import solve_bratu_1d, solve_bratu_2d
from studies.convergence_study import convergence_order
from studies.threshold_study import refine_threshold, threshold_sweep

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_USAGE = 2


class Subcommand(StrEnum):
    SOLVE1D = "solve1d"
    SOLVE2D = "solve2d"
    SWEEP = "sweep"
    ORDER = "order"
    CRITICAL = "critical"
    REDUCE = "reduce"
    TABLE = "table"


class OutputFormat(StrEnum):
    CSV = "csv"
    JSON = "json"


class UsageError(Exception):
    pass


# --- Request Models ---

class Solve1DRequest(BaseModel):
    q: float = Field(..., ge=0, allow_inf_nan=False)
    nodes: int = Field(..., ge=3)
    analytic: bool = False
    out: Optional[Path] = None
    format: OutputFormat = OutputFormat.CSV
    plot: Optional[Path] = None

    @model_validator(mode="after")
    def _check_outputs(self):
        _check_plot(self.plot, self.out, self.format)
        return self


class Solve2DRequest(BaseModel):
    q: float = Field(..., ge=0, allow_inf_nan=False)
    ell: float = Field(..., gt=0, allow_inf_nan=False)
    dx: float = Field(..., gt=0, allow_inf_nan=False)
    dy: float = Field(..., gt=0, allow_inf_nan=False)
    g_zero: bool = False
    paper_literal_bb: bool = False
    out: Optional[Path] = None
    format: OutputFormat = OutputFormat.CSV
    plot: Optional[Path] = None

    @model_validator(mode="after")
    def _check_outputs(self):
        _check_plot(self.plot, self.out, self.format)
        return self


class SweepRequest(BaseModel):
    q_min: float = Field(..., gt=0, allow_inf_nan=False)
    q_max: float = Field(..., gt=0, allow_inf_nan=False)
    dq: float = Field(..., gt=0, allow_inf_nan=False)
    nodes: int = Field(101, ge=3)
    refine: Optional[float] = Field(None, gt=0, allow_inf_nan=False)
    workers: int = Field(1, ge=1)
    out: Optional[Path] = None

    @model_validator(mode="after")
    def _check_range(self):
        if self.q_max <= self.q_min:
            raise ValueError("--q-max must be greater than --q-min")
        return self


class OrderRequest(BaseModel):
    q: float = Field(..., gt=0, allow_inf_nan=False)
    base_nodes: int = Field(..., ge=5)
    levels: int = Field(..., ge=2)
    out: Optional[Path] = None


class CriticalRequest(BaseModel):
    pass


class ReduceRequest(BaseModel):
    Q: float = Field(..., gt=0, allow_inf_nan=False)
    A: float = Field(..., gt=0, allow_inf_nan=False)
    ell: float = Field(..., gt=0, allow_inf_nan=False)
    Ta: float = Field(..., gt=0, allow_inf_nan=False)
    T0: float = Field(..., gt=0, allow_inf_nan=False)
    a: float = Field(..., gt=0, allow_inf_nan=False)


class TableRequest(BaseModel):
    q: list[float] = Field(default_factory=lambda: [0.8, 0.5, 0.3], min_length=1)
    ell: float = Field(1.0, gt=0, allow_inf_nan=False)
    dx: float = Field(0.1, gt=0, allow_inf_nan=False)
    dy: float = Field(0.1, gt=0, allow_inf_nan=False)
    out: Optional[Path] = None

    @model_validator(mode="after")
    def _check_q(self):
        if any(q < 0 for q in self.q):
            raise ValueError("--q values must be non-negative")
        return self


def _check_plot(plot: Optional[Path], out: Optional[Path], fmt: OutputFormat) -> None:
    if plot is not None and (out is None or fmt != OutputFormat.CSV):
        raise ValueError("--plot needs --out with --format csv (the script reads the CSV)")


# --- Helpers ---

def _nodes_for_spacing(length: float, spacing: float, flag: str) -> int:
    intervals = round(length / spacing)
    if intervals < 2 or abs(intervals * spacing - length) > 1e-9 * length:
        raise DomainError(f"{flag} must divide the domain length {length} into at least 2 equal steps")
    return intervals + 1


def _summary(label: str, report: NewtonReport) -> str:
    return f"{label}: converged in {report.iterations} iterations, residual {report.final_residual:.3e}"


def _write_output(flag: str, path: Path, write: Callable[..., object], *args) -> None:
    try:
        write(*args)
    except OSError as e:
        raise DomainError(f"{flag}: cannot write {path}: {e.strerror or e}") from e


def _report_failure(label: str, report: NewtonReport) -> int:
    print(
        f"{label}: Newton did not converge (failure: {report.failure_kind}) after "
        f"{report.iterations} iterations, residual {report.final_residual:.3e}",
        file=sys.stderr,
    )
    return EXIT_NOT_CONVERGED


# --- Handlers ---

def handle_solve1d(request: Solve1DRequest) -> int:
    grid = make_grid_1d(request.nodes)
    if request.analytic and (request.q <= 0 or explosion_regime(request.q) != Regime.SUBCRITICAL):
        raise DomainError("--analytic needs 0 < --q < q_crit")

    state, report = solve_bratu_1d(request.q, grid)
    label = f"solve1d q={request.q} M={grid.M}"
    if not report.converged:
        return _report_failure(label, report)
    print(_summary(label, report))

    exact = analytic_solution(request.q, MuBranch.LOWER, grid.nodes) if request.analytic else None
    frame = solution_frame_1d(state, exact)
    if exact is not None:
        print(f"max error against the analytic solution: {frame['error'].abs().max():.6e}")

    if request.out is not None:
        if request.format == OutputFormat.JSON:
            payload = SolutionPayload(grid={"M": grid.M, "dx": grid.dx}, values=frame["u"].tolist())
            _write_output("--out", request.out, write_json,
                          RunOutput(config=request.model_dump(mode="json"), report=report, solution=payload), request.out)
        else:
            _write_output("--out", request.out, write_csv, frame, request.out)
    if request.plot is not None:
        generator = GnuplotScriptGenerator(request.out, request.plot, f"u''+q e^u=0, q={request.q}, M={grid.M}")
        _write_output("--plot", request.plot, generator.write,
                      generator.create_line_plot(with_exact=exact is not None))
    return EXIT_OK


def handle_solve2d(request: Solve2DRequest) -> int:
    M = _nodes_for_spacing(request.ell, request.dx, "--dx")
    N = _nodes_for_spacing(1.0, request.dy, "--dy")
    grid = make_grid_2d(M, N, request.ell)
    if request.paper_literal_bb:
        print("note: --paper-literal-bb weights g(y) by 1/dy^2; the stencil-consistent weight is 1/dx^2",
              file=sys.stderr)
    g = g_zero if request.g_zero else boundary_g

    state, report = solve_bratu_2d(request.q, grid, g=g, dy_weighted=request.paper_literal_bb)
    label = f"solve2d q={request.q} ell={request.ell} M={M} N={N}"
    if not report.converged:
        return _report_failure(label, report)
    print(_summary(label, report))

    frame = solution_frame_2d(state, g)
    if request.out is not None:
        if request.format == OutputFormat.JSON:
            payload = SolutionPayload(
                grid={"M": M, "N": N, "ell": request.ell, "dx": grid.dx, "dy": grid.dy},
                values=frame["u"].tolist(),
            )
            _write_output("--out", request.out, write_json,
                          RunOutput(config=request.model_dump(mode="json"), report=report, solution=payload), request.out)
        else:
            _write_output("--out", request.out, write_csv, frame, request.out, M)
    if request.plot is not None:
        generator = GnuplotScriptGenerator(request.out, request.plot, f"2D steady state, q={request.q}, ell={request.ell}")
        _write_output("--plot", request.plot, generator.write, generator.create_surface_plot())
    return EXIT_OK


def handle_sweep(request: SweepRequest) -> int:
    grid = make_grid_1d(request.nodes)
    cfg = NewtonConfig()
    result = threshold_sweep(request.q_min, request.q_max, request.dq, grid, cfg, workers=request.workers)
    for q, ok, iterations in zip(result.q_values, result.converged, result.iterations):
        print(f"q={q:.6g}: {'converged' if ok else 'failed'} ({iterations} iterations)")
    if request.out is not None:
        _write_output("--out", request.out, write_csv, sweep_frame(result), request.out)
    if result.non_monotone:
        print("warning: convergence is not monotone in q; q* is taken below the first failure", file=sys.stderr)
    if result.q_star is None:
        print("no q in the sweep converged", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    print(f"q* = {result.q_star:.6g}")

    if request.refine is not None:
        if result.first_failure is None:
            print("note: no failure in the sweep, nothing to refine", file=sys.stderr)
        else:
            refined = refine_threshold(result.q_star, result.first_failure, grid, cfg, request.refine)
            print(f"refined q* = {refined:.8f}")
    return EXIT_OK


def handle_order(request: OrderRequest) -> int:
    if explosion_regime(request.q) != Regime.SUBCRITICAL:
        raise DomainError(f"--q must lie below q_crit for the order study, got {request.q}")
    try:
        report = convergence_order(request.q, request.base_nodes, request.levels)
    except StudyError as e:
        print(f"order study failed: {e}", file=sys.stderr)
        return EXIT_NOT_CONVERGED

    orders = [None] + report.orders
    for M, dx, error, p in zip(report.grid_sizes, report.spacings, report.errors, orders):
        order_text = "" if p is None else f" order={p:.4f}"
        print(f"M={M} dx={dx:.6e} error={error:.6e}{order_text}")
    print(f"least-squares order = {report.fitted_order:.4f}")
    if request.out is not None:
        _write_output("--out", request.out, write_csv, order_frame(report), request.out)
    return EXIT_OK


def handle_critical(request: CriticalRequest) -> int:
    q_crit, mu_star = critical_q()
    print(f"q_crit = {q_crit:.10f}")
    print(f"mu* = {mu_star:.10f}")
    return EXIT_OK


def handle_reduce(request: ReduceRequest) -> int:
    params = PhysicalParams(Q=request.Q, A_pre=request.A, ell=request.ell, Ta=request.Ta, T0=request.T0,
                            a_diff=request.a)
    q = dimensionless_q(params).q
    q_crit, _ = critical_q()
    print(f"theta = {params.theta:.10g}")
    print(f"q = {q:.10g}")
    print(f"q_crit = {q_crit:.10f}")
    print(f"regime: {explosion_regime(q)}")
    return EXIT_OK


def handle_table(request: TableRequest) -> int:
    M = _nodes_for_spacing(request.ell, request.dx, "--dx")
    N = _nodes_for_spacing(1.0, request.dy, "--dy")
    grid = make_grid_2d(M, N, request.ell)

    rows = []
    for q in request.q:
        _, report = solve_bratu_2d(q, grid)
        rows.append({
            "q": q, "ell": request.ell, "dx": request.dx, "dy": request.dy,
            "iterations": report.iterations, "residual": report.final_residual, "converged": report.converged,
        })
        print(f"q={q:<6g} ell={request.ell:<4g} dx={request.dx:<6g} dy={request.dy:<6g} "
              f"iterations={report.iterations:<3d} residual={report.final_residual:.8e}")
    if request.out is not None:
        _write_output("--out", request.out, write_csv, pd.DataFrame(rows), request.out)
    if not all(row["converged"] for row in rows):
        print("at least one row of the table did not converge", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


ROUTES: dict[Subcommand, tuple[type[BaseModel], Callable[..., int]]] = {
    Subcommand.SOLVE1D: (Solve1DRequest, handle_solve1d),
    Subcommand.SOLVE2D: (Solve2DRequest, handle_solve2d),
    Subcommand.SWEEP: (SweepRequest, handle_sweep),
    Subcommand.ORDER: (OrderRequest, handle_order),
    Subcommand.CRITICAL: (CriticalRequest, handle_critical),
    Subcommand.REDUCE: (ReduceRequest, handle_reduce),
    Subcommand.TABLE: (TableRequest, handle_table),
}


# --- Parser ---

class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    # --verbose is accepted before or after the subcommand
    common = _ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS, help="log at DEBUG level")
    parser = _ArgumentParser(prog="main.py", description="Steady thermal explosion (Bratu) solver", allow_abbrev=False)
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser(Subcommand.SOLVE1D.value, help="1D problem u''+q e^u=0, u'(0)=0, u(1)=0", parents=[common], allow_abbrev=False)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--analytic", action="store_true", help="add the closed-form solution and the error")
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)
    p.add_argument("--plot", type=Path, help="gnuplot script path")

    p = sub.add_parser(Subcommand.SOLVE2D.value, help="2D problem on [0,ell]x[0,1]", parents=[common], allow_abbrev=False)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--ell", type=float, required=True)
    p.add_argument("--dx", type=float, required=True)
    p.add_argument("--dy", type=float, required=True)
    p.add_argument("--g-zero", action="store_true", help="homogeneous data on x=ell")
    p.add_argument("--paper-literal-bb", "--dy-weighted-bb", dest="paper_literal_bb", action="store_true",
                   help="weight g(y) by 1/dy^2 instead of 1/dx^2")
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)
    p.add_argument("--plot", type=Path, help="gnuplot script path")

    p = sub.add_parser(Subcommand.SWEEP.value, help="threshold sweep over q", parents=[common], allow_abbrev=False)
    p.add_argument("--q-min", type=float, required=True)
    p.add_argument("--q-max", type=float, required=True)
    p.add_argument("--dq", type=float, required=True)
    p.add_argument("--nodes", type=int, default=101)
    p.add_argument("--refine", type=float, help="bisect the bracket down to this width")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path)

    p = sub.add_parser(Subcommand.ORDER.value, help="observed order of convergence", parents=[common], allow_abbrev=False)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--base-nodes", type=int, required=True)
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--out", type=Path)

    sub.add_parser(Subcommand.CRITICAL.value, help="analytic fold q_crit and mu*", parents=[common], allow_abbrev=False)

    p = sub.add_parser(Subcommand.REDUCE.value, help="q from physical parameters", parents=[common], allow_abbrev=False)
    p.add_argument("--Q", type=float, required=True, help="heat release parameter [K]")
    p.add_argument("--A", type=float, required=True, help="pre-exponential factor [1/s]")
    p.add_argument("--ell", type=float, required=True, help="vessel size [m]")
    p.add_argument("--Ta", type=float, required=True, help="activation temperature [K]")
    p.add_argument("--T0", type=float, required=True, help="ambient temperature [K]")
    p.add_argument("--a", type=float, required=True, help="thermal diffusivity [m^2/s]")

    p = sub.add_parser(Subcommand.TABLE.value, help="2D iterations/residual table", parents=[common], allow_abbrev=False)
    p.add_argument("--q", type=float, nargs="+", default=[0.8, 0.5, 0.3])
    p.add_argument("--ell", type=float, default=1.0)
    p.add_argument("--dx", type=float, default=0.1)
    p.add_argument("--dy", type=float, default=0.1)
    p.add_argument("--out", type=Path)

    return parser


def _validation_message(e: ValidationError) -> str:
    error = e.errors()[0]
    message = error["msg"].removeprefix("Value error, ")
    if error["loc"]:
        return f"--{str(error['loc'][0]).replace('_', '-')}: {message}"
    return message


def run_cli(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return e.code if isinstance(e.code, int) else EXIT_OK

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    subcommand = Subcommand(args.subcommand)
    request_model, handler = ROUTES[subcommand]
    options = {k: v for k, v in vars(args).items() if k not in ("subcommand", "verbose")}
    try:
        request = request_model.model_validate(options)
        return handler(request)
    except ValidationError as e:
        print(f"error: {_validation_message(e)}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except StudyError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
