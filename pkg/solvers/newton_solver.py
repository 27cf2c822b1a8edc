import logging
import math
from typing import Any, Protocol

import numpy as np

from core.exceptions import DivergedStateError, DomainError, SingularSystemError
from core.grids import Grid1D, Grid2D, boundary_g
from core.schemas import FailureKind, NewtonConfig, NewtonReport
from discretizers.bratu_1d import Bratu1DProblem, LeftBoundary, State1D, initial_guess_1d
from discretizers.bratu_2d import BoundaryFunction, Bratu2DProblem, State2D, initial_guess_2d

logger = logging.getLogger(__name__)

EPS = float(np.finfo(float).eps)


class NonlinearProblem(Protocol):
    def residual(self, u: np.ndarray) -> np.ndarray: ...

    def jacobian(self, u: np.ndarray) -> Any: ...

    def linear_solve(self, jacobian: Any, rhs: np.ndarray) -> np.ndarray: ...


def _effective_tol(cfg: NewtonConfig, jacobian: Any, u: np.ndarray) -> float:
    if not cfg.roundoff_floor:
        return cfg.tol
    # attainable ||N(u)||_2 for a double-precision iterate
    floor = math.sqrt(u.size) * EPS * jacobian.norm_inf() * max(1.0, float(np.max(np.abs(u))))
    return max(cfg.tol, floor)


def newton_solve(problem: NonlinearProblem, u0: np.ndarray,
                 cfg: NewtonConfig = NewtonConfig()) -> tuple[np.ndarray, NewtonReport]:
    """
    Plain (undamped) Newton: solve J(u) s = -N(u), u <- u + s.

    At least one step is always taken and convergence is tested on the
    residual of the updated iterate. Numerical failures are reported through
    NewtonReport.failure_kind, never raised. The returned vector is the last
    finite iterate.
    """
    u = np.array(u0, dtype=float, copy=True)
    if not np.all(np.isfinite(u)):
        raise DomainError("initial state must be finite")

    def report(kind: FailureKind, history: list[float], tol_eff: float) -> NewtonReport:
        return NewtonReport(
            converged=kind == FailureKind.NONE,
            iterations=len(history) - 1,
            residual_history=history,
            failure_kind=kind,
            tol_effective=tol_eff,
        )

    try:
        residual = problem.residual(u)
    except DivergedStateError as e:
        logger.warning("Initial state is not evaluable: %s", e)
        return u, report(FailureKind.NON_FINITE, [math.inf], cfg.tol)

    history = [float(np.linalg.norm(residual))]
    tol_eff = cfg.tol
    logger.debug("Newton start: n=%d, ||N(u0)||=%.6e", u.size, history[0])

    for iteration in range(1, cfg.maxit + 1):
        try:
            jacobian = problem.jacobian(u)
            step = problem.linear_solve(jacobian, -residual)
        except DivergedStateError as e:
            logger.warning("Newton iteration %d: diverged state (%s)", iteration, e)
            return u, report(FailureKind.NON_FINITE, history, tol_eff)
        except SingularSystemError as e:
            logger.warning("Newton iteration %d: singular Jacobian (%s)", iteration, e)
            return u, report(FailureKind.SINGULAR_LINEAR_SOLVE, history, tol_eff)

        candidate = u + step
        if not np.all(np.isfinite(candidate)):
            logger.warning("Newton iteration %d: update is not finite", iteration)
            return u, report(FailureKind.NON_FINITE, history, tol_eff)
        u = candidate

        try:
            residual = problem.residual(u)
        except DivergedStateError as e:
            logger.warning("Newton iteration %d: residual overflow (%s)", iteration, e)
            history.append(math.inf)
            return u, report(FailureKind.NON_FINITE, history, tol_eff)

        norm = float(np.linalg.norm(residual))
        history.append(norm)
        tol_eff = _effective_tol(cfg, jacobian, u)
        logger.debug("Newton iteration %d: ||N(u)||=%.6e (tol %.2e)", iteration, norm, tol_eff)

        if not math.isfinite(norm):
            return u, report(FailureKind.NON_FINITE, history, tol_eff)
        if norm < tol_eff:
            logger.info("Newton converged in %d iterations, residual %.3e", iteration, norm)
            return u, report(FailureKind.NONE, history, tol_eff)
        if norm > cfg.divergence_guard * history[-2]:
            logger.warning("Newton iteration %d: residual grew from %.3e to %.3e", iteration, history[-2], norm)
            return u, report(FailureKind.RESIDUAL_GROWTH, history, tol_eff)

    logger.warning("Newton stopped after %d iterations, residual %.3e", cfg.maxit, history[-1])
    return u, report(FailureKind.MAX_ITERATIONS, history, tol_eff)


def solve_bratu_1d(q: float, grid: Grid1D, cfg: NewtonConfig = NewtonConfig(),
                   left: LeftBoundary = LeftBoundary.NEUMANN) -> tuple[State1D, NewtonReport]:
    problem = Bratu1DProblem(grid, q, left)
    u0 = initial_guess_1d(q, grid, left)
    u, report = newton_solve(problem, u0.u, cfg)
    return problem.state(u), report


def solve_bratu_2d(q: float, grid: Grid2D, cfg: NewtonConfig = NewtonConfig(),
                   g: BoundaryFunction = boundary_g, dy_weighted: bool = False) -> tuple[State2D, NewtonReport]:
    problem = Bratu2DProblem(grid, q, g, dy_weighted)
    u0 = initial_guess_2d(q, grid, g, dy_weighted)
    u, report = newton_solve(problem, u0.U, cfg)
    return problem.state(u), report
