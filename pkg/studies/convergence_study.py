import logging
import math

import numpy as np

from analytics.analytic_solution import MuBranch, Regime, analytic_solution, explosion_regime
from core.exceptions import DomainError, StudyError
from core.grids import make_grid_1d
from core.schemas import ConvergenceReport, NewtonConfig
from solvers.newton_solver import solve_bratu_1d

logger = logging.getLogger(__name__)


def refinement_levels(base_M: int, levels: int) -> list[int]:
    """Node counts with the spacing halved at each level: M_{i+1} = 2*M_i - 1."""
    sizes = [base_M]
    for _ in range(levels - 1):
        sizes.append(2 * sizes[-1] - 1)
    return sizes


def convergence_order(q: float, base_M: int = 11, levels: int = 4,
                      cfg: NewtonConfig = NewtonConfig()) -> ConvergenceReport:
    """
    Observed order p_i = ln(E_i / E_{i+1}) / ln 2, where E_i is the max-norm
    error against the lower-branch closed form on grid i's own nodes.
    """
    if not math.isfinite(q) or q <= 0 or explosion_regime(q) != Regime.SUBCRITICAL:
        raise DomainError(f"q must lie in (0, q_crit), got {q!r}")
    if base_M < 5:
        raise DomainError(f"base_M must be >= 5, got {base_M}")
    if levels < 2:
        raise DomainError(f"levels must be >= 2, got {levels}")

    try:
        grid_sizes = refinement_levels(base_M, levels)
        spacings, errors, iterations = [], [], []
        for level, M in enumerate(grid_sizes, start=1):
            grid = make_grid_1d(M)
            state, report = solve_bratu_1d(q, grid, cfg)
            if not report.converged:
                raise StudyError(
                    f"Newton failed on level {level} (M={M}): {report.failure_kind}",
                    level=level,
                    report=report,
                )
            exact = analytic_solution(q, MuBranch.LOWER, state.nodes)
            error = float(np.max(np.abs(state.u - exact)))
            logger.debug("Level %d (M=%d, dx=%.3e): error %.6e", level, M, grid.dx, error)
            spacings.append(grid.dx)
            errors.append(error)
            iterations.append(report.iterations)

        orders = [math.log(errors[i] / errors[i + 1]) / math.log(2.0) for i in range(len(errors) - 1)]
        fitted_order = float(np.polyfit(np.log(spacings), np.log(errors), 1)[0])
        logger.info("Observed orders %s (least-squares %.4f)", orders, fitted_order)

        return ConvergenceReport(
            q=q,
            grid_sizes=grid_sizes,
            spacings=spacings,
            errors=errors,
            orders=orders,
            iterations=iterations,
            fitted_order=fitted_order,
        )
    except Exception as e:
        logger.error("Error during convergence study: %s", str(e), exc_info=True)
        raise
