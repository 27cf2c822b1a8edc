"""
Locating the largest q for which Newton, started from (q/2)(1 - x^2),
still converges on the 1D problem: an ascending sweep over q, and a
bisection on the same convergence predicate.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor

from core.exceptions import DomainError
from core.grids import Grid1D
from core.schemas import NewtonConfig, NewtonReport, SweepResult
from solvers.newton_solver import solve_bratu_1d

logger = logging.getLogger(__name__)


def _solve(q: float, grid: Grid1D, cfg: NewtonConfig) -> NewtonReport:
    _, report = solve_bratu_1d(q, grid, cfg)
    logger.debug("q=%.6f: converged=%s after %d iterations (%s)", q, report.converged, report.iterations, report.failure_kind)
    return report


def sweep_values(q_lo: float, q_hi: float, dq: float) -> list[float]:
    """Ascending q_lo, q_lo + dq, ... up to q_hi (inclusive up to rounding)."""
    for name, value in (("q_lo", q_lo), ("q_hi", q_hi), ("dq", dq)):
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value!r}")
    if not 0 < q_lo < q_hi:
        raise DomainError(f"need 0 < q_lo < q_hi, got q_lo={q_lo}, q_hi={q_hi}")
    if dq <= 0:
        raise DomainError(f"dq must be positive, got {dq}")

    count = int(math.floor((q_hi - q_lo) / dq + 1e-9)) + 1
    values = [round(q_lo + i * dq, 12) for i in range(count)]
    if not values:
        raise DomainError("empty q sequence")
    return values


def threshold_sweep(q_lo: float, q_hi: float, dq: float, grid: Grid1D,
                    cfg: NewtonConfig = NewtonConfig(), workers: int = 1) -> SweepResult:
    try:
        q_values = sweep_values(q_lo, q_hi, dq)
        logger.info("Sweeping %d values of q in [%s, %s] on M=%d", len(q_values), q_lo, q_hi, grid.M)

        if workers > 1:
            # map keeps ascending-q order
            with ThreadPoolExecutor(max_workers=workers) as pool:
                reports = list(pool.map(lambda q: _solve(q, grid, cfg), q_values))
        else:
            reports = [_solve(q, grid, cfg) for q in q_values]

        converged = [r.converged for r in reports]
        iterations = [r.iterations for r in reports]

        first_failure_index = next((i for i, ok in enumerate(converged) if not ok), None)
        non_monotone = False
        if first_failure_index is None:
            q_star, first_failure = q_values[-1], None
        else:
            first_failure = q_values[first_failure_index]
            q_star = q_values[first_failure_index - 1] if first_failure_index > 0 else None
            non_monotone = any(converged[first_failure_index + 1:])
            if non_monotone:
                logger.warning(
                    "Convergence is not monotone in q: converged again above the first failure at q=%s",
                    first_failure,
                )

        logger.info("Sweep result: q*=%s, first failure=%s", q_star, first_failure)
        return SweepResult(
            q_values=q_values,
            converged=converged,
            iterations=iterations,
            q_star=q_star,
            first_failure=first_failure,
            non_monotone=non_monotone,
        )
    except Exception as e:
        logger.error("Error during threshold sweep: %s", str(e), exc_info=True)
        raise


def refine_threshold(q_lo_converged: float, q_hi_failed: float, grid: Grid1D,
                     cfg: NewtonConfig = NewtonConfig(), tol_q: float = 1e-4) -> float:
    """Bisect on the convergence predicate until the bracket is narrower than tol_q."""
    if not (math.isfinite(q_lo_converged) and math.isfinite(q_hi_failed)) or not 0 < q_lo_converged < q_hi_failed:
        raise DomainError(f"need 0 < q_lo < q_hi, got ({q_lo_converged}, {q_hi_failed})")
    if not math.isfinite(tol_q) or tol_q <= 0:
        raise DomainError(f"tol_q must be positive, got {tol_q}")
    if not _solve(q_lo_converged, grid, cfg).converged:
        raise DomainError(f"Newton does not converge at the lower end q={q_lo_converged}")
    if _solve(q_hi_failed, grid, cfg).converged:
        raise DomainError(f"Newton converges at the upper end q={q_hi_failed}")

    lo, hi = q_lo_converged, q_hi_failed
    steps = 0
    while hi - lo >= tol_q:
        mid = 0.5 * (lo + hi)
        if _solve(mid, grid, cfg).converged:
            lo = mid
        else:
            hi = mid
        steps += 1

    q_star = 0.5 * (lo + hi)
    logger.info("Refined threshold to q*=%.8f in %d bisection steps (M=%d)", q_star, steps, grid.M)
    return q_star
