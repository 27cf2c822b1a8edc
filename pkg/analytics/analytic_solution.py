"""
Closed-form steady state of u'' + q*exp(u) = 0, u'(0) = 0, u(1) = 0:

    u(x) = ln(2*mu^2/q) - 2*ln(cosh(mu*x)),   cosh(mu) = sqrt(2/q)*mu.

The mu-relation has two roots for 0 < q < q_crit and none above; the two
branches merge at the tangency coth(mu*) = mu*, q_crit = 2/sinh(mu*)^2.
"""
import logging
import math
from enum import StrEnum
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.optimize as sco
from pydantic import BaseModel, ConfigDict, Field

from core.exceptions import DomainError, NoRootError

logger = logging.getLogger(__name__)

MU_MAX = 50.0
ROOT_TOL = 1e-12


class MuBranch(StrEnum):
    LOWER = "lower"
    UPPER = "upper"


class Regime(StrEnum):
    SUBCRITICAL = "subcritical"
    EXPLOSIVE = "explosive"


class AnalyticSolution(BaseModel):
    model_config = ConfigDict(frozen=True)

    q: float = Field(..., gt=0)
    mu: float = Field(..., gt=0)
    branch: MuBranch = MuBranch.LOWER

    def evaluate(self, xs, extended: bool = False) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if not extended and (np.any(xs < 0.0) or np.any(xs > 1.0)):
            raise DomainError("analytic solution is defined on [0, 1]; pass extended=True to evaluate outside")
        return math.log(2.0 * self.mu**2 / self.q) - 2.0 * np.log(np.cosh(self.mu * xs))


@lru_cache(maxsize=1)
def critical_q() -> tuple[float, float]:
    """Return (q_crit, mu_star) at the fold of the mu-relation."""
    mu_star = sco.brentq(lambda m: 1.0 / math.tanh(m) - m, 1.0, 2.0, xtol=1e-15)
    q_crit = 2.0 / math.sinh(mu_star) ** 2
    logger.debug("Fold located at mu*=%.15g, q_crit=%.15g", mu_star, q_crit)
    return q_crit, mu_star


def _mu_relation(q: float):
    c = math.sqrt(2.0 / q)

    def phi(m: float) -> float:
        return math.cosh(m) - c * m

    def dphi(m: float) -> float:
        return math.sinh(m) - c

    return phi, dphi


def solve_mu(q: float, branch: MuBranch = MuBranch.LOWER) -> float:
    """
    Root of cosh(mu) - sqrt(2/q)*mu on the requested branch.

    Bracketed Brent iteration on (0, mu*) or (mu*, MU_MAX), then a Newton
    polish that is kept only if it stays inside the bracket and does not
    increase the residual.
    """
    if not math.isfinite(q) or q <= 0:
        raise DomainError(f"q must be positive and finite, got {q!r}")
    q_crit, mu_star = critical_q()
    if q >= q_crit:
        raise NoRootError(f"no steady state for q={q} >= q_crit={q_crit:.6f} (thermal explosion)")

    phi, dphi = _mu_relation(q)
    if phi(mu_star) >= 0.0:
        # roots merged numerically just below the fold
        raise NoRootError(f"branches of the mu-relation are not separable at q={q}")

    if branch == MuBranch.LOWER:
        lo, hi = 0.0, mu_star
    else:
        lo, hi = mu_star, MU_MAX
        if phi(MU_MAX) <= 0.0:
            raise DomainError(f"upper root for q={q} lies beyond mu={MU_MAX}")

    mu = sco.brentq(phi, lo, hi, xtol=1e-15)
    polished = float(sco.newton(phi, mu, fprime=dphi, tol=1e-15, maxiter=5, disp=False))
    if lo < polished < hi and abs(phi(polished)) <= abs(phi(mu)):
        mu = polished

    residual = abs(phi(mu))
    if residual > ROOT_TOL * max(1.0, math.cosh(mu)):
        logger.warning("mu-relation residual %.3e above tolerance for q=%s (%s branch)", residual, q, branch)
    logger.debug("solve_mu q=%s branch=%s -> mu=%.15g (residual %.2e)", q, branch, mu, residual)
    return mu


def analytic_solution(q: float, branch: MuBranch = MuBranch.LOWER, xs: Sequence[float] = (),
                      extended: bool = False) -> np.ndarray:
    solution = AnalyticSolution(q=q, mu=solve_mu(q, branch), branch=branch)
    return solution.evaluate(xs, extended=extended)


def explosion_regime(q: float) -> Regime:
    if not math.isfinite(q) or q < 0:
        raise DomainError(f"q must be non-negative and finite, got {q!r}")
    q_crit, _ = critical_q()
    return Regime.SUBCRITICAL if q < q_crit else Regime.EXPLOSIVE
