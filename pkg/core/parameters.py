import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.exceptions import DomainError

logger = logging.getLogger(__name__)


class PhysicalParams(BaseModel):
    """
    Dimensional data of the vessel problem a*lap(T) + Q*A*exp(-Ta/T) = 0, T = T0 on the wall.

    Units: Q [K], A_pre [1/s], ell [m], Ta [K], T0 [K], a_diff [m^2/s].
    """
    model_config = ConfigDict(frozen=True)

    Q: float = Field(..., gt=0, allow_inf_nan=False)
    A_pre: float = Field(..., gt=0, allow_inf_nan=False)
    ell: float = Field(..., gt=0, allow_inf_nan=False)
    Ta: float = Field(..., gt=0, allow_inf_nan=False)
    T0: float = Field(..., gt=0, allow_inf_nan=False)
    a_diff: float = Field(..., gt=0, allow_inf_nan=False)

    @property
    def theta(self) -> float:
        # derived, never stored
        return self.Ta / self.T0


class ReactionParam(BaseModel):
    model_config = ConfigDict(frozen=True)

    q: float = Field(..., ge=0, allow_inf_nan=False)


def dimensionless_q(p: PhysicalParams) -> ReactionParam:
    """
    Frank-Kamenetskii parameter q = Q*A*ell^2*Ta*exp(-Ta/T0) / (a*T0^2).
    """
    values = p.model_dump()
    for name, value in values.items():
        if not math.isfinite(value) or value <= 0:
            raise DomainError(f"{name} must be a positive finite number, got {value!r}")

    q = p.Q * p.A_pre * p.ell**2 * p.Ta * math.exp(-p.theta) / (p.a_diff * p.T0**2)
    if not math.isfinite(q):
        raise DomainError(f"dimensionless parameter overflowed for {values}")

    logger.debug("Reduced physical parameters %s to q=%s (theta=%s)", values, q, p.theta)
    return ReactionParam(q=q)


def temperature_field(u: np.ndarray, p: PhysicalParams) -> np.ndarray:
    """Map dimensionless u = (Ta/T0)(T - T0)/T0 back to temperature in K."""
    return p.T0 + np.asarray(u, dtype=float) * p.T0**2 / p.Ta
