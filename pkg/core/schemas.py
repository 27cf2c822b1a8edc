from enum import StrEnum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator


class FailureKind(StrEnum):
    NONE = "none"
    MAX_ITERATIONS = "max_iterations"
    NON_FINITE = "non_finite"
    SINGULAR_LINEAR_SOLVE = "singular_linear_solve"
    RESIDUAL_GROWTH = "residual_growth"


class NewtonConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    tol: float = Field(1e-10, gt=0, allow_inf_nan=False)
    maxit: int = Field(50, ge=1)
    divergence_guard: float = Field(1e4, gt=1, allow_inf_nan=False)
    # raise tol to the attainable double-precision residual of the current iterate
    roundoff_floor: bool = True


class NewtonReport(BaseModel):
    converged: bool
    iterations: int
    residual_history: list[float]
    failure_kind: FailureKind = FailureKind.NONE
    tol_effective: float

    @computed_field
    @property
    def final_residual(self) -> float:
        return self.residual_history[-1]

    @model_validator(mode="after")
    def _check_consistency(self):
        if self.iterations != len(self.residual_history) - 1:
            raise ValueError("iterations must equal len(residual_history) - 1")
        if self.converged and not self.residual_history[-1] < self.tol_effective:
            raise ValueError("a converged report must end below tol_effective")
        if self.converged != (self.failure_kind == FailureKind.NONE):
            raise ValueError("failure_kind must be 'none' exactly when converged")
        return self


class SweepResult(BaseModel):
    q_values: list[float]
    converged: list[bool]
    iterations: list[int]
    q_star: Optional[float] = None
    first_failure: Optional[float] = None
    non_monotone: bool = False

    @model_validator(mode="after")
    def _check_consistency(self):
        if not len(self.q_values) == len(self.converged) == len(self.iterations):
            raise ValueError("q_values, converged and iterations must be parallel lists")
        if self.q_star is not None and self.first_failure is not None and not self.q_star < self.first_failure:
            raise ValueError("q_star must lie below the first failure")
        return self


class ConvergenceReport(BaseModel):
    q: float
    grid_sizes: list[int]
    spacings: list[float]
    errors: list[float]
    orders: list[float]
    iterations: list[int]
    fitted_order: float
