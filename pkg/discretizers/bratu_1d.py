"""
Central differences for u'' + q*exp(u) = 0 on [0, 1] with u'(0) = 0, u(1) = 0.

Unknowns are u_1..u_{M-1}; u_M = 0 is eliminated. The Neumann condition at
x = 0 uses the ghost identity u_0 = u_2, which doubles the first
super-diagonal entry. A Dirichlet-Dirichlet variant (u_1 = u_M = 0, unknowns
u_2..u_{M-1}) is kept for cross-checks against the 2D operator.
"""
import logging
from enum import StrEnum
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from core.arrays import FloatVector
from core.exceptions import DivergedStateError, DomainError
from core.grids import Grid1D
from solvers.linear_solvers import TriDiagSystem, solve_tridiag

logger = logging.getLogger(__name__)

# exp overflows just above 709.78
EXP_LIMIT = 700.0


class LeftBoundary(StrEnum):
    NEUMANN = "neumann"
    DIRICHLET = "dirichlet"


def n_unknowns_1d(grid: Grid1D, left: LeftBoundary = LeftBoundary.NEUMANN) -> int:
    return grid.M - 1 if left == LeftBoundary.NEUMANN else grid.M - 2


def unknown_nodes_1d(grid: Grid1D, left: LeftBoundary = LeftBoundary.NEUMANN) -> np.ndarray:
    return grid.nodes[:-1] if left == LeftBoundary.NEUMANN else grid.nodes[1:-1]


class State1D(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: Grid1D
    u: FloatVector
    left: LeftBoundary = LeftBoundary.NEUMANN

    @model_validator(mode="after")
    def _check_vector(self):
        expected = n_unknowns_1d(self.grid, self.left)
        if len(self.u) != expected:
            raise ValueError(f"state has {len(self.u)} unknowns, grid with M={self.grid.M} needs {expected}")
        if not np.all(np.isfinite(self.u)):
            raise ValueError("state contains non-finite entries")
        return self

    @property
    def nodes(self) -> np.ndarray:
        return unknown_nodes_1d(self.grid, self.left)


def reaction_term(u: np.ndarray, q: float) -> np.ndarray:
    """q*exp(u), raising DivergedStateError instead of overflowing."""
    u = np.asarray(u, dtype=float)
    if u.size and not np.all(np.isfinite(u)):
        raise DivergedStateError(f"state is non-finite at {np.count_nonzero(~np.isfinite(u))} of {u.size} nodes")
    if u.size and u.max() > EXP_LIMIT:
        raise DivergedStateError(f"state left the representable range (max u = {u.max():.4g})")
    return q * np.exp(u)


@lru_cache(maxsize=32)
def assemble_matrix_1d(grid: Grid1D, left: LeftBoundary = LeftBoundary.NEUMANN) -> TriDiagSystem:
    n = n_unknowns_1d(grid, left)
    # 1/dx^2 without the rounding of 1/(M-1)
    c = float(grid.M - 1) ** 2
    diag = np.full(n, -2.0 * c)
    sub = np.full(n - 1, c)
    sup = np.full(n - 1, c)
    if left == LeftBoundary.NEUMANN:
        sup[0] = 2.0 * c
    logger.debug("Assembled 1D operator of size %d (%s left boundary)", n, left)
    return TriDiagSystem(sub=sub, diag=diag, sup=sup)


def residual_1d(s: State1D, q: float) -> np.ndarray:
    return assemble_matrix_1d(s.grid, s.left).matvec(s.u) + reaction_term(s.u, q)


def jacobian_1d(s: State1D, q: float) -> TriDiagSystem:
    return assemble_matrix_1d(s.grid, s.left).shifted(reaction_term(s.u, q))


def initial_guess_1d(q: float, grid: Grid1D, left: LeftBoundary = LeftBoundary.NEUMANN) -> State1D:
    """Solution of u'' + q = 0 with the same boundary conditions."""
    if not np.isfinite(q) or q < 0:
        raise DomainError(f"q must be non-negative and finite, got {q!r}")
    x = unknown_nodes_1d(grid, left)
    if left == LeftBoundary.NEUMANN:
        u0 = 0.5 * q * (1.0 - x**2)
    else:
        u0 = 0.5 * q * x * (1.0 - x)
    return State1D(grid=grid, u=u0, left=left)


def full_field_1d(s: State1D) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and values on the whole grid, eliminated boundary values restored."""
    if s.left == LeftBoundary.NEUMANN:
        u = np.append(s.u, 0.0)
    else:
        u = np.concatenate(([0.0], s.u, [0.0]))
    return s.grid.nodes, u


class Bratu1DProblem:
    """Residual/Jacobian pair of the 1D system, in the shape newton_solve expects."""

    def __init__(self, grid: Grid1D, q: float, left: LeftBoundary = LeftBoundary.NEUMANN) -> None:
        self.grid = grid
        self.q = q
        self.left = left
        self.matrix = assemble_matrix_1d(grid, left)

    def residual(self, u: np.ndarray) -> np.ndarray:
        return self.matrix.matvec(u) + reaction_term(u, self.q)

    def jacobian(self, u: np.ndarray) -> TriDiagSystem:
        return self.matrix.shifted(reaction_term(u, self.q))

    def linear_solve(self, jacobian: TriDiagSystem, rhs: np.ndarray) -> np.ndarray:
        return solve_tridiag(jacobian, rhs)

    def state(self, u: np.ndarray) -> State1D:
        return State1D(grid=self.grid, u=u, left=self.left)
