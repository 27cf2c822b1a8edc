"""
Five-point discretization of u_xx + u_yy + q*exp(u) = 0 on [0, ell] x [0, 1].

x = 0 and x = ell are Dirichlet (0 and g(y)) and eliminated; y = 0 and y = 1
are homogeneous Neumann, kept as unknowns and closed with ghost rows. Unknowns
are ordered y-major: U = (u_1; ...; u_N), u_k = (u_{2,k}, ..., u_{M-1,k}).
"""
import logging
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, model_validator

from core.arrays import FloatVector
from core.exceptions import DomainError
from core.grids import Grid2D, boundary_g
from discretizers.bratu_1d import reaction_term
from solvers.linear_solvers import BandedSystem, solve_banded

logger = logging.getLogger(__name__)

BoundaryFunction = Callable[[float], float]


class State2D(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: Grid2D
    U: FloatVector

    @model_validator(mode="after")
    def _check_vector(self):
        if len(self.U) != self.grid.n_unknowns:
            raise ValueError(f"state has {len(self.U)} unknowns, grid needs {self.grid.n_unknowns}")
        if not np.all(np.isfinite(self.U)):
            raise ValueError("state contains non-finite entries")
        return self

    def as_array(self) -> np.ndarray:
        """Unknowns reshaped to (N, M-2): row k is the block at y_k."""
        return self.U.reshape(self.grid.N, self.grid.block_size)


class BoundaryVector(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: Grid2D
    bb: FloatVector


@lru_cache(maxsize=32)
def assemble_matrix_2d(grid: Grid2D) -> BandedSystem:
    m, n_blocks = grid.block_size, grid.N
    cx = ((grid.M - 1) / grid.ell) ** 2
    cy = float(grid.N - 1) ** 2

    # x-direction: plain tridiagonal, Dirichlet columns eliminated
    ax = sp.diags(
        [np.full(m - 1, cx), np.full(m, -2.0 * cx), np.full(m - 1, cx)],
        [-1, 0, 1],
        shape=(m, m),
    )
    # y-direction: ghost rows double the coupling of the first and last block
    lower = np.full(n_blocks - 1, cy)
    upper = np.full(n_blocks - 1, cy)
    upper[0] = 2.0 * cy
    lower[-1] = 2.0 * cy
    ay = sp.diags([lower, np.full(n_blocks, -2.0 * cy), upper], [-1, 0, 1], shape=(n_blocks, n_blocks))

    matrix = (sp.kron(sp.identity(n_blocks), ax) + sp.kron(ay, sp.identity(m))).tocsr()
    logger.debug("Assembled 2D operator: %d blocks of %d, nnz=%d", n_blocks, m, matrix.nnz)
    return BandedSystem(matrix=matrix, block_size=m, n_blocks=n_blocks)


def assemble_rhs_2d(grid: Grid2D, g: BoundaryFunction = boundary_g, dy_weighted: bool = False) -> BoundaryVector:
    """
    g(y_k) enters through the x-stencil of the last unknown column, so its
    weight is 1/dx^2. dy_weighted=True uses 1/dy^2 instead.
    """
    m = grid.block_size
    coefficient = float(grid.N - 1) ** 2 if dy_weighted else ((grid.M - 1) / grid.ell) ** 2
    bb = np.zeros(grid.n_unknowns)
    for k, y in enumerate(grid.y_nodes):
        bb[k * m + m - 1] = g(float(y)) * coefficient
    return BoundaryVector(grid=grid, bb=bb)


def residual_2d(s: State2D, q: float, g: BoundaryFunction = boundary_g, dy_weighted: bool = False) -> np.ndarray:
    bb = assemble_rhs_2d(s.grid, g, dy_weighted).bb
    return assemble_matrix_2d(s.grid).matvec(s.U) + bb + reaction_term(s.U, q)


def jacobian_2d(s: State2D, q: float) -> BandedSystem:
    return assemble_matrix_2d(s.grid).shifted(reaction_term(s.U, q))


def initial_guess_2d(q: float, grid: Grid2D, g: BoundaryFunction = boundary_g,
                     dy_weighted: bool = False) -> State2D:
    """Solve A U0 = -(bb + q), the problem linearised at exp(U) = 1."""
    if not np.isfinite(q) or q < 0:
        raise DomainError(f"q must be non-negative and finite, got {q!r}")
    bb = assemble_rhs_2d(grid, g, dy_weighted).bb
    u0 = solve_banded(assemble_matrix_2d(grid), -(bb + q))
    return State2D(grid=grid, U=u0)


def full_field_2d(s: State2D, g: BoundaryFunction = boundary_g) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Columns x, y, u over every node, y-major, with the Dirichlet columns
    restored (0 at x = 0, g(y) at x = ell).
    """
    grid = s.grid
    field = np.zeros((grid.N, grid.M))
    field[:, 1:-1] = s.as_array()
    field[:, -1] = [g(float(y)) for y in grid.y_nodes]
    xx, yy = np.meshgrid(grid.x_nodes, grid.y_nodes)
    return xx.ravel(), yy.ravel(), field.ravel()


class Bratu2DProblem:
    def __init__(self, grid: Grid2D, q: float, g: BoundaryFunction = boundary_g, dy_weighted: bool = False) -> None:
        self.grid = grid
        self.q = q
        self.g = g
        self.matrix = assemble_matrix_2d(grid)
        self.bb = assemble_rhs_2d(grid, g, dy_weighted).bb

    def residual(self, u: np.ndarray) -> np.ndarray:
        return self.matrix.matvec(u) + self.bb + reaction_term(u, self.q)

    def jacobian(self, u: np.ndarray) -> BandedSystem:
        return self.matrix.shifted(reaction_term(u, self.q))

    def linear_solve(self, jacobian: BandedSystem, rhs: np.ndarray) -> np.ndarray:
        return solve_banded(jacobian, rhs)

    def state(self, u: np.ndarray) -> State2D:
        return State2D(grid=self.grid, U=u)
