"""
Operators of the discretized problems and the direct solvers the Newton
driver needs: Thomas elimination for the 1D tridiagonal operator and a
sparse LU factorisation for the 2D block operator.
"""
import logging

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.arrays import FloatVector
from core.exceptions import DomainError, SingularSystemError

logger = logging.getLogger(__name__)

PIVOT_MIN = 1e-300


class TriDiagSystem(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sub: FloatVector
    diag: FloatVector
    sup: FloatVector

    @model_validator(mode="after")
    def _check_lengths(self):
        n = len(self.diag)
        if n < 1 or len(self.sub) != n - 1 or len(self.sup) != n - 1:
            raise ValueError(f"off-diagonals must have length {n - 1} for a system of size {n}")
        return self

    @property
    def n(self) -> int:
        return len(self.diag)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = self.diag * x
        y[:-1] += self.sup * x[1:]
        y[1:] += self.sub * x[:-1]
        return y

    def shifted(self, delta: np.ndarray) -> "TriDiagSystem":
        """Same off-diagonals, diagonal incremented by delta."""
        return TriDiagSystem(sub=self.sub, diag=self.diag + delta, sup=self.sup)

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sup, 1) + np.diag(self.sub, -1)

    def norm_inf(self) -> float:
        row = np.abs(self.diag).copy()
        row[:-1] += np.abs(self.sup)
        row[1:] += np.abs(self.sub)
        return float(row.max())


class BandedSystem(BaseModel):
    """
    Block operator with n_blocks block-rows of size block_size, stored as a
    scipy CSR matrix.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: sp.csr_matrix
    block_size: int = Field(..., ge=1)
    n_blocks: int = Field(..., ge=1)

    @model_validator(mode="after")
    def _check_shape(self):
        n = self.block_size * self.n_blocks
        if self.matrix.shape != (n, n):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match {self.n_blocks} blocks of {self.block_size}")
        return self

    @property
    def n(self) -> int:
        return self.block_size * self.n_blocks

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float)

    def shifted(self, delta: np.ndarray) -> "BandedSystem":
        matrix = (self.matrix + sp.diags(np.asarray(delta, dtype=float), format="csr")).tocsr()
        return BandedSystem(matrix=matrix, block_size=self.block_size, n_blocks=self.n_blocks)

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def norm_inf(self) -> float:
        return float(abs(self.matrix).sum(axis=1).max())


def _check_rhs(n: int, rhs) -> np.ndarray:
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (n,):
        raise DomainError(f"right-hand side has shape {rhs.shape}, expected ({n},)")
    return rhs


def solve_tridiag(system: TriDiagSystem, rhs) -> np.ndarray:
    """Thomas elimination without pivoting; a pivot below PIVOT_MIN is reported as singular."""
    n = system.n
    d = _check_rhs(n, rhs).tolist()
    a = system.sub.tolist()
    b = system.diag.tolist()
    c = system.sup.tolist()

    cp = [0.0] * n
    dp = [0.0] * n
    if abs(b[0]) < PIVOT_MIN:
        raise SingularSystemError("zero pivot in row 0")
    cp[0] = c[0] / b[0] if n > 1 else 0.0
    dp[0] = d[0] / b[0]
    for i in range(1, n):
        denom = b[i] - a[i - 1] * cp[i - 1]
        if abs(denom) < PIVOT_MIN or denom != denom:
            raise SingularSystemError(f"zero pivot in row {i}")
        if i < n - 1:
            cp[i] = c[i] / denom
        dp[i] = (d[i] - a[i - 1] * dp[i - 1]) / denom

    x = np.empty(n)
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]

    if not np.all(np.isfinite(x)):
        raise SingularSystemError("tridiagonal solve produced non-finite values")
    return x


def solve_banded(system: BandedSystem, rhs) -> np.ndarray:
    """Sparse LU with partial pivoting (SuperLU)."""
    rhs = _check_rhs(system.n, rhs)
    try:
        lu = spla.splu(system.matrix.tocsc())
    except RuntimeError as e:
        logger.debug("Sparse factorisation failed: %s", e)
        raise SingularSystemError(str(e)) from e

    x = lu.solve(rhs)
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("banded solve produced non-finite values")
    return x
