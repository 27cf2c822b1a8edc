import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.exceptions import DomainError

logger = logging.getLogger(__name__)


class Grid1D(BaseModel):
    """Uniform lattice x_j = (j-1)/(M-1) on [0, 1], j = 1..M."""
    model_config = ConfigDict(frozen=True)

    M: int = Field(..., ge=3)

    @property
    def dx(self) -> float:
        return 1.0 / (self.M - 1)

    @property
    def nodes(self) -> np.ndarray:
        # j/(M-1) puts the midpoint and the end exactly on 1/2 and 1
        nodes = np.arange(self.M, dtype=float) / (self.M - 1)
        nodes.flags.writeable = False
        return nodes


class Grid2D(BaseModel):
    """
    Uniform lattice on [0, ell] x [0, 1] with M x-nodes and N y-nodes.
    The x = 0 and x = ell columns are Dirichlet and carry no unknowns.
    """
    model_config = ConfigDict(frozen=True)

    M: int = Field(..., ge=3)
    N: int = Field(..., ge=3)
    ell: float = Field(..., gt=0, allow_inf_nan=False)

    @property
    def dx(self) -> float:
        return self.ell / (self.M - 1)

    @property
    def dy(self) -> float:
        return 1.0 / (self.N - 1)

    @property
    def block_size(self) -> int:
        return self.M - 2

    @property
    def n_unknowns(self) -> int:
        return (self.M - 2) * self.N

    @property
    def x_nodes(self) -> np.ndarray:
        nodes = np.arange(self.M, dtype=float) / (self.M - 1) * self.ell
        nodes.flags.writeable = False
        return nodes

    @property
    def y_nodes(self) -> np.ndarray:
        nodes = np.arange(self.N, dtype=float) / (self.N - 1)
        nodes.flags.writeable = False
        return nodes


def make_grid_1d(M: int) -> Grid1D:
    if isinstance(M, bool) or not isinstance(M, (int, np.integer)) or M < 3:
        raise DomainError(f"node count M must be an integer >= 3, got {M!r}")
    return Grid1D(M=int(M))


def make_grid_2d(M: int, N: int, ell: float) -> Grid2D:
    for name, value in (("M", M), ("N", N)):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 3:
            raise DomainError(f"node count {name} must be an integer >= 3, got {value!r}")
    if not math.isfinite(ell) or ell <= 0:
        raise DomainError(f"aspect ratio ell must be positive and finite, got {ell!r}")
    grid = Grid2D(M=int(M), N=int(N), ell=float(ell))
    logger.debug("Built 2D grid M=%d N=%d ell=%s (dx=%s, dy=%s)", grid.M, grid.N, grid.ell, grid.dx, grid.dy)
    return grid


def boundary_g(y: float) -> float:
    """Step data on the x = ell wall: 0 on [0, 1/2), 1 on [1/2, 1]."""
    if not 0.0 <= y <= 1.0:
        raise DomainError(f"y must lie in [0, 1], got {y!r}")
    return 0.0 if y < 0.5 else 1.0


def g_zero(y: float) -> float:
    if not 0.0 <= y <= 1.0:
        raise DomainError(f"y must lie in [0, 1], got {y!r}")
    return 0.0
