import pytest

from core.grids import make_grid_1d, make_grid_2d


@pytest.fixture
def grid_101():
    return make_grid_1d(101)


@pytest.fixture
def table_grid():
    """ell = 1, dx = dy = 0.1."""
    return make_grid_2d(11, 11, 1.0)


@pytest.fixture
def small_grid_2d():
    return make_grid_2d(4, 3, 1.0)
