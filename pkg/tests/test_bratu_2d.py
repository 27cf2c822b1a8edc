import numpy as np
import pytest
from pydantic import ValidationError

from core.exceptions import DivergedStateError
from core.grids import boundary_g, g_zero, make_grid_2d
from discretizers.bratu_2d import (
    State2D,
    assemble_matrix_2d,
    assemble_rhs_2d,
    full_field_2d,
    initial_guess_2d,
    jacobian_2d,
    residual_2d,
)


def test_operator_entries_on_the_small_grid(small_grid_2d):
    A = assemble_matrix_2d(small_grid_2d).to_dense()
    assert A.shape == (6, 6)
    assert np.all(np.diag(A) == -26.0)
    # within-block x coupling
    for k in range(3):
        assert A[2 * k, 2 * k + 1] == 9.0
        assert A[2 * k + 1, 2 * k] == 9.0
    # block couplings: ghost-doubled on the first and last block-row
    assert A[0, 2] == 8.0 and A[1, 3] == 8.0
    assert A[2, 0] == 4.0 and A[2, 4] == 4.0
    assert A[4, 2] == 8.0 and A[5, 3] == 8.0
    assert A[0, 4] == 0.0


def test_row_sums_next_to_the_dirichlet_columns():
    grid = make_grid_2d(5, 5, 1.0)
    A = assemble_matrix_2d(grid).to_dense()
    row_sums = A.sum(axis=1).reshape(grid.N, grid.block_size)
    inverse_dx2 = (grid.M - 1) ** 2
    assert row_sums[:, 1] == pytest.approx(0.0, abs=1e-12)
    assert row_sums[:, 0] == pytest.approx(-inverse_dx2)
    assert row_sums[:, -1] == pytest.approx(-inverse_dx2)


def test_operator_is_symmetric_up_to_ghost_columns(small_grid_2d):
    A = assemble_matrix_2d(small_grid_2d).to_dense()
    asymmetric = np.argwhere(~np.isclose(A, A.T))
    assert (A != 0).tolist() == (A.T != 0).tolist()
    assert {tuple(ij) for ij in asymmetric} == {(0, 2), (2, 0), (1, 3), (3, 1), (4, 2), (2, 4), (5, 3), (3, 5)}


def test_boundary_vector_on_the_table_grid(table_grid):
    bb = assemble_rhs_2d(table_grid).bb.reshape(11, 9)
    assert np.all(bb[:, :-1] == 0.0)
    assert np.all(bb[:5, -1] == 0.0)
    assert bb[5:, -1] == pytest.approx(100.0)


def test_boundary_vector_literal_weight():
    grid = make_grid_2d(11, 21, 1.0)
    bb = assemble_rhs_2d(grid, dy_weighted=True).bb.reshape(21, 9)
    assert bb[-1, -1] == pytest.approx(400.0)
    assert assemble_rhs_2d(grid).bb.reshape(21, 9)[-1, -1] == pytest.approx(100.0)


@pytest.mark.parametrize("N", [5, 11, 99, 197, 207, 215, 323])
def test_step_switches_on_at_the_midpoint_row(N):
    grid = make_grid_2d(5, N, 1.0)
    bb = assemble_rhs_2d(grid).bb.reshape(N, 3)
    middle = (N - 1) // 2
    assert bb[middle, -1] == 16.0
    assert bb[middle - 1, -1] == 0.0
    assert np.count_nonzero(bb[:, -1]) == N - middle


def test_zero_boundary_vector(table_grid):
    assert not assemble_rhs_2d(table_grid, g_zero).bb.any()


def test_residual_of_zero_state(table_grid):
    zero = State2D(grid=table_grid, U=np.zeros(99))
    assert not residual_2d(zero, 0.0, g_zero).any()
    bb = assemble_rhs_2d(table_grid).bb
    assert residual_2d(zero, 0.3) == pytest.approx(bb + 0.3)


def test_jacobian_at_zero(table_grid):
    zero = State2D(grid=table_grid, U=np.zeros(99))
    A = assemble_matrix_2d(table_grid).to_dense()
    assert jacobian_2d(zero, 0.5).to_dense() == pytest.approx(A + 0.5 * np.eye(99))
    assert np.array_equal(jacobian_2d(zero, 0.0).to_dense(), A)


def test_jacobian_matches_centred_differences(small_grid_2d):
    q, eps = 0.8, 1e-6
    U = np.random.default_rng(2).uniform(0.0, 1.0, 6)
    J = jacobian_2d(State2D(grid=small_grid_2d, U=U), q).to_dense()
    for i in range(6):
        e = np.zeros(6)
        e[i] = eps
        plus = residual_2d(State2D(grid=small_grid_2d, U=U + e), q)
        minus = residual_2d(State2D(grid=small_grid_2d, U=U - e), q)
        assert (plus - minus) / (2 * eps) == pytest.approx(J[:, i], abs=1e-5)


def test_initial_guess_cancels_the_linear_part(table_grid):
    q = 0.5
    u0 = initial_guess_2d(q, table_grid)
    assert residual_2d(u0, q) == pytest.approx(q * (np.exp(u0.U) - 1.0), abs=1e-10)


def test_initial_guess_is_zero_without_sources(table_grid):
    assert initial_guess_2d(0.0, table_grid, g_zero).U == pytest.approx(0.0, abs=1e-14)


def test_harmonic_extension_obeys_the_maximum_principle(table_grid):
    U = initial_guess_2d(0.0, table_grid).U
    assert U.min() >= -1e-12
    assert U.max() <= 1.0 + 1e-12


def test_full_field_restores_the_walls(table_grid):
    state = initial_guess_2d(0.0, table_grid)
    x, y, u = full_field_2d(state, boundary_g)
    field = u.reshape(11, 11)
    assert len(x) == 121
    assert np.all(field[:, 0] == 0.0)
    assert list(field[:, -1]) == [boundary_g(float(v)) for v in table_grid.y_nodes]
    assert x.reshape(11, 11)[0] == pytest.approx(table_grid.x_nodes)
    assert np.all(y.reshape(11, 11)[:, 0] == table_grid.y_nodes)


def test_state_length_is_validated(table_grid):
    with pytest.raises(ValidationError):
        State2D(grid=table_grid, U=np.zeros(98))


def test_overflow_is_signalled(table_grid):
    U = np.zeros(99)
    U[3] = 1e3
    with pytest.raises(DivergedStateError):
        residual_2d(State2D(grid=table_grid, U=U), 0.5)
