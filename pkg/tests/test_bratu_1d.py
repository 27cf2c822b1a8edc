import numpy as np
import pytest
from pydantic import ValidationError

from analytics.analytic_solution import MuBranch, analytic_solution
from core.exceptions import DivergedStateError, DomainError
from core.grids import make_grid_1d
from discretizers.bratu_1d import (
    LeftBoundary,
    State1D,
    assemble_matrix_1d,
    full_field_1d,
    initial_guess_1d,
    jacobian_1d,
    reaction_term,
    residual_1d,
)


def test_matrix_for_four_nodes():
    system = assemble_matrix_1d(make_grid_1d(4))
    assert list(system.diag) == [-18.0, -18.0, -18.0]
    assert list(system.sup) == [18.0, 9.0]
    assert list(system.sub) == [9.0, 9.0]


def test_row_sums_for_four_nodes():
    system = assemble_matrix_1d(make_grid_1d(4))
    assert list(system.matvec(np.ones(3))) == [0.0, 0.0, -9.0]


def test_operator_is_exact_on_the_initial_quadratic(grid_101):
    q = 0.6
    u0 = initial_guess_1d(q, grid_101)
    assert assemble_matrix_1d(grid_101).matvec(u0.u) == pytest.approx(np.full(100, -q), abs=1e-6)


def test_ghost_row_approximates_second_derivative_at_the_centre():
    # v = cos(pi x / 2) is even with v''(0) = -(pi/2)^2
    for M, tol in ((51, 1e-3), (101, 3e-4)):
        grid = make_grid_1d(M)
        v = np.cos(0.5 * np.pi * grid.nodes[:-1])
        assert assemble_matrix_1d(grid).matvec(v)[0] == pytest.approx(-(np.pi / 2) ** 2, abs=tol)


def test_dirichlet_variant_matrix():
    system = assemble_matrix_1d(make_grid_1d(5), LeftBoundary.DIRICHLET)
    assert system.n == 3
    assert list(system.sup) == [16.0, 16.0]


def test_residual_of_zero_state():
    grid = make_grid_1d(11)
    zero = State1D(grid=grid, u=np.zeros(10))
    assert list(residual_1d(zero, 0.0)) == [0.0] * 10
    assert residual_1d(zero, 0.5) == pytest.approx(np.full(10, 0.5))


def test_residual_of_sampled_closed_form_is_second_order():
    q = 0.5
    norms = []
    for M in (51, 101, 201):
        grid = make_grid_1d(M)
        exact = analytic_solution(q, MuBranch.LOWER, grid.nodes[:-1])
        norms.append(np.max(np.abs(residual_1d(State1D(grid=grid, u=exact), q))))
    ratios = [norms[i] / norms[i + 1] for i in range(2)]
    assert all(3.6 <= r <= 4.4 for r in ratios)


def test_jacobian_at_zero():
    grid = make_grid_1d(11)
    zero = State1D(grid=grid, u=np.zeros(10))
    A = assemble_matrix_1d(grid)
    J = jacobian_1d(zero, 0.5)
    assert J.diag == pytest.approx(A.diag + 0.5)
    assert np.array_equal(J.sub, A.sub) and np.array_equal(J.sup, A.sup)
    assert np.array_equal(jacobian_1d(zero, 0.0).diag, A.diag)


@pytest.mark.parametrize("left", list(LeftBoundary))
def test_jacobian_matches_centred_differences(left):
    grid = make_grid_1d(21)
    q, eps = 0.7, 1e-6
    n = grid.M - 1 if left == LeftBoundary.NEUMANN else grid.M - 2
    u = np.random.default_rng(5).uniform(0.0, 1.0, n)
    J = jacobian_1d(State1D(grid=grid, u=u, left=left), q).to_dense()
    for i in range(n):
        e = np.zeros(n)
        e[i] = eps
        plus = residual_1d(State1D(grid=grid, u=u + e, left=left), q)
        minus = residual_1d(State1D(grid=grid, u=u - e, left=left), q)
        assert (plus - minus) / (2 * eps) == pytest.approx(J[:, i], abs=1e-6 * max(1.0, np.abs(J[:, i]).max()))


def test_initial_guess_values():
    grid = make_grid_1d(11)
    u0 = initial_guess_1d(0.5, grid)
    assert u0.u[0] == pytest.approx(0.25)
    assert len(u0.u) == 10
    x, u = full_field_1d(u0)
    assert u[-1] == 0.0
    assert x[-1] == 1.0
    assert list(initial_guess_1d(0.0, grid).u) == [0.0] * 10


def test_initial_guess_rejects_negative_q():
    with pytest.raises(DomainError):
        initial_guess_1d(-0.1, make_grid_1d(11))


def test_initial_residual_is_bounded_by_the_reaction_excess():
    q = 0.8
    grid = make_grid_1d(101)
    u0 = initial_guess_1d(q, grid)
    r = residual_1d(u0, q)
    assert r == pytest.approx(q * (np.exp(u0.u) - 1.0), abs=1e-8)
    assert np.max(np.abs(r)) <= q * (np.exp(q / 2) - 1.0) + 1e-8


def test_overflow_is_signalled():
    with pytest.raises(DivergedStateError):
        reaction_term(np.array([0.0, 800.0]), 0.5)
    with pytest.raises(DivergedStateError):
        reaction_term(np.array([np.nan]), 0.5)


@pytest.mark.filterwarnings("error")
@pytest.mark.parametrize("u", [[np.nan, np.nan, np.nan], [np.nan, np.inf], [-np.inf, 0.0]])
def test_non_finite_state_raises_without_warnings(u):
    with pytest.raises(DivergedStateError, match="non-finite"):
        reaction_term(np.array(u), 0.5)


def test_state_length_is_validated():
    with pytest.raises(ValidationError):
        State1D(grid=make_grid_1d(11), u=np.zeros(9))


def test_dirichlet_full_field_restores_both_walls():
    grid = make_grid_1d(5)
    x, u = full_field_1d(State1D(grid=grid, u=np.ones(3), left=LeftBoundary.DIRICHLET))
    assert list(u) == [0.0, 1.0, 1.0, 1.0, 0.0]
