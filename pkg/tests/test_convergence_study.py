import numpy as np
import pytest

from core.exceptions import DomainError, StudyError
from core.schemas import NewtonConfig
from studies.convergence_study import convergence_order, refinement_levels


def test_refinement_halves_the_spacing():
    assert refinement_levels(11, 4) == [11, 21, 41, 81]


@pytest.mark.parametrize("q", [0.5, 0.2])
def test_observed_order_is_two(q):
    report = convergence_order(q, base_M=11, levels=4)
    assert len(report.orders) == 3
    assert all(1.9 <= p <= 2.1 for p in report.orders)
    assert 1.9 <= report.fitted_order <= 2.1
    assert np.all(np.diff(report.errors) < 0)
    assert report.spacings == pytest.approx([0.1, 0.05, 0.025, 0.0125])


@pytest.mark.parametrize("q, base_M, levels", [(0.0, 11, 4), (0.9, 11, 4), (0.5, 4, 4), (0.5, 11, 1)])
def test_invalid_study_parameters(q, base_M, levels):
    with pytest.raises(DomainError):
        convergence_order(q, base_M, levels)


def test_failed_level_is_named():
    with pytest.raises(StudyError) as info:
        convergence_order(0.5, 11, 2, NewtonConfig(maxit=1))
    assert info.value.level == 1
    assert "M=11" in str(info.value)
