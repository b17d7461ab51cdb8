import math

import pytest

from grtkit.core.bounds import BoundOrientation, LinearBound
from grtkit.core.distribution import Dimension, PerceptualDistribution
from grtkit.core.grtwind import GrtWindModel, SubjectParams
from grtkit.core.model import MultiBoundKind, MultiBoundModel, TwoByTwoModel
from grtkit.core.separability import check_ds, check_pi, check_ps, has_ds


@pytest.fixture
def figure_model():
    """Top row (B2) correlated, PS on y only, DS on both dimensions."""
    means = [[(0.0, 0.0), (0.5, 1.0)], [(1.0, 0.0), (1.5, 1.0)]]
    grid = [
        [
            PerceptualDistribution.from_correlation(means[i][j], (1.0, 1.0), 0.5 if j == 1 else 0.0)
            for j in range(2)
        ]
        for i in range(2)
    ]
    return TwoByTwoModel(
        grid,
        LinearBound(BoundOrientation.XBound, 0.5),
        LinearBound(BoundOrientation.YBound, 0.5),
    )


def test_pi_pattern(figure_model):
    assert check_pi(figure_model) == ((True, False), (True, False))


def test_pi_single_distributions():
    independent = TwoByTwoModel.symmetric()
    assert all(all(row) for row in check_pi(independent))
    correlated = independent.with_parts(
        distributions=[
            [PerceptualDistribution((0.0, 0.0), (1.0, 0.5, 1.0)) for _ in range(2)] for _ in range(2)
        ]
    )
    assert not any(any(row) for row in check_pi(correlated))


def test_ps_pattern(figure_model):
    assert check_ps(figure_model, Dimension.Y)
    assert not check_ps(figure_model, Dimension.X)


def test_ps_unequal_variances():
    model = TwoByTwoModel.symmetric(1.0)
    grid = [list(row) for row in model.distributions]
    grid[0][1] = PerceptualDistribution(grid[0][0].mean, (2.0, 0.0, 1.0))
    assert not check_ps(model.with_parts(distributions=grid), Dimension.X)
    assert check_ps(model, Dimension.X)


def test_predicates_tolerate_rounding():
    model = TwoByTwoModel.symmetric(1.0)
    grid = [list(row) for row in model.distributions]
    dist = grid[0][1]
    grid[0][1] = PerceptualDistribution(
        (dist.mean[0] + 1e-14, dist.mean[1]), (1.0 + 1e-14, 1e-14, 1.0)
    )
    nudged = model.with_parts(distributions=grid)
    assert check_pi(nudged)[0][1]
    assert check_ps(nudged, Dimension.X)


def test_ds_per_dimension():
    model = TwoByTwoModel.symmetric()
    assert check_ds(model) == {Dimension.X: True, Dimension.Y: True}
    tilted = model.with_parts(bounds_y=[LinearBound(BoundOrientation.YBound, 0.0, math.tan(math.radians(10)))])
    assert check_ds(tilted) == {Dimension.X: True, Dimension.Y: False}
    assert not has_ds(tilted)


def test_ds_multibound_tilted_family():
    grid = [[PerceptualDistribution((float(i), float(j)), (1.0, 0.0, 1.0)) for j in range(2)] for i in range(2)]
    model = MultiBoundModel(
        MultiBoundKind.ConcurrentRatings,
        grid,
        [LinearBound(BoundOrientation.XBound, c, 0.2) for c in (0.0, 1.0)],
        [LinearBound(BoundOrientation.YBound, c, 0.0) for c in (0.0, 1.0)],
    )
    assert check_ds(model) == {Dimension.X: False, Dimension.Y: True}


def test_grtwind_predicates(figure_model):
    subjects = (
        SubjectParams(1.0, 0.5, figure_model.bound_x, figure_model.bound_y),
        SubjectParams(2.0, 0.3, figure_model.bound_x, LinearBound(BoundOrientation.YBound, 0.5, 0.1)),
    )
    model = GrtWindModel(figure_model.distributions, subjects)
    assert check_pi(model) == check_pi(figure_model)
    assert check_ps(model, Dimension.Y)
    assert check_ds(model) == {Dimension.X: True, Dimension.Y: False}


def test_predicates_are_pure(figure_model):
    assert check_pi(figure_model) == check_pi(figure_model)
    assert check_ds(figure_model) == check_ds(figure_model)
