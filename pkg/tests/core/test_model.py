import math

import numpy as np
import pytest

from grtkit.core.bounds import (
    BoundOrientation,
    LinearBound,
    are_parallel,
    intersection,
)
from grtkit.core.distribution import Dimension, PerceptualDistribution
from grtkit.core.model import (
    ModelClass,
    MultiBoundKind,
    MultiBoundModel,
    TwoByTwoModel,
    response_labels,
    stimulus_labels,
)
from grtkit.exceptions import (
    DegenerateBoundsError,
    InvalidCovarianceError,
    InvalidModelError,
    UnsupportedModelError,
)


def unit_grid(n=2, m=2):
    return [
        [PerceptualDistribution((float(i), float(j)), (1.0, 0.0, 1.0)) for j in range(m)]
        for i in range(n)
    ]


def x_bounds(*intercepts, slope=0.0):
    return [LinearBound(BoundOrientation.XBound, c, slope) for c in intercepts]


def y_bounds(*intercepts, slope=0.0):
    return [LinearBound(BoundOrientation.YBound, c, slope) for c in intercepts]


def test_distribution_properties():
    dist = PerceptualDistribution.from_correlation((1.0, -2.0), (2.0, 0.5), -0.4)
    assert dist.covariance == pytest.approx((4.0, -0.4, 0.25))
    assert dist.correlation == pytest.approx(-0.4)
    assert dist.marginal(Dimension.X) == (1.0, 4.0)
    assert dist.marginal(Dimension.Y) == (-2.0, 0.25)
    np.testing.assert_allclose(dist.covariance_matrix, [[4.0, -0.4], [-0.4, 0.25]])


def test_distribution_rejects_non_positive_definite():
    with pytest.raises(InvalidCovarianceError, match="not positive definite"):
        PerceptualDistribution((0.0, 0.0), (1.0, 2.0, 1.0))
    with pytest.raises(InvalidCovarianceError, match="distribution A2B1"):
        PerceptualDistribution((0.0, 0.0), (-1.0, 0.0, 1.0), label="A2B1")
    with pytest.raises(InvalidCovarianceError, match="finite"):
        PerceptualDistribution((math.nan, 0.0), (1.0, 0.0, 1.0))


def test_from_matrix_symmetrizes():
    dist = PerceptualDistribution.from_matrix(np.zeros(2), np.array([[2.0, 0.5], [0.5 + 1e-15, 1.0]]))
    assert dist.covariance[0] == 2.0
    assert dist.covariance[1] == pytest.approx(0.5)


def test_bound_geometry():
    bx = LinearBound(BoundOrientation.XBound, 1.0, 0.5)
    by = LinearBound(BoundOrientation.YBound, -1.0, 0.25)
    x, y = intersection(bx, by)
    assert bx.side((x, y)) == pytest.approx(0.0, abs=1e-15)
    assert by.side((x, y)) == pytest.approx(0.0, abs=1e-15)
    assert bx.side((10.0, 0.0)) > 0.0
    assert by.side((0.0, 10.0)) > 0.0
    assert np.dot(bx.direction(), bx.normal()) == 0.0
    assert are_parallel(bx, LinearBound(BoundOrientation.XBound, 3.0, 0.5))
    assert not are_parallel(bx, LinearBound(BoundOrientation.XBound, 3.0, 0.6))
    assert not are_parallel(bx, by)


def test_bound_orientation_from_string():
    bound = LinearBound("YBound", 0.0, 0.1)
    assert bound.orientation is BoundOrientation.YBound
    assert bound.orientation.dimension is Dimension.Y
    assert not bound.is_axis_aligned


def test_bound_rejects_infinite_slope():
    with pytest.raises(InvalidModelError, match="slope must be finite"):
        LinearBound(BoundOrientation.XBound, 0.0, math.inf)


def test_two_by_two_labels_and_levels():
    model = TwoByTwoModel.symmetric(1.0)
    assert model.stimulus_labels == ("A1B1", "A1B2", "A2B1", "A2B2")
    assert model.response_labels == ("a1b1", "a1b2", "a2b1", "a2b2")
    assert model.distributions[1][0].label == "A2B1"
    assert model.model_class is ModelClass.TwoByTwo
    assert model.n_stimuli == 4 and model.n_responses == 4
    assert model.distributions[0][0].mean == (-0.5, -0.5)


def test_two_by_two_rejects_parallel_bounds():
    # x = y and y = x are the same line
    with pytest.raises(DegenerateBoundsError, match="parallel"):
        TwoByTwoModel(unit_grid(), x_bounds(0.0, slope=1.0)[0], y_bounds(0.0, slope=1.0)[0])


def test_two_by_two_needs_four_distributions():
    with pytest.raises(InvalidModelError, match="exactly four"):
        TwoByTwoModel(unit_grid(2, 3), x_bounds(0.0)[0], y_bounds(0.0)[0])


def test_two_by_two_rejects_wrong_orientation():
    with pytest.raises(InvalidModelError, match="expected XBound"):
        TwoByTwoModel(unit_grid(), y_bounds(0.0)[0], y_bounds(0.0)[0])


def test_concurrent_ratings_model():
    model = MultiBoundModel(
        MultiBoundKind.ConcurrentRatings, unit_grid(), x_bounds(0.0, 1.0), y_bounds(-1.0, 0.0, 1.0)
    )
    assert model.response_levels == (3, 4)
    assert model.n_stimuli == 4
    assert model.n_responses == 12
    assert model.model_class is ModelClass.ConcurrentRatings
    assert model.response_labels[:5] == ("a1b1", "a1b2", "a1b3", "a1b4", "a2b1")


def test_multibound_rejects_non_parallel_family():
    bounds_x = [
        LinearBound(BoundOrientation.XBound, 0.0, 0.1),
        LinearBound(BoundOrientation.XBound, 1.0, 0.2),
    ]
    with pytest.raises(UnsupportedModelError, match="not parallel"):
        MultiBoundModel(MultiBoundKind.ConcurrentRatings, unit_grid(), bounds_x, y_bounds(0.0, 1.0))


def test_multibound_rejects_coincident_bounds():
    with pytest.raises(InvalidModelError):
        MultiBoundModel(
            MultiBoundKind.ConcurrentRatings, unit_grid(), x_bounds(0.5, 0.5), y_bounds(0.0, 1.0)
        )


def test_nxm_grid_must_match_regions():
    model = MultiBoundModel(
        MultiBoundKind.NxMIdentification, unit_grid(3, 3), x_bounds(0.5, 1.5), y_bounds(0.5, 1.5)
    )
    assert model.n_stimuli == 9 and model.n_responses == 9
    assert model.model_class is ModelClass.NxMIdentification
    with pytest.raises(InvalidModelError, match="one distribution per response"):
        MultiBoundModel(
            MultiBoundKind.NxMIdentification, unit_grid(3, 3), x_bounds(0.5), y_bounds(0.5, 1.5)
        )


def test_labels_are_row_major():
    assert stimulus_labels(3, 2) == ("A1B1", "A1B2", "A2B1", "A2B2", "A3B1", "A3B2")
    assert response_labels(2, 2) == ("a1b1", "a1b2", "a2b1", "a2b2")


def test_models_are_immutable():
    model = TwoByTwoModel.symmetric()
    with pytest.raises(AttributeError):
        model.bound_x = x_bounds(1.0)[0]
