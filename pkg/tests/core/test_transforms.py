import math

import numpy as np
import pytest

from conftest import make_concurrent, make_grid, make_two_by_two
from grtkit.core.bounds import BoundOrientation, LinearBound
from grtkit.core.distribution import Dimension, PerceptualDistribution
from grtkit.core.model import MultiBoundKind, MultiBoundModel, TwoByTwoModel
from grtkit.core.probability import bound_coordinate_probabilities, response_probabilities
from grtkit.core.separability import check_ds, has_ds
from grtkit.core.transforms import (
    AffineTransform,
    Composite,
    Rotation,
    bound_angles,
    compose,
    cotangent,
    ellipse_points,
    induce_ds,
    needs_reflection,
    normalize_mean_variance,
    normalize_model,
    reflection,
    rotation,
    shear,
    translation,
)
from grtkit.core.utils import EQUIVALENCE_TOL
from grtkit.exceptions import DegenerateBoundsError, DomainError, PreconditionError, SchemaError


def test_rotation_and_shear_matrices():
    np.testing.assert_allclose(rotation(math.pi / 2).linear, [[0.0, -1.0], [1.0, 0.0]], atol=1e-16)
    np.testing.assert_allclose(shear(math.pi / 3).linear, [[1.0, -1.0 / math.sqrt(3.0)], [0.0, 1.0]])
    assert cotangent(math.pi / 2) == 0.0
    assert rotation(0.2).provenance == Rotation(0.2)


def test_shear_rejects_parallel_families():
    with pytest.raises(DegenerateBoundsError, match="multiple of pi"):
        shear(0.0)
    with pytest.raises(DegenerateBoundsError):
        shear(math.pi)


def test_transform_rejects_singular_matrix():
    with pytest.raises(DomainError, match="not invertible"):
        AffineTransform(np.array([[1.0, 2.0], [2.0, 4.0]]), np.zeros(2), Composite(()))


def test_compose_applies_in_order():
    t = compose(translation((1.0, 0.0)), rotation(math.pi / 2))
    np.testing.assert_allclose(t.apply_point((0.0, 0.0)), [0.0, 1.0], atol=1e-15)
    assert len(t.provenance.parts) == 2
    nested = compose(t, reflection(Dimension.X))
    assert len(nested.provenance.parts) == 3
    np.testing.assert_allclose(nested.apply_point((0.0, 0.0)), [0.0, 1.0], atol=1e-15)


def test_inverse_round_trip(rng):
    t = compose(translation((0.4, -1.2)), rotation(0.7), shear(1.1), reflection(Dimension.X))
    dist = PerceptualDistribution((1.0, 2.0), (2.0, 0.3, 0.5))
    back = t.inverse().apply_distribution(t.apply_distribution(dist))
    np.testing.assert_allclose(back.mean, dist.mean, atol=1e-12)
    np.testing.assert_allclose(back.covariance, dist.covariance, atol=1e-12)
    points = rng.normal(size=(5, 2))
    np.testing.assert_allclose(t.inverse().apply_point(t.apply_point(points)), points, atol=1e-12)


def test_apply_covariance_ignores_the_offset():
    cov = np.array([[2.0, 0.3], [0.3, 1.0]])
    t = compose(translation((3.0, -2.0)), shear(1.1))
    np.testing.assert_allclose(t.apply_covariance(cov), t.linear @ cov @ t.linear.T, atol=1e-15)
    np.testing.assert_allclose(translation((5.0, 1.0)).apply_covariance(cov), cov, atol=0.0)
    dist = PerceptualDistribution.from_matrix(np.zeros(2), cov)
    np.testing.assert_allclose(t.apply_distribution(dist).covariance_matrix, t.apply_covariance(cov))


def test_transform_dict_round_trip():
    t = compose(translation((0.5, 0.25)), rotation(-0.3), shear(1.2), reflection(Dimension.X))
    assert AffineTransform.from_dict(t.to_dict()) == t
    assert AffineTransform.from_dict(t.inverse().to_dict()) == t.inverse()
    with pytest.raises(SchemaError):
        AffineTransform.from_dict({"linear": [[1.0, 0.0], [0.0, 1.0]]})


def test_bound_angles():
    phi, omega = bound_angles(
        LinearBound(BoundOrientation.XBound, 0.0, 0.0),
        LinearBound(BoundOrientation.YBound, 0.0, math.tan(0.4)),
    )
    assert phi == pytest.approx(0.4)
    assert omega == pytest.approx(math.pi / 2 - 0.4)
    with pytest.raises(DegenerateBoundsError):
        bound_angles(
            LinearBound(BoundOrientation.XBound, 0.0, 2.0),
            LinearBound(BoundOrientation.YBound, 1.0, 0.5),
        )


def test_induce_ds_fixed_point(ds_model):
    image, t = induce_ds(ds_model)
    assert image is ds_model
    assert t.is_identity


def test_induce_ds_two_by_two(rng):
    for _ in range(200):
        model = make_two_by_two(rng)
        reference = bound_coordinate_probabilities(model)
        image, t = induce_ds(model)
        assert check_ds(image) == {Dimension.X: True, Dimension.Y: True}
        assert image.bound_x.slope == 0.0 and image.bound_y.slope == 0.0
        assert np.max(np.abs(reference - response_probabilities(image))) < EQUIVALENCE_TOL
        assert abs(t.determinant) == pytest.approx(1.0)


def test_induce_ds_maps_distributions_and_bounds(tilted_model):
    image, t = induce_ds(tilted_model)
    for original, mapped in zip(tilted_model.flat_distributions, image.flat_distributions):
        expected = t.apply_distribution(original)
        np.testing.assert_allclose(mapped.mean, expected.mean, atol=1e-14)
        np.testing.assert_allclose(mapped.covariance, expected.covariance, atol=1e-14)
        assert mapped.label == original.label
    recovered = t.inverse().apply_distribution(image.distributions[1][1])
    np.testing.assert_allclose(recovered.mean, tilted_model.distributions[1][1].mean, atol=1e-12)
    # the bound intersection is the anchor of the transform
    anchor = np.array([tilted_model.bound_x.intercept, 0.0])
    np.testing.assert_allclose(
        t.apply_point(anchor)[0], image.bound_x.intercept, atol=1e-12
    )


def test_induce_ds_reflects_when_x_family_is_tilted_past():
    grid = [
        [PerceptualDistribution((float(i), float(j)), (1.0, 0.2, 1.5)) for j in range(2)]
        for i in range(2)
    ]
    # y family at 0.5 rad, x family at 0.3 rad from the x axis
    slope_x = math.cos(0.3) / math.sin(0.3)
    model = MultiBoundModel(
        MultiBoundKind.ConcurrentRatings,
        grid,
        [LinearBound(BoundOrientation.XBound, c, slope_x) for c in (-1.0, 0.5)],
        [LinearBound(BoundOrientation.YBound, c, math.tan(0.5)) for c in (0.0, 1.0)],
    )
    image, t = induce_ds(model)
    assert needs_reflection(t)
    assert t.determinant < 0.0
    assert image.bounds_x[0].intercept < image.bounds_x[1].intercept
    np.testing.assert_allclose(
        response_probabilities(image), bound_coordinate_probabilities(model), atol=EQUIVALENCE_TOL
    )


def test_induce_ds_concurrent_ratings(rng):
    for _ in range(50):
        model = make_concurrent(rng)
        reference = bound_coordinate_probabilities(model)
        image, _ = induce_ds(model)
        assert has_ds(image)
        assert image.response_levels == (3, 3)
        assert np.max(np.abs(reference - response_probabilities(image))) < EQUIVALENCE_TOL


def test_induce_ds_nxm(rng):
    model = MultiBoundModel(
        MultiBoundKind.NxMIdentification,
        make_grid(rng, 3, 3),
        [LinearBound(BoundOrientation.XBound, c, 0.3) for c in (-0.5, 0.5)],
        [LinearBound(BoundOrientation.YBound, c, -0.2) for c in (-0.5, 0.5)],
    )
    image, _ = induce_ds(model)
    np.testing.assert_allclose(
        response_probabilities(image), bound_coordinate_probabilities(model), atol=EQUIVALENCE_TOL
    )


def test_normalize_mean_variance_identities(rng):
    for _ in range(200):
        model = make_two_by_two(rng, ds=True)
        reference = response_probabilities(model)
        normalized, transforms = normalize_model(model)
        criteria = (model.bound_x.intercept, model.bound_y.intercept)
        assert len(transforms) == 4
        for original, image in zip(model.flat_distributions, normalized.flat_distributions):
            assert image.covariance[0] == 1.0 and image.covariance[2] == 1.0
            assert image.correlation == original.correlation
            sx, sy = original.sds
            # signed distances to the criteria in standard-deviation units
            assert abs((original.mean[0] - criteria[0]) / sx - (image.mean[0] - criteria[0])) < 1e-12
            assert abs((original.mean[1] - criteria[1]) / sy - (image.mean[1] - criteria[1])) < 1e-12
        assert normalized.bound_x == model.bound_x
        assert np.max(np.abs(reference - response_probabilities(normalized))) < EQUIVALENCE_TOL


def test_normalize_fixes_unit_variance_distribution():
    dist = PerceptualDistribution((0.3, -0.2), (1.0, 0.25, 1.0))
    image, t = normalize_mean_variance(dist, (0.5, 0.5))
    assert image == dist
    assert t.is_identity


def test_normalize_transform_matches_image():
    dist = PerceptualDistribution((1.0, 2.0), (4.0, 0.6, 0.25))
    image, t = normalize_mean_variance(dist, (0.5, -1.0))
    mapped = t.apply_distribution(dist)
    np.testing.assert_allclose(mapped.mean, image.mean, atol=1e-14)
    np.testing.assert_allclose(mapped.covariance, image.covariance, atol=1e-14)
    np.testing.assert_allclose(t.apply_point((0.5, -1.0)), (0.5, -1.0), atol=1e-15)


def test_normalize_preconditions(tilted_model, rng):
    with pytest.raises(PreconditionError, match="induce_ds first"):
        normalize_model(tilted_model)
    with pytest.raises(PreconditionError, match="2x2"):
        normalize_model(make_concurrent(rng))


def test_normalize_after_induce_ds(tilted_model):
    image, _ = induce_ds(tilted_model)
    normalized, _ = normalize_model(image)
    np.testing.assert_allclose(
        response_probabilities(normalized),
        bound_coordinate_probabilities(tilted_model),
        atol=EQUIVALENCE_TOL,
    )


def test_apply_bound_keeps_orientation():
    bound = LinearBound(BoundOrientation.YBound, 1.0, 0.5)
    image = rotation(-math.atan(0.5)).apply_bound(bound)
    assert image.orientation is BoundOrientation.YBound
    assert image.slope == pytest.approx(0.0, abs=1e-15)
    quarter_turn = AffineTransform(np.array([[0.0, -1.0], [1.0, 0.0]]), np.zeros(2), Composite(()))
    with pytest.raises(PreconditionError, match="vertical"):
        quarter_turn.apply_bound(LinearBound(BoundOrientation.YBound, 0.0, 0.0))


def test_ellipse_points_lie_on_contour():
    dist = PerceptualDistribution((1.0, -1.0), (2.0, 0.7, 1.0))
    points = ellipse_points(dist, level=2.0, n_points=16)
    assert points.shape == (16, 2)
    centered = points - dist.mean_vector
    mahalanobis = np.einsum("ij,jk,ik->i", centered, np.linalg.inv(dist.covariance_matrix), centered)
    np.testing.assert_allclose(mahalanobis, 4.0)
    with pytest.raises(DomainError):
        ellipse_points(dist, level=0.0)


def test_symmetric_model_is_its_own_twin():
    model = TwoByTwoModel.symmetric(2.0)
    image, t = induce_ds(model)
    normalized, transforms = normalize_model(image)
    assert normalized == model
    assert t.is_identity and all(tr.is_identity for tr in transforms)
