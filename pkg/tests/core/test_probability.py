import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import ndtr

from conftest import make_concurrent, make_grtwind, make_two_by_two
from grtkit.core.bounds import BoundOrientation, LinearBound
from grtkit.core.distribution import PerceptualDistribution
from grtkit.core.grtwind import GrtWindModel, SubjectParams, subject_covariance
from grtkit.core.model import TwoByTwoModel
from grtkit.core.probability import (
    ResponseRegion,
    bound_coordinate_probabilities,
    bvn_cdf,
    grtwind_response_probabilities,
    rectangle_probability,
    regions,
    response_probabilities,
)
from grtkit.core.utils import EQUIVALENCE_TOL, KERNEL_TOL
from grtkit.exceptions import DomainError, InvalidModelError


def plackett_oracle(h, k, rho):
    """Phi(h) Phi(k) plus the integral of the bivariate density over the correlation."""

    def density(r):
        q = (h * h - 2.0 * r * h * k + k * k) / (2.0 * (1.0 - r * r))
        return math.exp(-q) / (2.0 * math.pi * math.sqrt(1.0 - r * r))

    value, _ = integrate.quad(density, 0.0, rho, epsabs=1e-15, epsrel=1e-14, limit=200)
    return float(ndtr(h) * ndtr(k)) + value


def test_bvn_cdf_matches_quadrature_oracle():
    grid = np.linspace(-3.0, 3.0, 9)
    rhos = np.linspace(-0.95, 0.95, 9)
    worst = 0.0
    for h in grid:
        for k in grid:
            for rho in rhos:
                worst = max(worst, abs(bvn_cdf(h, k, rho) - plackett_oracle(h, k, rho)))
    assert worst <= KERNEL_TOL


def test_bvn_cdf_known_values():
    assert bvn_cdf(0.0, 0.0, 0.0) == 0.25
    # P(X <= 0, Y <= 0) = 1/4 + arcsin(rho) / (2 pi)
    for rho in (-0.99, -0.5, 0.3, 0.93, 0.999):
        expected = 0.25 + math.asin(rho) / (2.0 * math.pi)
        assert bvn_cdf(0.0, 0.0, rho) == pytest.approx(expected, abs=1e-13)


def test_bvn_cdf_symmetry_and_broadcasting():
    h = np.array([-1.0, 0.3, 2.0])
    np.testing.assert_allclose(bvn_cdf(h, 0.7, 0.4), bvn_cdf(0.7, h, 0.4), atol=1e-15)
    assert bvn_cdf(h[:, None], h[None, :], 0.2).shape == (3, 3)
    assert isinstance(bvn_cdf(0.1, 0.2, 0.3), float)


def test_bvn_cdf_infinite_limits():
    assert bvn_cdf(math.inf, 1.0, 0.3) == float(ndtr(1.0))
    assert bvn_cdf(-0.5, math.inf, -0.3) == float(ndtr(-0.5))
    assert bvn_cdf(math.inf, math.inf, 0.9) == 1.0
    assert bvn_cdf(-math.inf, math.inf, 0.9) == 0.0
    assert bvn_cdf(1.0, -math.inf, 0.0) == 0.0


@pytest.mark.parametrize("rho", np.round(np.linspace(-0.95, 0.95, 39), 2).tolist())
def test_bvn_cdf_marginal_is_univariate_cdf(rho):
    for h in np.linspace(-4.0, 4.0, 41):
        assert abs(bvn_cdf(h, math.inf, rho) - float(ndtr(h))) <= KERNEL_TOL
        assert abs(bvn_cdf(math.inf, h, rho) - float(ndtr(h))) <= KERNEL_TOL


def test_bvn_cdf_is_monotone(rng):
    steps = np.linspace(-4.0, 4.0, 33)
    for _ in range(50):
        other = rng.uniform(-3.0, 3.0)
        rho = rng.uniform(-0.99, 0.99)
        in_h = np.array([bvn_cdf(h, other, rho) for h in steps])
        in_k = np.array([bvn_cdf(other, k, rho) for k in steps])
        assert np.all(np.diff(in_h) >= -KERNEL_TOL)
        assert np.all(np.diff(in_k) >= -KERNEL_TOL)


@pytest.mark.parametrize("rho", [1.0, -1.0, 1.5])
def test_bvn_cdf_rejects_degenerate_correlation(rho):
    with pytest.raises(DomainError, match="rho"):
        bvn_cdf(0.0, 0.0, rho)


def test_bvn_cdf_rejects_nan():
    with pytest.raises(DomainError, match="NaN"):
        bvn_cdf(math.nan, 0.0, 0.0)


def test_response_region_validation():
    with pytest.raises(InvalidModelError, match="lower < upper"):
        ResponseRegion((1.0, 0.0), (-math.inf, math.inf))
    dist = PerceptualDistribution((0.3, -0.2), (2.0, 0.4, 0.5))
    assert rectangle_probability(dist, ResponseRegion.plane()) == 1.0


def test_regions_of_symmetric_model():
    found = regions(TwoByTwoModel.symmetric())
    assert [r.x_interval for r in found] == [
        (-math.inf, 0.0),
        (-math.inf, 0.0),
        (0.0, math.inf),
        (0.0, math.inf),
    ]
    assert [r.y_interval for r in found] == [
        (-math.inf, 0.0),
        (0.0, math.inf),
        (-math.inf, 0.0),
        (0.0, math.inf),
    ]


def test_rows_sum_to_one(rng):
    for _ in range(1000):
        for model in (make_two_by_two(rng), make_concurrent(rng)):
            p = response_probabilities(model)
            assert p.shape == (model.n_stimuli, model.n_responses)
            np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=EQUIVALENCE_TOL)
            assert np.all(p >= 0.0)


def test_cells_match_rectangle_probability(rng):
    model = make_concurrent(rng)
    ds_model = model.with_parts(
        bounds_x=[LinearBound(BoundOrientation.XBound, b.intercept) for b in model.bounds_x],
        bounds_y=[LinearBound(BoundOrientation.YBound, b.intercept) for b in model.bounds_y],
    )
    p = response_probabilities(ds_model)
    for s, dist in enumerate(ds_model.flat_distributions):
        expected = [rectangle_probability(dist, region) for region in regions(ds_model)]
        np.testing.assert_allclose(p[s], expected, atol=1e-14)


def unit_subject(kappa=1.0, lam=0.5):
    return SubjectParams(
        kappa, lam, LinearBound(BoundOrientation.XBound, 0.0), LinearBound(BoundOrientation.YBound, 0.0)
    )


def test_grtwind_probabilities_of_centred_model():
    origin = PerceptualDistribution((0.0, 0.0), (1.0, 0.0, 1.0))
    model = GrtWindModel([[origin, origin], [origin, origin]], (unit_subject(),))
    np.testing.assert_allclose(grtwind_response_probabilities(model, 0), 0.25, atol=1e-15)


def test_grtwind_scaling_sharpens_discrimination():
    grid = TwoByTwoModel.symmetric(1.5).distributions
    model = GrtWindModel(grid, (unit_subject(kappa=1.0), unit_subject(kappa=2.0)))
    blunt = grtwind_response_probabilities(model, 0)
    sharp = grtwind_response_probabilities(model, 1)
    assert np.all(np.abs(sharp - blunt) > 1e-6)
    assert np.all(np.diag(sharp) > np.diag(blunt))


def test_grtwind_probabilities_match_explicit_subject_model(rng):
    model = make_grtwind(rng, 3)
    for k, params in enumerate(model.subjects):
        grid = [
            [
                PerceptualDistribution.from_matrix(
                    dist.mean_vector, subject_covariance(dist.covariance_matrix, params.kappa, params.lam)
                )
                for dist in row
            ]
            for row in model.group_distributions
        ]
        explicit = TwoByTwoModel(grid, params.bound_x, params.bound_y)
        np.testing.assert_allclose(
            grtwind_response_probabilities(model, k), response_probabilities(explicit), atol=1e-14
        )


def test_bound_coordinates_agree_with_transform_path(rng):
    for _ in range(20):
        model = make_two_by_two(rng)
        np.testing.assert_allclose(
            response_probabilities(model), bound_coordinate_probabilities(model), atol=EQUIVALENCE_TOL
        )


def classify(model, pts):
    """Response counts of sample points, read off the tilted bounds directly."""
    x_level = sum(
        (pts[:, 0] - b.slope * pts[:, 1] - b.intercept > 0).astype(int) for b in model.bounds_x
    )
    y_level = sum(
        (pts[:, 1] - b.slope * pts[:, 0] - b.intercept > 0).astype(int) for b in model.bounds_y
    )
    n, m = model.response_levels
    return np.bincount(x_level * m + y_level, minlength=n * m)


def monte_carlo(model, draws, rng, chunk=1_000_000):
    n, m = model.response_levels
    estimates = []
    for dist in model.flat_distributions:
        counts = np.zeros(n * m, dtype=np.int64)
        for size in [chunk] * (draws // chunk) + ([draws % chunk] if draws % chunk else []):
            pts = rng.multivariate_normal(dist.mean_vector, dist.covariance_matrix, size=size)
            counts += classify(model, pts)
        estimates.append(counts / draws)
    return np.array(estimates)


def test_tilted_model_matches_monte_carlo(rng):
    model = make_concurrent(rng)
    p = response_probabilities(model)
    estimate = monte_carlo(model, 200_000, rng)
    np.testing.assert_allclose(p, estimate, atol=0.006)


@pytest.mark.slow
def test_tilted_model_matches_monte_carlo_large(rng):
    draws = 10_000_000
    models = [make_two_by_two(rng) for _ in range(10)] + [make_concurrent(rng) for _ in range(10)]
    for model in models:
        p = response_probabilities(model)
        estimate = monte_carlo(model, draws, rng)
        se = np.sqrt(p * (1.0 - p) / draws)
        assert np.all(np.abs(p - estimate) <= 4.0 * se + 1e-9)
