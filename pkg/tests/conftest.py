import math

import numpy as np
import pytest

from grtkit.core.bounds import BoundOrientation, LinearBound
from grtkit.core.constraints import (
    ConstraintScheme,
    LocationFix,
    OrthogonalityFix,
    ScaleFix,
)
from grtkit.core.distribution import PerceptualDistribution
from grtkit.core.grtwind import GrtWindModel, SubjectParams
from grtkit.core.model import MultiBoundKind, MultiBoundModel, TwoByTwoModel


def make_distribution(rng: np.random.Generator) -> PerceptualDistribution:
    mean = rng.uniform(-3.0, 3.0, size=2)
    sx, sy = np.sqrt(rng.uniform(0.25, 4.0, size=2))
    rho = rng.uniform(-0.9, 0.9)
    return PerceptualDistribution.from_correlation(tuple(mean), (sx, sy), rho)


def make_grid(rng: np.random.Generator, n: int = 2, m: int = 2):
    return [[make_distribution(rng) for _ in range(m)] for _ in range(n)]


def make_intercepts(rng: np.random.Generator, count: int) -> list[float]:
    start = rng.uniform(-1.0, 0.0)
    gaps = rng.uniform(0.3, 1.0, size=count - 1)
    return list(np.concatenate([[start], start + np.cumsum(gaps)]))


def make_slopes(rng: np.random.Generator) -> tuple[float, float]:
    """(x-bound slope, y-bound slope) for a y family at phi and an x family omega past it."""
    while True:
        phi = rng.uniform(-math.pi / 3, math.pi / 3)
        omega = rng.uniform(math.pi / 6, 5 * math.pi / 6)
        theta_x = phi + omega
        if abs(math.sin(theta_x)) > 0.2:
            return math.cos(theta_x) / math.sin(theta_x), math.tan(phi)


def make_bounds(rng, n_x: int = 1, n_y: int = 1, slopes=None):
    b, s = slopes if slopes is not None else make_slopes(rng)
    bounds_x = [LinearBound(BoundOrientation.XBound, c, b) for c in make_intercepts(rng, n_x)]
    bounds_y = [LinearBound(BoundOrientation.YBound, c, s) for c in make_intercepts(rng, n_y)]
    return bounds_x, bounds_y


def make_two_by_two(rng: np.random.Generator, ds: bool = False) -> TwoByTwoModel:
    bounds_x, bounds_y = make_bounds(rng, slopes=(0.0, 0.0) if ds else None)
    return TwoByTwoModel(make_grid(rng), bounds_x[0], bounds_y[0])


def make_concurrent(rng: np.random.Generator, n: int = 3, m: int = 3) -> MultiBoundModel:
    bounds_x, bounds_y = make_bounds(rng, n - 1, m - 1)
    return MultiBoundModel(MultiBoundKind.ConcurrentRatings, make_grid(rng), bounds_x, bounds_y)


def make_grtwind(rng: np.random.Generator, n_subjects: int, ds: bool = False) -> GrtWindModel:
    subjects = []
    for _ in range(n_subjects):
        bounds_x, bounds_y = make_bounds(rng, slopes=(0.0, 0.0) if ds else None)
        subjects.append(
            SubjectParams(
                rng.uniform(0.5, 2.0), rng.uniform(0.2, 0.8), bounds_x[0], bounds_y[0]
            )
        )
    return GrtWindModel(make_grid(rng), tuple(subjects))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def two_by_two_scheme():
    return ConstraintScheme(
        LocationFix.mean_at_origin(0), ScaleFix.unit_variances_all(), OrthogonalityFix.AssumeDS
    )


@pytest.fixture
def ds_model(two_by_two_scheme):
    """A DS 2x2 model satisfying the default 2x2 constraint scheme."""
    means = [[(0.0, 0.0), (0.2, 1.5)], [(1.4, 0.1), (1.6, 1.7)]]
    rhos = [[0.3, -0.2], [0.0, 0.4]]
    grid = [
        [PerceptualDistribution.from_correlation(means[i][j], (1.0, 1.0), rhos[i][j]) for j in range(2)]
        for i in range(2)
    ]
    return TwoByTwoModel(
        grid,
        LinearBound(BoundOrientation.XBound, 0.7, 0.0),
        LinearBound(BoundOrientation.YBound, 0.8, 0.0),
        two_by_two_scheme,
    )


@pytest.fixture
def tilted_model(ds_model):
    """The DS model with both bounds tilted."""
    return ds_model.with_parts(
        bounds_x=[LinearBound(BoundOrientation.XBound, 0.7, 0.25)],
        bounds_y=[LinearBound(BoundOrientation.YBound, 0.8, math.tan(0.3))],
    )
