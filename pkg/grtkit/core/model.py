"""
Gaussian GRT model classes.

This module defines the single-subject model classes of the library:

- TwoByTwoModel: four perceptual distributions (one per stimulus A_iB_j) and
  one decision bound per dimension.
- MultiBoundModel: concurrent ratings (2x2 stimuli, several response levels
  per dimension) or n x m identification (one distribution per response
  region), with a parallel family of bounds on each dimension.

The multilevel GRTwIND model lives in :mod:`grtkit.core.grtwind`.

Stimuli and responses are indexed row-major: the x level i is the outer
index and the y level j the inner one, so stimulus ``i * m + j`` is A_{i+1}B_{j+1}.

Example:
    >>> model = TwoByTwoModel.symmetric()
    >>> model.stimulus_labels
    ('A1B1', 'A1B2', 'A2B1', 'A2B2')
    >>> model.response_levels
    (2, 2)
"""

from __future__ import annotations

import dataclasses
import enum
import typing as typ

from grtkit.core.bounds import (
    BoundOrientation,
    LinearBound,
    check_bound_family,
    intersection,
)
from grtkit.core.constraints import ConstraintScheme
from grtkit.core.distribution import PerceptualDistribution
from grtkit.exceptions import InvalidModelError

DistributionGrid = tuple[tuple[PerceptualDistribution, ...], ...]


class ModelClass(enum.Enum):
    """
    The model classes understood by the fitter, the audit and the JSON format.

    Attributes:
        TwoByTwo: 2x2 identification.
        ConcurrentRatings: 2x2 stimuli with n x m rating responses.
        NxMIdentification: n x m identification.
        GrtWind: multilevel 2x2 identification with individual differences.
    """

    TwoByTwo = "2x2"
    ConcurrentRatings = "concurrent"
    NxMIdentification = "nxm"
    GrtWind = "grtwind"


class MultiBoundKind(enum.Enum):
    ConcurrentRatings = "ConcurrentRatings"
    NxMIdentification = "NxMIdentification"

    @property
    def model_class(self) -> ModelClass:
        if self is MultiBoundKind.ConcurrentRatings:
            return ModelClass.ConcurrentRatings
        return ModelClass.NxMIdentification


def stimulus_labels(n: int, m: int) -> tuple[str, ...]:
    """
    Row-major stimulus labels.

    Examples:
        >>> stimulus_labels(2, 3)
        ('A1B1', 'A1B2', 'A1B3', 'A2B1', 'A2B2', 'A2B3')
    """
    return tuple(f"A{i + 1}B{j + 1}" for i in range(n) for j in range(m))


def response_labels(n: int, m: int) -> tuple[str, ...]:
    """Row-major response labels a{i}b{j}."""
    return tuple(f"a{i + 1}b{j + 1}" for i in range(n) for j in range(m))


def as_grid(distributions: typ.Sequence[typ.Sequence[PerceptualDistribution]]) -> DistributionGrid:
    """Freeze a nested sequence of distributions into a tuple grid, labelling each cell."""
    grid = tuple(tuple(row) for row in distributions)
    if not grid or not grid[0]:
        raise InvalidModelError("a model needs at least one perceptual distribution")
    width = len(grid[0])
    if any(len(row) != width for row in grid):
        raise InvalidModelError("distribution grid rows must all have the same length")
    return tuple(
        tuple(
            dist if dist.label else dist.with_label(f"A{i + 1}B{j + 1}")
            for j, dist in enumerate(row)
        )
        for i, row in enumerate(grid)
    )


class _GridModel:
    """Accessors shared by the single-subject model classes."""

    distributions: DistributionGrid

    @property
    def stimulus_levels(self) -> tuple[int, int]:
        """tuple[int, int]: Number of stimulus levels on (x, y)."""
        return len(self.distributions), len(self.distributions[0])

    @property
    def flat_distributions(self) -> tuple[PerceptualDistribution, ...]:
        """tuple[PerceptualDistribution, ...]: Distributions in row-major stimulus order."""
        return tuple(dist for row in self.distributions for dist in row)

    @property
    def stimulus_labels(self) -> tuple[str, ...]:
        return stimulus_labels(*self.stimulus_levels)

    @property
    def response_labels(self) -> tuple[str, ...]:
        return response_labels(*self.response_levels)

    @property
    def n_stimuli(self) -> int:
        n, m = self.stimulus_levels
        return n * m

    @property
    def n_responses(self) -> int:
        n, m = self.response_levels
        return n * m

    @property
    def response_levels(self) -> tuple[int, int]:
        raise NotImplementedError()


@dataclasses.dataclass(frozen=True)
class TwoByTwoModel(_GridModel):
    """
    The 2x2 Gaussian GRT identification model.

    Attributes:
        distributions (DistributionGrid): 2x2 grid indexed by stimulus level (i, j).
        bound_x (LinearBound): The x-bound (orientation XBound).
        bound_y (LinearBound): The y-bound (orientation YBound).
        constraints (ConstraintScheme): Identification constraints used when fitting.
    """

    distributions: DistributionGrid
    bound_x: LinearBound
    bound_y: LinearBound
    constraints: ConstraintScheme = dataclasses.field(default_factory=ConstraintScheme)

    def __post_init__(self):
        grid = as_grid(self.distributions)
        if len(grid) != 2 or len(grid[0]) != 2:
            raise InvalidModelError(
                f"a 2x2 model needs exactly four distributions, got a {len(grid)}x{len(grid[0])} grid"
            )
        object.__setattr__(self, "distributions", grid)
        check_bound_family([self.bound_x], BoundOrientation.XBound)
        check_bound_family([self.bound_y], BoundOrientation.YBound)
        intersection(self.bound_x, self.bound_y)

    @property
    def response_levels(self) -> tuple[int, int]:
        return 2, 2

    @property
    def bounds_x(self) -> tuple[LinearBound, ...]:
        return (self.bound_x,)

    @property
    def bounds_y(self) -> tuple[LinearBound, ...]:
        return (self.bound_y,)

    @property
    def model_class(self) -> ModelClass:
        return ModelClass.TwoByTwo

    def with_parts(
        self,
        distributions: typ.Optional[typ.Sequence[typ.Sequence[PerceptualDistribution]]] = None,
        bounds_x: typ.Optional[typ.Sequence[LinearBound]] = None,
        bounds_y: typ.Optional[typ.Sequence[LinearBound]] = None,
    ) -> TwoByTwoModel:
        """Copy of the model with some parts replaced (bounds given as one-element sequences)."""
        return TwoByTwoModel(
            self.distributions if distributions is None else distributions,
            self.bound_x if bounds_x is None else bounds_x[0],
            self.bound_y if bounds_y is None else bounds_y[0],
            self.constraints,
        )

    @classmethod
    def symmetric(
        cls,
        separation: float = 0.0,
        constraints: typ.Optional[ConstraintScheme] = None,
    ) -> TwoByTwoModel:
        """
        A DS, PI, PS model with unit covariances and bounds through the origin.

        Args:
            separation (float): Means sit at (+-separation/2, +-separation/2).
            constraints (ConstraintScheme | None): Constraint scheme to attach.
        """
        half = separation / 2.0
        grid = [
            [
                PerceptualDistribution(
                    (half * (2 * i - 1), half * (2 * j - 1)), (1.0, 0.0, 1.0)
                )
                for j in range(2)
            ]
            for i in range(2)
        ]
        return cls(
            grid,
            LinearBound(BoundOrientation.XBound, 0.0),
            LinearBound(BoundOrientation.YBound, 0.0),
            constraints or ConstraintScheme(),
        )


@dataclasses.dataclass(frozen=True)
class MultiBoundModel(_GridModel):
    """
    A concurrent ratings or n x m identification model.

    Attributes:
        kind (MultiBoundKind): Concurrent ratings or n x m identification.
        distributions (DistributionGrid): n_s x m_s grid of perceptual distributions.
        bounds_x (tuple[LinearBound, ...]): Parallel x-bounds with increasing intercepts.
        bounds_y (tuple[LinearBound, ...]): Parallel y-bounds with increasing intercepts.
        constraints (ConstraintScheme): Identification constraints used when fitting.
    """

    kind: MultiBoundKind
    distributions: DistributionGrid
    bounds_x: tuple[LinearBound, ...]
    bounds_y: tuple[LinearBound, ...]
    constraints: ConstraintScheme = dataclasses.field(default_factory=ConstraintScheme)

    def __post_init__(self):
        if not isinstance(self.kind, MultiBoundKind):
            object.__setattr__(self, "kind", MultiBoundKind(self.kind))
        grid = as_grid(self.distributions)
        bounds_x = tuple(self.bounds_x)
        bounds_y = tuple(self.bounds_y)
        object.__setattr__(self, "distributions", grid)
        object.__setattr__(self, "bounds_x", bounds_x)
        object.__setattr__(self, "bounds_y", bounds_y)
        check_bound_family(bounds_x, BoundOrientation.XBound)
        check_bound_family(bounds_y, BoundOrientation.YBound)
        intersection(bounds_x[0], bounds_y[0])

        n_s, m_s = len(grid), len(grid[0])
        n, m = self.response_levels
        if self.kind is MultiBoundKind.ConcurrentRatings:
            if (n_s, m_s) != (2, 2):
                raise InvalidModelError(
                    f"a concurrent ratings model has a 2x2 stimulus grid, got {n_s}x{m_s}"
                )
        else:
            if (n_s, m_s) != (n, m):
                raise InvalidModelError(
                    f"an n x m identification model needs one distribution per response "
                    f"region: {n}x{m} regions but a {n_s}x{m_s} grid"
                )
            if n_s <= 2 or m_s <= 2:
                raise InvalidModelError(
                    f"an n x m identification model needs more than two levels per "
                    f"dimension, got {n_s}x{m_s}"
                )

    @property
    def response_levels(self) -> tuple[int, int]:
        return len(self.bounds_x) + 1, len(self.bounds_y) + 1

    @property
    def model_class(self) -> ModelClass:
        return self.kind.model_class

    def with_parts(
        self,
        distributions: typ.Optional[typ.Sequence[typ.Sequence[PerceptualDistribution]]] = None,
        bounds_x: typ.Optional[typ.Sequence[LinearBound]] = None,
        bounds_y: typ.Optional[typ.Sequence[LinearBound]] = None,
    ) -> MultiBoundModel:
        """Copy of the model with some parts replaced."""
        return MultiBoundModel(
            self.kind,
            self.distributions if distributions is None else distributions,
            self.bounds_x if bounds_x is None else tuple(bounds_x),
            self.bounds_y if bounds_y is None else tuple(bounds_y),
            self.constraints,
        )


SingleSubjectModel = typ.Union[TwoByTwoModel, MultiBoundModel]
