"""
Linear decision bounds.

Bounds are parameterized relative to the axis they nominally partition:

- an XBound is the line ``x = intercept + slope * y``;
- a YBound is the line ``y = intercept + slope * x``.

A slope of exactly 0.0 is the axis-aligned (decisionally separable) case, so
vertical XBounds never need an infinite slope.

Example:
    >>> bx = LinearBound(BoundOrientation.XBound, 0.0, 0.0)
    >>> by = LinearBound(BoundOrientation.YBound, 1.0, 0.5)
    >>> intersection(bx, by)
    (0.0, 1.0)
    >>> by.is_axis_aligned
    False
"""

from __future__ import annotations

import dataclasses
import enum
import math
from typing import Sequence

import numpy as np

from grtkit.core.distribution import Dimension
from grtkit.exceptions import (
    DegenerateBoundsError,
    InvalidModelError,
    UnsupportedModelError,
)


class BoundOrientation(enum.Enum):
    """
    Which axis a bound nominally partitions.

    Attributes:
        XBound (str): Partitions the x axis (separates response levels a_i).
        YBound (str): Partitions the y axis (separates response levels b_j).
    """

    XBound = "XBound"
    YBound = "YBound"

    @property
    def dimension(self) -> Dimension:
        """Dimension: The dimension this orientation partitions."""
        return Dimension.X if self is BoundOrientation.XBound else Dimension.Y


@dataclasses.dataclass(frozen=True)
class LinearBound:
    """
    An oriented line partitioning the perceptual plane.

    Attributes:
        orientation (BoundOrientation): Which axis the bound partitions.
        intercept (float): Intercept on the partitioned axis.
        slope (float): Deviation from axis alignment; 0.0 means axis-aligned.
    """

    orientation: BoundOrientation
    intercept: float
    slope: float = 0.0

    def __post_init__(self):
        if not isinstance(self.orientation, BoundOrientation):
            object.__setattr__(self, "orientation", BoundOrientation(self.orientation))
        intercept = float(self.intercept)
        slope = float(self.slope)
        if not math.isfinite(intercept):
            raise InvalidModelError(f"{self.orientation.value}: intercept must be finite")
        if not math.isfinite(slope):
            raise InvalidModelError(f"{self.orientation.value}: slope must be finite")
        object.__setattr__(self, "intercept", intercept)
        object.__setattr__(self, "slope", slope)

    @property
    def is_axis_aligned(self) -> bool:
        """bool: True iff the slope is exactly zero."""
        return self.slope == 0.0

    def direction(self) -> np.ndarray:
        """
        Direction vector of the line.

        Returns:
            np.ndarray: (slope, 1) for an XBound, (1, slope) for a YBound.
        """
        if self.orientation is BoundOrientation.XBound:
            return np.array([self.slope, 1.0])
        return np.array([1.0, self.slope])

    def normal(self) -> np.ndarray:
        """
        Normal vector pointing toward the higher response level.

        Returns:
            np.ndarray: (1, -slope) for an XBound, (-slope, 1) for a YBound.
        """
        if self.orientation is BoundOrientation.XBound:
            return np.array([1.0, -self.slope])
        return np.array([-self.slope, 1.0])

    def point(self) -> np.ndarray:
        """np.ndarray: A point on the line (where the free coordinate is zero)."""
        if self.orientation is BoundOrientation.XBound:
            return np.array([self.intercept, 0.0])
        return np.array([0.0, self.intercept])

    def side(self, point: Sequence[float]) -> float:
        """
        Signed offset of a point from the bound along the partitioned axis.

        Positive values lie on the high-response side.

        Examples:
            >>> LinearBound(BoundOrientation.XBound, 1.0, 0.0).side((3.0, 7.0))
            2.0
        """
        x, y = float(point[0]), float(point[1])
        if self.orientation is BoundOrientation.XBound:
            return x - self.slope * y - self.intercept
        return y - self.slope * x - self.intercept


def are_parallel(first: LinearBound, second: LinearBound) -> bool:
    """True iff the two bounds have linearly dependent direction vectors."""
    a = first.direction()
    b = second.direction()
    return a[0] * b[1] - a[1] * b[0] == 0.0


def intersection(bound_x: LinearBound, bound_y: LinearBound) -> tuple[float, float]:
    """
    Intersection point of an x-bound and a y-bound.

    Args:
        bound_x (LinearBound): Line x = a + b * y.
        bound_y (LinearBound): Line y = c + s * x.

    Returns:
        tuple[float, float]: The intersection point.

    Raises:
        DegenerateBoundsError: If the two bounds are parallel.
    """
    a, b = bound_x.intercept, bound_x.slope
    c, s = bound_y.intercept, bound_y.slope
    denom = 1.0 - b * s
    if denom == 0.0:
        raise DegenerateBoundsError(
            f"x-bound (slope {b}) and y-bound (slope {s}) are parallel; "
            "the response regions degenerate"
        )
    x = (a + b * c) / denom
    return x, c + s * x


def check_bound_family(bounds: Sequence[LinearBound], orientation: BoundOrientation) -> None:
    """
    Validate one dimension's bound family.

    Raises:
        InvalidModelError: If a bound has the wrong orientation, or intercepts
            are not strictly increasing.
        UnsupportedModelError: If the bounds are not mutually parallel.
    """
    if len(bounds) == 0:
        raise InvalidModelError(f"at least one {orientation.value} is required")
    for bound in bounds:
        if bound.orientation is not orientation:
            raise InvalidModelError(
                f"expected {orientation.value}, got {bound.orientation.value}"
            )
    if not all(are_parallel(bounds[0], bound) for bound in bounds[1:]):
        slopes = sorted({bound.slope for bound in bounds})
        raise UnsupportedModelError(
            f"{orientation.value} family is not parallel (slopes {slopes}); "
            "non-parallel bounds on one dimension produce uninterpretable response regions"
        )
    intercepts = [bound.intercept for bound in bounds]
    if any(lo >= hi for lo, hi in zip(intercepts, intercepts[1:])):
        raise InvalidModelError(
            f"{orientation.value} intercepts must be strictly increasing, got {intercepts}"
        )
