r"""
Equivalence transformations of Gaussian GRT models.

Two families of invertible affine maps leave every predicted response
probability unchanged:

- **Rotation and shear.** With the y-bound family at angle :math:`\varphi`
  to the x axis and the x-bound family at angle :math:`\omega` to the y-bound
  family, rotating by :math:`-\varphi` and shearing with

  .. math::
      S = \begin{bmatrix} 1 & -1/\tan\omega \\ 0 & 1 \end{bmatrix}

  makes every bound axis-aligned, so any model with linear failures of
  decisional separability has a decisionally separable twin.

- **Mean-variance normalization.** For axis-aligned criteria
  :math:`c = (c_x, c_y)`, the map :math:`p \mapsto Tp + \Delta` with
  :math:`T = \mathrm{diag}(\sigma_{xx}^{-1/2}, \sigma_{yy}^{-1/2})` and
  :math:`\Delta = c - Tc` turns a covariance into its correlation matrix
  and moves the mean to :math:`\eta = c + T(\mu - c)`, keeping the criteria
  fixed.

Every transform is recorded as an :class:`AffineTransform` carrying its
provenance, so the image can always be mapped back.

Example:
    >>> import math
    >>> t = rotation(math.pi / 2)
    >>> t.apply_point((1.0, 0.0)).round(12).tolist()
    [0.0, 1.0]
    >>> shear(math.pi / 4).linear.round(12).tolist()
    [[1.0, -1.0], [0.0, 1.0]]
"""

from __future__ import annotations

import dataclasses
import math
import typing as typ

import numpy as np

from grtkit.core.bounds import BoundOrientation, LinearBound, intersection
from grtkit.core.distribution import Dimension, PerceptualDistribution
from grtkit.core.model import SingleSubjectModel, TwoByTwoModel
from grtkit.core.separability import has_ds
from grtkit.exceptions import (
    DegenerateBoundsError,
    DomainError,
    PreconditionError,
    SchemaError,
)

_SINGULAR_TOL = 1e-12


@dataclasses.dataclass(frozen=True)
class Rotation:
    phi: float


@dataclasses.dataclass(frozen=True)
class Shear:
    omega: float


@dataclasses.dataclass(frozen=True)
class Reflection:
    """Negation of one coordinate."""

    dimension: Dimension


@dataclasses.dataclass(frozen=True)
class Translation:
    shift: tuple[float, float]


@dataclasses.dataclass(frozen=True)
class MeanVarianceNormalization:
    """
    Per-dimension rescaling about the response criteria.

    Attributes:
        scale (tuple[float, float]): Diagonal of T, (1/sqrt(sxx), 1/sqrt(syy)).
        shift (tuple[float, float]): The offset Delta = c - T c.
    """

    scale: tuple[float, float]
    shift: tuple[float, float]


@dataclasses.dataclass(frozen=True)
class Inverse:
    of: "Provenance"


@dataclasses.dataclass(frozen=True)
class Composite:
    """Transforms applied in order, first element first."""

    parts: tuple["AffineTransform", ...]


Provenance = typ.Union[
    Rotation, Shear, Reflection, Translation, MeanVarianceNormalization, Inverse, Composite
]


@dataclasses.dataclass(frozen=True, eq=False)
class AffineTransform:
    """
    An invertible affine map ``p -> linear @ p + offset`` with a provenance tag.

    Attributes:
        linear (np.ndarray): Invertible 2x2 matrix (read-only).
        offset (np.ndarray): Translation 2-vector (read-only).
        provenance (Provenance): How the transform was produced.
    """

    linear: np.ndarray
    offset: np.ndarray
    provenance: Provenance

    def __post_init__(self):
        linear = np.array(self.linear, dtype=float)
        offset = np.array(self.offset, dtype=float)
        if linear.shape != (2, 2) or offset.shape != (2,):
            raise DomainError(
                f"affine transform needs a 2x2 linear part and a 2-vector offset, "
                f"got {linear.shape} and {offset.shape}"
            )
        if not np.all(np.isfinite(linear)) or not np.all(np.isfinite(offset)):
            raise DomainError("affine transform entries must be finite")
        det = float(np.linalg.det(linear))
        if abs(det) <= _SINGULAR_TOL:
            raise DomainError(f"affine transform is not invertible (det={det})")
        linear.setflags(write=False)
        offset.setflags(write=False)
        object.__setattr__(self, "linear", linear)
        object.__setattr__(self, "offset", offset)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AffineTransform):
            return NotImplemented
        return (
            np.array_equal(self.linear, other.linear)
            and np.array_equal(self.offset, other.offset)
            and self.provenance == other.provenance
        )

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def identity(cls) -> AffineTransform:
        return cls(np.eye(2), np.zeros(2), Composite(()))

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.linear, np.eye(2)) and not np.any(self.offset))

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.linear))

    def apply_point(self, point: typ.Sequence[float] | np.ndarray) -> np.ndarray:
        """Map a point (or an (n, 2) array of points)."""
        p = np.asarray(point, dtype=float)
        return p @ self.linear.T + self.offset

    def apply_distribution(self, dist: PerceptualDistribution) -> PerceptualDistribution:
        """Map a distribution: mean to ``A mu + b``, covariance to ``A Sigma A^T``."""
        return PerceptualDistribution.from_matrix(
            self.apply_point(dist.mean_vector),
            self.apply_covariance(dist.covariance_matrix),
            dist.label,
        )

    def apply_bound(self, bound: LinearBound) -> LinearBound:
        """
        Map a bound, keeping its orientation.

        Raises:
            PreconditionError: If the image line is parallel to the axis the
                bound partitions, so it cannot keep its orientation.
        """
        direction = self.linear @ bound.direction()
        p = self.apply_point(bound.point())
        if bound.orientation is BoundOrientation.XBound:
            if direction[1] == 0.0:
                raise PreconditionError("x-bound image is horizontal")
            slope = direction[0] / direction[1]
            return LinearBound(bound.orientation, p[0] - slope * p[1], slope)
        if direction[0] == 0.0:
            raise PreconditionError("y-bound image is vertical")
        slope = direction[1] / direction[0]
        return LinearBound(bound.orientation, p[1] - slope * p[0], slope)

    def apply_covariance(self, covariance: np.ndarray) -> np.ndarray:
        """``A Sigma A^T``; the offset does not act on covariances."""
        return self.linear @ np.asarray(covariance, dtype=float) @ self.linear.T

    def inverse(self) -> AffineTransform:
        """
        The inverse map.

        Examples:
            >>> t = compose(rotation(0.3), shear(1.1))
            >>> back = t.inverse().apply_point(t.apply_point((2.0, -1.0)))
            >>> np.allclose(back, (2.0, -1.0), atol=1e-12)
            True
        """
        inv = np.linalg.inv(self.linear)
        return AffineTransform(inv, -inv @ self.offset, Inverse(self.provenance))

    def to_dict(self) -> dict[str, typ.Any]:
        return {
            "linear": self.linear.tolist(),
            "offset": self.offset.tolist(),
            "provenance": _provenance_to_dict(self.provenance),
        }

    @classmethod
    def from_dict(cls, data: dict[str, typ.Any]) -> AffineTransform:
        try:
            return cls(
                np.array(data["linear"], dtype=float),
                np.array(data["offset"], dtype=float),
                _provenance_from_dict(data["provenance"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"malformed affine transform record: {e}") from e


def _provenance_to_dict(provenance: Provenance) -> dict[str, typ.Any]:
    if isinstance(provenance, Rotation):
        return {"kind": "Rotation", "phi": provenance.phi}
    if isinstance(provenance, Shear):
        return {"kind": "Shear", "omega": provenance.omega}
    if isinstance(provenance, Reflection):
        return {"kind": "Reflection", "dimension": provenance.dimension.name}
    if isinstance(provenance, Translation):
        return {"kind": "Translation", "shift": list(provenance.shift)}
    if isinstance(provenance, MeanVarianceNormalization):
        return {
            "kind": "MeanVarianceNormalization",
            "scale": list(provenance.scale),
            "shift": list(provenance.shift),
        }
    if isinstance(provenance, Inverse):
        return {"kind": "Inverse", "of": _provenance_to_dict(provenance.of)}
    return {"kind": "Composite", "parts": [part.to_dict() for part in provenance.parts]}


def _provenance_from_dict(data: dict[str, typ.Any]) -> Provenance:
    kind = data["kind"]
    if kind == "Rotation":
        return Rotation(float(data["phi"]))
    if kind == "Shear":
        return Shear(float(data["omega"]))
    if kind == "Reflection":
        return Reflection(Dimension[data["dimension"]])
    if kind == "Translation":
        return Translation(_pair(data["shift"]))
    if kind == "MeanVarianceNormalization":
        return MeanVarianceNormalization(_pair(data["scale"]), _pair(data["shift"]))
    if kind == "Inverse":
        return Inverse(_provenance_from_dict(data["of"]))
    if kind == "Composite":
        return Composite(tuple(AffineTransform.from_dict(part) for part in data["parts"]))
    raise SchemaError(f"unknown transform provenance {kind!r}")


def _pair(values: typ.Sequence[float]) -> tuple[float, float]:
    x, y = values
    return float(x), float(y)


def rotation(phi: float) -> AffineTransform:
    """
    Counter-clockwise rotation by ``phi`` radians about the origin.

    Raises:
        DomainError: If phi is not finite.

    Examples:
        >>> rotation(0.0).linear.tolist()
        [[1.0, -0.0], [0.0, 1.0]]
    """
    if not math.isfinite(phi):
        raise DomainError(f"rotation angle must be finite, got {phi}")
    c, s = math.cos(phi), math.sin(phi)
    return AffineTransform(np.array([[c, -s], [s, c]]), np.zeros(2), Rotation(float(phi)))


def cotangent(omega: float) -> float:
    # cot is exactly zero at a right angle, where tan overflows to ~1.6e16
    if omega % math.pi == math.pi / 2:
        return 0.0
    return 1.0 / math.tan(omega)


def shear(omega: float) -> AffineTransform:
    """
    Horizontal shear ``[[1, -1/tan(omega)], [0, 1]]``.

    Raises:
        DegenerateBoundsError: If omega is a multiple of pi (parallel bounds).

    Examples:
        >>> import math
        >>> shear(math.pi / 2).linear.tolist()
        [[1.0, -0.0], [0.0, 1.0]]
    """
    if not math.isfinite(omega):
        raise DomainError(f"shear angle must be finite, got {omega}")
    if omega % math.pi == 0.0 or math.sin(omega) == 0.0:
        raise DegenerateBoundsError(
            f"shear angle {omega} is a multiple of pi; the bound families are parallel"
        )
    return AffineTransform(
        np.array([[1.0, -cotangent(omega)], [0.0, 1.0]]), np.zeros(2), Shear(float(omega))
    )


def reflection(dimension: Dimension) -> AffineTransform:
    """Reflection negating one coordinate."""
    linear = np.eye(2)
    linear[dimension.value, dimension.value] = -1.0
    return AffineTransform(linear, np.zeros(2), Reflection(dimension))


def translation(shift: typ.Sequence[float]) -> AffineTransform:
    x, y = _pair(shift)
    return AffineTransform(np.eye(2), np.array([x, y]), Translation((x, y)))


def compose(*transforms: AffineTransform) -> AffineTransform:
    """
    Compose transforms, applying them in the order given.

    Nested composites are flattened into a single parts list.
    """
    parts: list[AffineTransform] = []
    linear = np.eye(2)
    offset = np.zeros(2)
    for t in transforms:
        linear = t.linear @ linear
        offset = t.linear @ offset + t.offset
        if isinstance(t.provenance, Composite):
            parts.extend(t.provenance.parts)
        else:
            parts.append(t)
    return AffineTransform(linear, offset, Composite(tuple(parts)))


def bound_angles(bound_x: LinearBound, bound_y: LinearBound) -> tuple[float, float]:
    """
    Rotation and shear angles that make a pair of bound families axis-aligned.

    Args:
        bound_x (LinearBound): A member of the x-bound family.
        bound_y (LinearBound): A member of the y-bound family.

    Returns:
        tuple[float, float]: ``(phi, omega)`` where ``phi = arctan(slope of the
            y-bounds)`` and ``omega`` in (0, pi) is the angle from the y-bound
            direction to the x-bound direction. The rotation that levels the
            y-bounds is ``rotation(-phi)``.

    Raises:
        DegenerateBoundsError: If the two families are parallel.

    Examples:
        >>> bound_angles(LinearBound("XBound", 0.0), LinearBound("YBound", 0.0))
        (0.0, 1.5707963267948966)
    """
    intersection(bound_x, bound_y)
    phi = math.atan(bound_y.slope)
    theta_x = math.atan2(1.0, bound_x.slope)
    omega = (theta_x - phi) % math.pi
    if omega == 0.0:
        raise DegenerateBoundsError(
            f"x-bound (slope {bound_x.slope}) and y-bound (slope {bound_y.slope}) are parallel"
        )
    return phi, omega


def ds_transform(bound_x: LinearBound, bound_y: LinearBound) -> AffineTransform:
    """
    The anchored rotation-and-shear that aligns both bound families with the axes.

    The bound intersection p0 is moved to the origin, rotated by -phi,
    sheared by omega and moved back. When the x-bound family is tilted past
    the y-bound family the shear alone would swap the left and right sides of
    the x-bounds; an extra reflection of x about p0 restores the order so
    that every response region keeps its label.

    Raises:
        DegenerateBoundsError: If the two families are parallel.
    """
    phi, omega = bound_angles(bound_x, bound_y)
    if bound_x.is_axis_aligned and bound_y.is_axis_aligned:
        return compose(rotation(0.0), shear(math.pi / 2))
    p0 = np.array(intersection(bound_x, bound_y))
    steps = [translation(-p0), rotation(-phi), shear(omega)]
    alpha = math.atan2(1.0, bound_x.slope) - phi
    if math.sin(alpha) < 0.0:
        steps.append(reflection(Dimension.X))
    steps.append(translation(p0))
    return compose(*steps)


def needs_reflection(transform: AffineTransform) -> bool:
    """True if a DS-inducing transform contains a reflection step."""
    if not isinstance(transform.provenance, Composite):
        return isinstance(transform.provenance, Reflection)
    return any(isinstance(part.provenance, Reflection) for part in transform.provenance.parts)


def level_bound(transform: AffineTransform, bound: LinearBound) -> LinearBound:
    """Image of a bound under a DS-inducing transform, with its slope set to exactly 0.0."""
    p = transform.apply_point(bound.point())
    intercept = p[0] if bound.orientation is BoundOrientation.XBound else p[1]
    return LinearBound(bound.orientation, float(intercept), 0.0)


def induce_ds(model: SingleSubjectModel) -> tuple[SingleSubjectModel, AffineTransform]:
    """
    Map a model to its decisionally separable equivalence twin.

    Args:
        model (TwoByTwoModel | MultiBoundModel): Any valid single-subject model.
            Model construction already guarantees parallel same-dimension bounds
            and non-parallel x- and y-families.

    Returns:
        tuple: The transformed model, with every bound slope exactly 0.0, and
            the AffineTransform that produced it. A model that already
            satisfies DS is returned unchanged with an identity transform.

    Examples:
        >>> import math
        >>> from grtkit.core.bounds import LinearBound
        >>> model = TwoByTwoModel.symmetric(1.0).with_parts(
        ...     bounds_y=[LinearBound("YBound", 0.0, math.tan(0.2))]
        ... )
        >>> image, t = induce_ds(model)
        >>> has_ds(image), t.is_identity
        (True, False)
    """
    if has_ds(model):
        return model, ds_transform(model.bounds_x[0], model.bounds_y[0])
    transform = ds_transform(model.bounds_x[0], model.bounds_y[0])
    distributions = [
        [transform.apply_distribution(dist) for dist in row] for row in model.distributions
    ]
    bounds_x = [level_bound(transform, bound) for bound in model.bounds_x]
    bounds_y = [level_bound(transform, bound) for bound in model.bounds_y]
    return model.with_parts(distributions, bounds_x, bounds_y), transform


def normalize_mean_variance(
    dist: PerceptualDistribution, criteria: tuple[float, float]
) -> tuple[PerceptualDistribution, AffineTransform]:
    """
    Trade marginal variances for means about axis-aligned criteria.

    Args:
        dist (PerceptualDistribution): The distribution to normalize.
        criteria (tuple[float, float]): The criteria (c_x, c_y).

    Returns:
        tuple: The distribution with covariance equal to its correlation
            matrix and mean ``c + (mu - c) / sd``, and the transform T + Delta.

    Examples:
        >>> dist = PerceptualDistribution((1.0, 0.0), (4.0, 0.0, 1.0))
        >>> image, t = normalize_mean_variance(dist, (0.0, 0.0))
        >>> image.mean, image.covariance
        ((0.5, 0.0), (1.0, 0.0, 1.0))
    """
    cx, cy = float(criteria[0]), float(criteria[1])
    if not (math.isfinite(cx) and math.isfinite(cy)):
        raise DomainError(f"criteria must be finite, got {criteria}")
    sxx, _, syy = dist.covariance
    if sxx == 1.0 and syy == 1.0:
        return dist, AffineTransform(
            np.eye(2), np.zeros(2), MeanVarianceNormalization((1.0, 1.0), (0.0, 0.0))
        )
    sx, sy = dist.sds
    mx, my = dist.mean
    scale = (1.0 / sx, 1.0 / sy)
    shift = (cx - cx / sx, cy - cy / sy)
    image = PerceptualDistribution(
        (cx + (mx - cx) / sx, cy + (my - cy) / sy),
        (1.0, dist.correlation, 1.0),
        dist.label,
    )
    transform = AffineTransform(
        np.diag(scale), np.array(shift), MeanVarianceNormalization(scale, shift)
    )
    return image, transform


def normalize_model(model: TwoByTwoModel) -> tuple[TwoByTwoModel, list[AffineTransform]]:
    """
    Normalize every distribution of a DS 2x2 model to unit marginal variances.

    The bounds are left untouched and the response probabilities are unchanged.

    Returns:
        tuple: The normalized model and one transform per distribution, in
            row-major stimulus order.

    Raises:
        PreconditionError: If DS fails, or the model is not a 2x2 model (in
            multi-bound models means and variances are jointly identifiable).
    """
    if not isinstance(model, TwoByTwoModel):
        raise PreconditionError(
            "mean-variance normalization applies to 2x2 models only; "
            "multi-bound models identify means and variances jointly"
        )
    if not has_ds(model):
        raise PreconditionError(
            "mean-variance normalization needs decisionally separable bounds; apply induce_ds first"
        )
    criteria = (model.bound_x.intercept, model.bound_y.intercept)
    grid = []
    transforms = []
    for row in model.distributions:
        new_row = []
        for dist in row:
            image, t = normalize_mean_variance(dist, criteria)
            new_row.append(image)
            transforms.append(t)
        grid.append(new_row)
    return model.with_parts(distributions=grid), transforms


def ellipse_points(
    dist: PerceptualDistribution, level: float = 1.0, n_points: int = 64
) -> np.ndarray:
    """
    Points on an equal-likelihood contour of a distribution.

    Args:
        dist (PerceptualDistribution): The distribution.
        level (float): Mahalanobis radius of the contour.
        n_points (int): Number of points, evenly spaced in angle.

    Returns:
        np.ndarray: (n_points, 2) array of contour points.

    Examples:
        >>> pts = ellipse_points(PerceptualDistribution((0.0, 0.0), (4.0, 0.0, 1.0)), n_points=4)
        >>> pts.round(12).tolist()
        [[2.0, 0.0], [0.0, 1.0], [-2.0, 0.0], [-0.0, -1.0]]
    """
    if level <= 0.0 or n_points < 1:
        raise DomainError("ellipse level must be positive and n_points at least one")
    t = np.linspace(0.0, 2.0 * np.pi, n_points, endpoint=False)
    circle = level * np.stack([np.cos(t), np.sin(t)], axis=1)
    chol = np.linalg.cholesky(dist.covariance_matrix)
    return circle @ chol.T + dist.mean_vector
