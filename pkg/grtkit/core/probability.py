r"""
Bivariate normal integration and predicted response probabilities.

The predicted probability of response :math:`a_ib_j` to a stimulus is the
mass of its perceptual distribution over the response region. Once the
bounds are axis-aligned every region is a rectangle, so everything reduces
to the standard bivariate normal CDF

.. math::
    \Phi_2(h, k; \rho) = P(X \le h, Y \le k),

evaluated with Gauss-Legendre quadrature of Plackett's identity for
moderate correlations and of a series-corrected integral near
:math:`|\rho| = 1` (Genz's BVNU scheme). Models whose bounds are tilted are
first mapped to their decisionally separable twin, which has exactly the same
response probabilities.

Example:
    >>> bvn_cdf(0.0, 0.0, 0.0)
    0.25
    >>> round(bvn_cdf(0.0, 0.0, 0.5), 12)
    0.333333333333
"""

from __future__ import annotations

import dataclasses
import math
import typing as typ

import numpy as np
from scipy.special import ndtr

from grtkit.core.bounds import LinearBound
from grtkit.core.distribution import PerceptualDistribution
from grtkit.core.separability import has_ds
from grtkit.core.transforms import induce_ds
from grtkit.exceptions import DomainError, InvalidModelError

if typ.TYPE_CHECKING:
    from grtkit.core.grtwind import GrtWindModel
    from grtkit.core.model import SingleSubjectModel

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(20)
_TWO_PI = 2.0 * math.pi
_HIGH_CORRELATION = 0.925

ArrayLike = typ.Union[float, typ.Sequence[float], np.ndarray]


def _bvnu_moderate(h: np.ndarray, k: np.ndarray, r: np.ndarray) -> np.ndarray:
    hs = 0.5 * (h * h + k * k)
    asr = np.arcsin(r)
    sn = np.sin(np.outer(asr, _NODES + 1.0) / 2.0)
    terms = np.exp((sn * (h * k)[:, None] - hs[:, None]) / (1.0 - sn * sn))
    return (terms @ _WEIGHTS) * asr / (2.0 * _TWO_PI) + ndtr(-h) * ndtr(-k)


def _bvnu_high(h: np.ndarray, k: np.ndarray, r: np.ndarray) -> np.ndarray:
    k = np.where(r < 0.0, -k, k)
    hk = h * k
    as_ = (1.0 - r) * (1.0 + r)
    a = np.sqrt(as_)
    bs = (h - k) ** 2
    c = (4.0 - hk) / 8.0
    d = (12.0 - hk) / 16.0
    bvn = a * np.exp(-(bs / as_ + hk) / 2.0) * (
        1.0 - c * (bs - as_) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as_ * as_ / 5.0
    )
    b = np.sqrt(bs)
    tail = (
        np.exp(-np.maximum(hk, -160.0) / 2.0)
        * math.sqrt(_TWO_PI)
        * ndtr(-b / a)
        * b
        * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0)
    )
    bvn = np.where(hk > -160.0, bvn - tail, bvn)

    half = a / 2.0
    xs = (np.outer(half, _NODES + 1.0)) ** 2
    rs = np.sqrt(1.0 - xs)
    exponent = -(bs[:, None] / xs + hk[:, None]) / 2.0
    with np.errstate(over="ignore", invalid="ignore"):
        sp = 1.0 + c[:, None] * xs * (1.0 + d[:, None] * xs)
        ep = np.exp(-hk[:, None] * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs
        terms = np.where(exponent > -100.0, np.exp(exponent) * (ep - sp), 0.0)
    bvn = -(bvn + half * (terms @ _WEIGHTS)) / _TWO_PI

    positive = bvn + ndtr(-np.maximum(h, k))
    correction = np.where(
        k > h, np.where(h < 0.0, ndtr(k) - ndtr(h), ndtr(-h) - ndtr(-k)), 0.0
    )
    return np.where(r > 0.0, positive, -bvn + correction)


def _bvnu(h: np.ndarray, k: np.ndarray, r: np.ndarray) -> np.ndarray:
    """P(X > h, Y > k) for finite h, k (1-D arrays)."""
    out = np.empty_like(r)
    moderate = np.abs(r) < _HIGH_CORRELATION
    if np.any(moderate):
        out[moderate] = _bvnu_moderate(h[moderate], k[moderate], r[moderate])
    if not np.all(moderate):
        high = ~moderate
        out[high] = _bvnu_high(h[high], k[high], r[high])
    return out


def bvn_cdf(h: ArrayLike, k: ArrayLike, rho: ArrayLike) -> typ.Union[float, np.ndarray]:
    """
    Standard bivariate normal CDF, ``P(X <= h, Y <= k)`` with correlation ``rho``.

    Arguments broadcast against each other. Infinite limits are handled
    exactly; the absolute error is below 1e-12 everywhere else.

    Args:
        h: Upper limit on the first coordinate (finite or +-inf).
        k: Upper limit on the second coordinate (finite or +-inf).
        rho: Correlation with ``|rho| < 1``.

    Returns:
        float or np.ndarray: The probability, a float when every argument is scalar.

    Raises:
        DomainError: If ``|rho| >= 1`` or any argument is NaN.

    Examples:
        >>> bvn_cdf(math.inf, math.inf, 0.7)
        1.0
        >>> bvn_cdf(-math.inf, 2.0, 0.3)
        0.0
        >>> bvn_cdf([0.0, 1.0], 0.0, 0.0).round(6).tolist()
        [0.25, 0.420672]
    """
    h_arr, k_arr, r_arr = np.broadcast_arrays(
        np.asarray(h, dtype=float), np.asarray(k, dtype=float), np.asarray(rho, dtype=float)
    )
    if np.any(np.isnan(h_arr)) or np.any(np.isnan(k_arr)) or np.any(np.isnan(r_arr)):
        raise DomainError("bivariate normal CDF arguments must not be NaN")
    if np.any(np.abs(r_arr) >= 1.0):
        raise DomainError(f"correlation must satisfy |rho| < 1, got {rho}")
    shape = h_arr.shape
    h_flat, k_flat, r_flat = h_arr.ravel(), k_arr.ravel(), r_arr.ravel()
    finite = np.isfinite(h_flat) & np.isfinite(k_flat)

    p = np.zeros_like(r_flat)
    if np.any(finite):
        p[finite] = _bvnu(-h_flat[finite], -k_flat[finite], r_flat[finite])
    p = np.where(h_flat == math.inf, ndtr(k_flat), p)
    p = np.where(k_flat == math.inf, ndtr(h_flat), p)
    p = np.where((h_flat == -math.inf) | (k_flat == -math.inf), 0.0, p)
    p = np.clip(p, 0.0, 1.0).reshape(shape)
    if p.ndim == 0:
        return float(p)
    return p


@dataclasses.dataclass(frozen=True)
class ResponseRegion:
    """
    An axis-aligned response rectangle; endpoints may be ``math.inf`` or ``-math.inf``.

    Attributes:
        x_interval (tuple[float, float]): (lower, upper) on x.
        y_interval (tuple[float, float]): (lower, upper) on y.
    """

    x_interval: tuple[float, float]
    y_interval: tuple[float, float]

    def __post_init__(self):
        for name in ("x_interval", "y_interval"):
            lower, upper = (float(v) for v in getattr(self, name))
            if math.isnan(lower) or math.isnan(upper) or not lower < upper:
                raise InvalidModelError(f"{name} must satisfy lower < upper, got ({lower}, {upper})")
            object.__setattr__(self, name, (lower, upper))

    @classmethod
    def plane(cls) -> ResponseRegion:
        return cls((-math.inf, math.inf), (-math.inf, math.inf))


def rectangle_probability(dist: PerceptualDistribution, region: ResponseRegion) -> float:
    """
    Probability mass of a distribution over an axis-aligned rectangle.

    Examples:
        >>> dist = PerceptualDistribution((1.0, 0.0), (1.0, 0.0, 1.0))
        >>> round(rectangle_probability(dist, ResponseRegion((0.0, math.inf), (-math.inf, math.inf))), 4)
        0.8413
    """
    sx, sy = dist.sds
    mx, my = dist.mean
    xs = (np.array(region.x_interval) - mx) / sx
    ys = (np.array(region.y_interval) - my) / sy
    corners = bvn_cdf(xs[:, None], ys[None, :], dist.correlation)
    mass = corners[1, 1] - corners[0, 1] - corners[1, 0] + corners[0, 0]
    return float(min(max(mass, 0.0), 1.0))


def _edges(bounds: typ.Sequence[LinearBound]) -> np.ndarray:
    return np.array([-math.inf] + [bound.intercept for bound in bounds] + [math.inf])


def regions(model: "SingleSubjectModel") -> list[ResponseRegion]:
    """Response regions of a DS model in row-major response order."""
    x_edges = _edges(model.bounds_x)
    y_edges = _edges(model.bounds_y)
    return [
        ResponseRegion((x_edges[i], x_edges[i + 1]), (y_edges[j], y_edges[j + 1]))
        for i in range(len(x_edges) - 1)
        for j in range(len(y_edges) - 1)
    ]


def _distribution_row(
    dist: PerceptualDistribution, x_edges: np.ndarray, y_edges: np.ndarray
) -> np.ndarray:
    sx, sy = dist.sds
    mx, my = dist.mean
    cdf = bvn_cdf(((x_edges - mx) / sx)[:, None], ((y_edges - my) / sy)[None, :], dist.correlation)
    cells = cdf[1:, 1:] - cdf[:-1, 1:] - cdf[1:, :-1] + cdf[:-1, :-1]
    return np.clip(cells, 0.0, 1.0).ravel()


def response_probabilities(model: "SingleSubjectModel") -> np.ndarray:
    """
    Predicted response probabilities of a 2x2 or multi-bound model.

    When decisional separability fails the model is first mapped to its
    DS twin with :func:`grtkit.core.transforms.induce_ds`, which leaves the
    probabilities unchanged, and the rectangles of the twin are integrated.

    Args:
        model (TwoByTwoModel | MultiBoundModel): The model.

    Returns:
        np.ndarray: S x R matrix, rows in row-major stimulus order and
            columns in row-major response order. Each row sums to one.

    Examples:
        >>> from grtkit.core.model import TwoByTwoModel
        >>> response_probabilities(TwoByTwoModel.symmetric()).tolist()[0]
        [0.25, 0.25, 0.25, 0.25]
    """
    if not has_ds(model):
        model, _ = induce_ds(model)
    x_edges = _edges(model.bounds_x)
    y_edges = _edges(model.bounds_y)
    return np.stack(
        [_distribution_row(dist, x_edges, y_edges) for dist in model.flat_distributions]
    )


def grtwind_response_probabilities(model: "GrtWindModel", subject: int) -> np.ndarray:
    """
    Predicted 4x4 response probabilities of one GRTwIND subject.

    The subject's 2x2 model (shared means, scaled covariances, own bounds) is
    built with :func:`grtkit.core.grtwind.subject_model` and passed to
    :func:`response_probabilities`.
    """
    from grtkit.core.grtwind import subject_model

    return response_probabilities(subject_model(model, subject))


def bound_coordinate_probabilities(model: "SingleSubjectModel") -> np.ndarray:
    """
    Response probabilities integrated in the coordinates of the bound functionals.

    Every response region is a rectangle in ``(x - b y, y - s x)``, where b
    and s are the common slopes of the x- and y-bound families. Each
    distribution is mapped there exactly (a linear change of variables) and
    integrated with the same rectangle kernel. This route never calls
    :func:`induce_ds`, which makes it an independent check on the
    transform-based :func:`response_probabilities`.
    """
    b = model.bounds_x[0].slope
    s = model.bounds_y[0].slope
    functionals = np.array([[1.0, -b], [-s, 1.0]])
    x_edges = _edges(model.bounds_x)
    y_edges = _edges(model.bounds_y)
    rows = []
    for dist in model.flat_distributions:
        image = PerceptualDistribution.from_matrix(
            functionals @ dist.mean_vector,
            functionals @ dist.covariance_matrix @ functionals.T,
        )
        rows.append(_distribution_row(image, x_edges, y_edges))
    return np.stack(rows)
