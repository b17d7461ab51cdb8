"""
Bivariate Gaussian perceptual distributions.

A PerceptualDistribution models the noisy perception of one stimulus as a
draw from a bivariate normal density over the (x, y) perceptual plane. The
covariance is stored once, as the triple ``(sxx, sxy, syy)``, so symmetry
holds by construction; positive definiteness is checked when the value is
created, so no operation ever sees an invalid covariance.

Example:
    >>> dist = PerceptualDistribution((0.0, 1.0), (1.0, 0.5, 4.0))
    >>> dist.correlation
    0.25
    >>> dist.covariance_matrix.tolist()
    [[1.0, 0.5], [0.5, 4.0]]
"""

from __future__ import annotations

import dataclasses
import enum
import math

import numpy as np

from grtkit.exceptions import InvalidCovarianceError


class Dimension(enum.Enum):
    """
    The two perceptual dimensions.

    Attributes:
        X (int): The x dimension (stimulus factor A, response factor a).
        Y (int): The y dimension (stimulus factor B, response factor b).
    """

    X = 0
    Y = 1


@dataclasses.dataclass(frozen=True)
class PerceptualDistribution:
    """
    A bivariate Gaussian perceptual distribution.

    Attributes:
        mean (tuple[float, float]): Mean vector (mu_x, mu_y).
        covariance (tuple[float, float, float]): Covariance stored once as (sxx, sxy, syy).
        label (str): Optional stimulus label used in error messages.
    """

    mean: tuple[float, float]
    covariance: tuple[float, float, float]
    label: str = dataclasses.field(default="", compare=False)

    def __post_init__(self):
        mean = tuple(float(v) for v in self.mean)
        cov = tuple(float(v) for v in self.covariance)
        if len(mean) != 2:
            raise InvalidCovarianceError(
                f"{self._name()}: mean must have two elements, got {len(mean)}"
            )
        if len(cov) != 3:
            raise InvalidCovarianceError(
                f"{self._name()}: covariance must be given as [sxx, sxy, syy], got {len(cov)} values"
            )
        if not all(math.isfinite(v) for v in mean + cov):
            raise InvalidCovarianceError(f"{self._name()}: parameters must be finite")
        sxx, sxy, syy = cov
        det = sxx * syy - sxy * sxy
        if sxx <= 0.0 or syy <= 0.0 or det <= 0.0:
            raise InvalidCovarianceError(
                f"{self._name()}: covariance is not positive definite "
                f"(sxx={sxx}, syy={syy}, det={det})"
            )
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    def _name(self) -> str:
        return f"distribution {self.label}" if self.label else "distribution"

    @classmethod
    def from_matrix(
        cls, mean: np.ndarray, covariance: np.ndarray, label: str = ""
    ) -> PerceptualDistribution:
        """
        Build a distribution from a mean vector and a full 2x2 covariance matrix.

        The off-diagonal element is taken as the average of the two stored
        entries, so matrices that are symmetric up to rounding are accepted.

        Args:
            mean (np.ndarray): Mean vector of length 2.
            covariance (np.ndarray): 2x2 covariance matrix.
            label (str): Optional stimulus label.

        Returns:
            PerceptualDistribution: The new distribution.
        """
        cov = np.asarray(covariance, dtype=float)
        off = 0.5 * (cov[0, 1] + cov[1, 0])
        return cls(
            (float(mean[0]), float(mean[1])),
            (float(cov[0, 0]), float(off), float(cov[1, 1])),
            label,
        )

    @classmethod
    def from_correlation(
        cls,
        mean: tuple[float, float],
        sds: tuple[float, float] = (1.0, 1.0),
        rho: float = 0.0,
        label: str = "",
    ) -> PerceptualDistribution:
        """
        Build a distribution from standard deviations and a correlation.

        Examples:
            >>> PerceptualDistribution.from_correlation((1.0, 0.0), (2.0, 1.0), 0.5).covariance
            (4.0, 1.0, 1.0)
        """
        sx, sy = sds
        return cls(tuple(mean), (sx * sx, rho * sx * sy, sy * sy), label)

    @property
    def mean_vector(self) -> np.ndarray:
        """np.ndarray: A fresh copy of the mean as a length-2 array."""
        return np.array(self.mean, dtype=float)

    @property
    def covariance_matrix(self) -> np.ndarray:
        """np.ndarray: A fresh symmetric 2x2 covariance matrix."""
        sxx, sxy, syy = self.covariance
        return np.array([[sxx, sxy], [sxy, syy]], dtype=float)

    @property
    def sds(self) -> tuple[float, float]:
        """tuple[float, float]: Marginal standard deviations."""
        return math.sqrt(self.covariance[0]), math.sqrt(self.covariance[2])

    @property
    def correlation(self) -> float:
        """float: Correlation rho = sxy / sqrt(sxx * syy), always inside (-1, 1)."""
        sxx, sxy, syy = self.covariance
        return sxy / math.sqrt(sxx * syy)

    def marginal(self, dimension: Dimension) -> tuple[float, float]:
        """
        Marginal mean and variance on one dimension.

        Args:
            dimension (Dimension): The dimension to marginalize onto.

        Returns:
            tuple[float, float]: (mean, variance) of the marginal normal.
        """
        if dimension is Dimension.X:
            return self.mean[0], self.covariance[0]
        return self.mean[1], self.covariance[2]

    def with_label(self, label: str) -> PerceptualDistribution:
        """Return the same distribution carrying a different label."""
        return dataclasses.replace(self, label=label)
