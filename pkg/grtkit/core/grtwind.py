r"""
The multilevel GRTwIND model and its subject-specific equivalence twins.

GRTwIND shares one set of four group-level perceptual distributions across
subjects. Subject :math:`k` sees the group means unchanged and the group
covariances rescaled by a global gain :math:`\kappa_k > 0` and an attention
weight :math:`0 < \lambda_k < 1`:

.. math::
    \Sigma_k = \begin{bmatrix}
        \sigma_{xx} / (\kappa_k \lambda_k) &
        \sigma_{xy} / (\kappa_k \sqrt{\lambda_k (1 - \lambda_k)}) \\
        \cdot & \sigma_{yy} / (\kappa_k (1 - \lambda_k))
    \end{bmatrix},

and responds through their own pair of linear bounds.

Each subject's bound slopes define a subject-specific rotation angle and
shear angle. Rotating and shearing every subject's model with its own pair of
matrices gives a collection of decisionally separable 2x2 models with the
same response probabilities but subject-varying means and covariances, so
decisional separability and universal perception cannot be tested apart.

The image means and covariances are computed from closed-form element
formulas (:func:`expanded_nu`, :func:`expanded_theta`, :func:`expanded_psi`)
and cross-checked in the test suite against plain matrix products. Two of the
closed forms in the literature carry transcription errors, which the matrix
products settle:

- the shear element :math:`\Psi_{11}` is
  :math:`\Theta_{11} - 2\Theta_{12}/\tan\omega + \Theta_{22}/\tan^2\omega`, not
  :math:`\Theta_{11} - \Theta_{12}(1 + \tan\omega)/\tan\omega + \Theta_{22}/\tan^2\omega`
  (the two agree only when :math:`\tan\omega = 1`; see :func:`printed_psi11`);
- the first element of :math:`\nu` subtracts
  :math:`(\mu_x\sin\varphi + \mu_y\cos\varphi)/\tan\omega`, the second row of
  the rotated mean, not :math:`(\mu_x\cos\varphi - \mu_y\sin\varphi)/\tan\omega`
  (see :func:`printed_nu`).

Example:
    >>> import numpy as np
    >>> subject_covariance(np.eye(2), kappa=2.0, lam=0.5).tolist()
    [[1.0, 0.0], [0.0, 1.0]]
"""

from __future__ import annotations

import dataclasses
import math
import typing as typ

import numpy as np
from joblib import Parallel, delayed

from grtkit.core.bounds import BoundOrientation, LinearBound, check_bound_family, intersection
from grtkit.core.constraints import ConstraintScheme
from grtkit.core.distribution import PerceptualDistribution
from grtkit.core.model import (
    DistributionGrid,
    ModelClass,
    TwoByTwoModel,
    as_grid,
    response_labels,
    stimulus_labels,
)
from grtkit.core.transforms import (
    AffineTransform,
    bound_angles,
    cotangent,
    ds_transform,
    level_bound,
    needs_reflection,
    normalize_model,
)
from grtkit.core.utils import UNIVERSAL_PERCEPTION_TOL, worker_count
from grtkit.exceptions import DegenerateBoundsError, DomainError, InvalidModelError

LAMBDA_MIN = 1e-6
LAMBDA_MAX = 1.0 - 1e-6


@dataclasses.dataclass(frozen=True)
class SubjectParams:
    """
    One subject's parameters.

    Attributes:
        kappa (float): Global scaling, kappa > 0.
        lam (float): Attention weight on x, in [1e-6, 1 - 1e-6].
        bound_x (LinearBound): The subject's x-bound.
        bound_y (LinearBound): The subject's y-bound.
        label (str): Optional subject name used in messages.
    """

    kappa: float
    lam: float
    bound_x: LinearBound
    bound_y: LinearBound
    label: str = dataclasses.field(default="", compare=False)

    def __post_init__(self):
        kappa = float(self.kappa)
        lam = float(self.lam)
        if not math.isfinite(kappa) or kappa <= 0.0:
            raise DomainError(f"{self.name}: kappa must be positive, got {kappa}")
        if not LAMBDA_MIN <= lam <= LAMBDA_MAX:
            raise DomainError(
                f"{self.name}: lambda must lie in [{LAMBDA_MIN}, {LAMBDA_MAX}], got {lam}"
            )
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "lam", lam)
        check_bound_family([self.bound_x], BoundOrientation.XBound)
        check_bound_family([self.bound_y], BoundOrientation.YBound)
        try:
            intersection(self.bound_x, self.bound_y)
        except DegenerateBoundsError as e:
            raise DegenerateBoundsError(f"{self.name}: {e}") from e

    @property
    def name(self) -> str:
        return f"subject {self.label}" if self.label else "subject"

    def with_label(self, label: str) -> SubjectParams:
        return dataclasses.replace(self, label=label)


@dataclasses.dataclass(frozen=True)
class GrtWindModel:
    """
    The GRTwIND model.

    Attributes:
        group_distributions (DistributionGrid): Shared 2x2 grid of distributions.
        subjects (tuple[SubjectParams, ...]): Per-subject parameters (at least one).
        constraints (ConstraintScheme): Identification constraints used when fitting.
    """

    group_distributions: DistributionGrid
    subjects: tuple[SubjectParams, ...]
    constraints: ConstraintScheme = dataclasses.field(default_factory=ConstraintScheme)

    def __post_init__(self):
        grid = as_grid(self.group_distributions)
        if len(grid) != 2 or len(grid[0]) != 2:
            raise InvalidModelError(
                f"GRTwIND needs a 2x2 grid of group distributions, got {len(grid)}x{len(grid[0])}"
            )
        subjects = tuple(
            subject if subject.label else subject.with_label(str(index + 1))
            for index, subject in enumerate(self.subjects)
        )
        if not subjects:
            raise InvalidModelError("a GRTwIND model needs at least one subject")
        object.__setattr__(self, "group_distributions", grid)
        object.__setattr__(self, "subjects", subjects)

    @property
    def n_subjects(self) -> int:
        return len(self.subjects)

    @property
    def model_class(self) -> ModelClass:
        return ModelClass.GrtWind

    @property
    def stimulus_levels(self) -> tuple[int, int]:
        return 2, 2

    @property
    def response_levels(self) -> tuple[int, int]:
        return 2, 2

    @property
    def flat_distributions(self) -> tuple[PerceptualDistribution, ...]:
        return tuple(dist for row in self.group_distributions for dist in row)

    @property
    def stimulus_labels(self) -> tuple[str, ...]:
        return stimulus_labels(2, 2)

    @property
    def response_labels(self) -> tuple[str, ...]:
        return response_labels(2, 2)

    def with_parts(
        self,
        group_distributions: typ.Optional[typ.Sequence[typ.Sequence[PerceptualDistribution]]] = None,
        subjects: typ.Optional[typ.Sequence[SubjectParams]] = None,
    ) -> GrtWindModel:
        return GrtWindModel(
            self.group_distributions if group_distributions is None else group_distributions,
            self.subjects if subjects is None else tuple(subjects),
            self.constraints,
        )


def _check_scaling(kappa: float, lam: float) -> None:
    if not math.isfinite(kappa) or kappa <= 0.0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")


def subject_covariance(group_cov: np.ndarray, kappa: float, lam: float) -> np.ndarray:
    """
    Scale a group covariance matrix to one subject.

    Args:
        group_cov (np.ndarray): 2x2 group covariance matrix.
        kappa (float): Global scaling, kappa > 0.
        lam (float): Attention weight, 0 < lambda < 1.

    Returns:
        np.ndarray: The subject's 2x2 covariance matrix.

    Raises:
        DomainError: If kappa <= 0 or lambda is outside (0, 1).
    """
    _check_scaling(kappa, lam)
    cov = np.asarray(group_cov, dtype=float)
    sxx = cov[0, 0] / (kappa * lam)
    sxy = cov[0, 1] / (kappa * math.sqrt(lam * (1.0 - lam)))
    syy = cov[1, 1] / (kappa * (1.0 - lam))
    return np.array([[sxx, sxy], [sxy, syy]])


def _subject_index(model: GrtWindModel, subject: int) -> SubjectParams:
    if not 0 <= subject < model.n_subjects:
        raise DomainError(
            f"subject index {subject} out of range for a model with {model.n_subjects} subjects"
        )
    return model.subjects[subject]


def subject_model(model: GrtWindModel, subject: int) -> TwoByTwoModel:
    """
    One subject's 2x2 model: group means, scaled covariances, the subject's bounds.

    Raises:
        DomainError: If the subject index is out of range.
    """
    params = _subject_index(model, subject)
    grid = [
        [
            PerceptualDistribution.from_matrix(
                dist.mean_vector,
                subject_covariance(dist.covariance_matrix, params.kappa, params.lam),
                dist.label,
            )
            for dist in row
        ]
        for row in model.group_distributions
    ]
    return TwoByTwoModel(grid, params.bound_x, params.bound_y, model.constraints)


def expanded_theta(
    group_cov: np.ndarray, kappa: float, lam: float, phi: float
) -> np.ndarray:
    """
    Rotated subject covariance ``R(phi) Sigma_k R(phi)^T`` from its element formulas.

    Args:
        group_cov (np.ndarray): 2x2 group covariance matrix.
        kappa (float): Global scaling.
        lam (float): Attention weight.
        phi (float): Rotation angle (counter-clockwise).

    Returns:
        np.ndarray: The symmetric matrix Theta.
    """
    _check_scaling(kappa, lam)
    cov = np.asarray(group_cov, dtype=float)
    sxx = cov[0, 0] / (kappa * lam)
    sxy = cov[0, 1] / (kappa * math.sqrt(lam * (1.0 - lam)))
    syy = cov[1, 1] / (kappa * (1.0 - lam))
    c, s = math.cos(phi), math.sin(phi)
    t11 = sxx * c * c - 2.0 * sxy * s * c + syy * s * s
    t12 = (sxx - syy) * c * s + sxy * (c * c - s * s)
    t22 = sxx * s * s + 2.0 * sxy * s * c + syy * c * c
    return np.array([[t11, t12], [t12, t22]])


def expanded_psi(theta: np.ndarray, omega: float) -> np.ndarray:
    """
    Sheared covariance ``S(omega) Theta S(omega)^T`` from its element formulas.

    The 22 element is left unchanged by the shear.
    """
    cot = cotangent(omega)
    t11, t12, t22 = theta[0, 0], theta[0, 1], theta[1, 1]
    p11 = t11 - 2.0 * t12 * cot + t22 * cot * cot
    p12 = t12 - t22 * cot
    return np.array([[p11, p12], [p12, t22]])


def printed_psi11(theta: np.ndarray, omega: float) -> float:
    """The 11 element with the (1 + tan w) / tan w coefficient; wrong unless tan w = 1."""
    tan = math.tan(omega)
    return float(theta[0, 0] - theta[0, 1] * (1.0 + tan) / tan + theta[1, 1] / tan**2)


def expanded_nu(mean: typ.Sequence[float], phi: float, omega: float) -> np.ndarray:
    """
    Rotated and sheared mean ``S(omega) R(phi) mu`` from its element formulas.

    Examples:
        >>> import math
        >>> expanded_nu((1.0, 0.0), 0.0, math.pi / 2).tolist()
        [1.0, 0.0]
    """
    mx, my = float(mean[0]), float(mean[1])
    c, s = math.cos(phi), math.sin(phi)
    cot = cotangent(omega)
    return np.array([mx * c - my * s - (mx * s + my * c) * cot, mx * s + my * c])


def printed_nu(mean: typ.Sequence[float], phi: float, omega: float) -> np.ndarray:
    """The mean with the cos/sin factors of the shear term swapped; wrong unless they coincide."""
    mx, my = float(mean[0]), float(mean[1])
    c, s = math.cos(phi), math.sin(phi)
    cot = cotangent(omega)
    return np.array([mx * c - my * s - mx * c * cot + my * s * cot, mx * s + my * c])


def _subject_image(model: GrtWindModel, subject: int) -> tuple[TwoByTwoModel, AffineTransform]:
    params = model.subjects[subject]
    try:
        transform = ds_transform(params.bound_x, params.bound_y)
        phi, omega = bound_angles(params.bound_x, params.bound_y)
    except DegenerateBoundsError as e:
        raise DegenerateBoundsError(f"{params.name}: {e}") from e
    if params.bound_x.is_axis_aligned and params.bound_y.is_axis_aligned:
        return subject_model(model, subject), transform

    p0 = np.array(intersection(params.bound_x, params.bound_y))
    flip = -1.0 if needs_reflection(transform) else 1.0
    grid = []
    for row in model.group_distributions:
        new_row = []
        for dist in row:
            theta = expanded_theta(dist.covariance_matrix, params.kappa, params.lam, -phi)
            psi = expanded_psi(theta, omega)
            nu = expanded_nu(dist.mean_vector - p0, -phi, omega)
            new_row.append(
                PerceptualDistribution(
                    (flip * nu[0] + p0[0], nu[1] + p0[1]),
                    (psi[0, 0], flip * psi[0, 1], psi[1, 1]),
                    dist.label,
                )
            )
        grid.append(new_row)
    image = TwoByTwoModel(
        grid,
        level_bound(transform, params.bound_x),
        level_bound(transform, params.bound_y),
        model.constraints,
    )
    return image, transform


def subject_specific_induce_ds(
    model: GrtWindModel, n_jobs: typ.Optional[int] = None
) -> tuple[list[TwoByTwoModel], list[AffineTransform]]:
    """
    Rotate and shear each subject's model with its own matrices.

    Each subject's transform is anchored at that subject's bound
    intersection. Subjects whose bounds are already axis-aligned get an
    identity transform and their plain subject model.

    Args:
        model (GrtWindModel): The model.
        n_jobs (int | None): joblib workers; defaults to ``worker_count()``.

    Returns:
        tuple: Per-subject DS models and per-subject transforms.

    Raises:
        DegenerateBoundsError: Naming the subject whose bounds are parallel.
    """
    results = Parallel(n_jobs=n_jobs or worker_count(), prefer="threads")(
        delayed(_subject_image)(model, subject) for subject in range(model.n_subjects)
    )
    images = [image for image, _ in results]
    transforms = [transform for _, transform in results]
    return images, transforms


def subject_specific_normalize(
    images: typ.Sequence[TwoByTwoModel],
) -> tuple[list[TwoByTwoModel], list[list[AffineTransform]]]:
    """
    Mean-variance normalization of each subject's DS image.

    Returns:
        tuple: Normalized per-subject models and, per subject, the four
            per-distribution transforms.
    """
    pairs = [normalize_model(image) for image in images]
    return [model for model, _ in pairs], [transforms for _, transforms in pairs]


def universal_perception_violated(
    models: typ.Sequence[TwoByTwoModel], tol: float = UNIVERSAL_PERCEPTION_TOL
) -> bool:
    """
    Whether a collection of per-subject models fails universal perception.

    Universal perception allows subjects to differ only by a translation of
    the whole configuration and a per-dimension rescaling of the variances.
    The check therefore compares, across subjects, the mean configuration
    relative to the first stimulus, the correlations, and the ratios of each
    marginal variance to that of the first stimulus.

    Args:
        models (Sequence[TwoByTwoModel]): One model per subject.
        tol (float): Absolute tolerance on every compared quantity.

    Returns:
        bool: True if any subject's structure differs from the first subject's.
    """

    def signature(model: TwoByTwoModel) -> np.ndarray:
        dists = model.flat_distributions
        means = np.array([dist.mean for dist in dists])
        covs = np.array([dist.covariance for dist in dists])
        return np.concatenate(
            [
                (means - means[0]).ravel(),
                [dist.correlation for dist in dists],
                covs[:, 0] / covs[0, 0],
                covs[:, 2] / covs[0, 2],
            ]
        )

    if len(models) < 2:
        return False
    reference = signature(models[0])
    return any(
        float(np.max(np.abs(signature(model) - reference))) > tol for model in models[1:]
    )
