"""
Degrees-of-freedom accounting and equivalence certificates.

The audit compares the degrees of freedom in the confusion-matrix data with
the free parameters of a model class under a constraint scheme. Passing it
is a necessary condition for identifiability only: counts can balance while
the parameters are still traded off against each other, which is exactly
what the equivalence certificate demonstrates by producing structurally
different twins with the same predicted response probabilities.

Example:
    >>> report = audit(ModelClass.ConcurrentRatings, (3, 3))
    >>> report.data_dof, report.free_parameters
    (32, 20)
    >>> audit("grtwind", 2).over_parameterized
    True
"""

from __future__ import annotations

import dataclasses
import typing as typ

import numpy as np

from grtkit.core.constraints import (
    ConstraintScheme,
    LocationFix,
    LocationKind,
    OrthogonalityFix,
    ScaleFix,
    ScaleKind,
)
from grtkit.core.grtwind import (
    GrtWindModel,
    subject_model,
    subject_specific_induce_ds,
    universal_perception_violated,
)
from grtkit.core.model import ModelClass, SingleSubjectModel, TwoByTwoModel
from grtkit.core.probability import bound_coordinate_probabilities, response_probabilities
from grtkit.core.transforms import AffineTransform, induce_ds, normalize_model
from grtkit.core.utils import EQUIVALENCE_TOL
from grtkit.exceptions import DomainError

CHECK_LABEL = "necessary-conditions check"


@dataclasses.dataclass(frozen=True)
class DofReport:
    """
    Degrees of freedom in the data against free parameters in the model.

    Attributes:
        model_class (ModelClass): The audited class.
        dimensions (tuple[int, ...]): (n, m) levels, or (N,) subjects for GRTwIND.
        scheme (ConstraintScheme): The constraint scheme the counts assume.
        data_dof (int): Independent cells of the confusion data.
        perceptual_parameters (int): Free means, variances and covariances.
        decisional_parameters (int): Free bound intercepts and slopes.
        scaling_parameters (int): Free GRTwIND kappa and lambda parameters.
        scheme_complete (bool): Location, scale and orthogonality are all fixed.
        identifiable_under_scheme (bool): Counts balance and the scheme is complete
            (and, for GRTwIND, there are at least three subjects).
        notes (str): Human-readable explanation.
    """

    model_class: ModelClass
    dimensions: tuple[int, ...]
    scheme: ConstraintScheme
    data_dof: int
    perceptual_parameters: int
    decisional_parameters: int
    scaling_parameters: int
    scheme_complete: bool
    identifiable_under_scheme: bool
    notes: str = ""

    @property
    def free_parameters(self) -> int:
        return self.perceptual_parameters + self.decisional_parameters + self.scaling_parameters

    @property
    def over_parameterized(self) -> bool:
        return self.free_parameters > self.data_dof

    def to_dict(self) -> dict[str, typ.Any]:
        return {
            "check": CHECK_LABEL,
            "model_class": self.model_class.value,
            "dimensions": list(self.dimensions),
            "scheme": self.scheme.to_dict(),
            "data_dof": self.data_dof,
            "free_parameters": self.free_parameters,
            "perceptual_parameters": self.perceptual_parameters,
            "decisional_parameters": self.decisional_parameters,
            "scaling_parameters": self.scaling_parameters,
            "over_parameterized": self.over_parameterized,
            "scheme_complete": self.scheme_complete,
            "identifiable_under_scheme": self.identifiable_under_scheme,
            "notes": self.notes,
        }

    def to_text(self) -> str:
        """Aligned two-column text rendering."""
        rows = [
            ("check", CHECK_LABEL),
            ("model class", self.model_class.value),
            ("dimensions", " x ".join(str(d) for d in self.dimensions)),
            ("data degrees of freedom", str(self.data_dof)),
            ("free parameters", str(self.free_parameters)),
            ("  perceptual", str(self.perceptual_parameters)),
            ("  decisional", str(self.decisional_parameters)),
            ("  scaling", str(self.scaling_parameters)),
            ("over-parameterized", str(self.over_parameterized).lower()),
            ("scheme complete", str(self.scheme_complete).lower()),
            ("identifiable under scheme", str(self.identifiable_under_scheme).lower()),
        ]
        width = max(len(name) for name, _ in rows)
        lines = [f"{name.ljust(width)}  {value}" for name, value in rows]
        if self.notes:
            lines.append(f"{'notes'.ljust(width)}  {self.notes}")
        return "\n".join(lines)


def default_scheme(model_class: ModelClass | str) -> ConstraintScheme:
    """
    The conventional constraint scheme for a model class.

    - 2x2: first mean at the origin, all marginal variances one, DS assumed.
    - concurrent ratings and n x m: first mean at the origin, unit variances
      in the first distribution, DS assumed.
    - GRTwIND: first mean at the origin, unit variances in the first
      distribution, bound slopes free (orthogonality not fixed).
    """
    model_class = ModelClass(model_class)
    if model_class is ModelClass.TwoByTwo:
        return ConstraintScheme(
            LocationFix.mean_at_origin(0), ScaleFix.unit_variances_all(), OrthogonalityFix.AssumeDS
        )
    if model_class is ModelClass.GrtWind:
        return ConstraintScheme(
            LocationFix.mean_at_origin(0), ScaleFix.unit_variances_one(0), OrthogonalityFix.None_
        )
    return ConstraintScheme(
        LocationFix.mean_at_origin(0), ScaleFix.unit_variances_one(0), OrthogonalityFix.AssumeDS
    )


def _levels(model_class: ModelClass, dimensions) -> tuple[int, ...]:
    if model_class is ModelClass.GrtWind:
        n_subjects = int(np.ravel(dimensions)[0]) if dimensions is not None else 1
        if n_subjects < 1:
            raise DomainError(f"GRTwIND needs at least one subject, got {n_subjects}")
        return (n_subjects,)
    if model_class is ModelClass.TwoByTwo:
        return (2, 2)
    n, m = (int(d) for d in dimensions)
    if n < 2 or m < 2:
        raise DomainError(f"each dimension needs at least two levels, got {n} x {m}")
    return n, m


def audit(
    model_class: ModelClass | str,
    dimensions: typ.Union[int, typ.Sequence[int], None] = None,
    scheme: typ.Optional[ConstraintScheme] = None,
) -> DofReport:
    """
    Count data degrees of freedom and free parameters.

    Args:
        model_class (ModelClass | str): The model class.
        dimensions: ``(n, m)`` response levels for concurrent ratings and
            n x m identification, the subject count N for GRTwIND, ignored for 2x2.
        scheme (ConstraintScheme | None): Constraint scheme; defaults to
            :func:`default_scheme`.

    Returns:
        DofReport: The counts and the identifiability verdict.

    Raises:
        DomainError: If n or m < 2, or N < 1.

    Examples:
        >>> report = audit("nxm", (3, 3))
        >>> report.data_dof, report.perceptual_parameters, report.decisional_parameters
        (72, 57, 4)
    """
    model_class = ModelClass(model_class)
    scheme = scheme or default_scheme(model_class)
    levels = _levels(model_class, dimensions)
    notes = []

    if model_class is ModelClass.GrtWind:
        n_subjects = levels[0]
        n_stimuli = 4
        data_dof = 12 * n_subjects
    elif model_class is ModelClass.TwoByTwo:
        n_stimuli = 4
        data_dof = 12
    elif model_class is ModelClass.ConcurrentRatings:
        n, m = levels
        n_stimuli = 4
        data_dof = 4 * (n * m - 1)
    else:
        n, m = levels
        n_stimuli = n * m
        data_dof = n * m * (n * m - 1)

    means = 2 * n_stimuli
    if scheme.location_fix.kind is LocationKind.MeanAtOrigin:
        means -= 2
    if scheme.orthogonality_fix is OrthogonalityFix.FixPerceptualMeans:
        means -= 2

    # n x m accounting carries five (co)variance terms per free distribution
    per_distribution = 5 if model_class is ModelClass.NxMIdentification else 3
    if scheme.scale_fix.kind is ScaleKind.UnitVariancesAll:
        covariances = n_stimuli
    elif scheme.scale_fix.kind is ScaleKind.UnitVariancesOneDistribution:
        covariances = 1 + (n_stimuli - 1) * per_distribution
    else:
        covariances = n_stimuli * per_distribution
    if model_class is ModelClass.NxMIdentification:
        notes.append(
            "covariances counted at five terms per free distribution, the conventional "
            "n x m accounting; a bivariate covariance has three free elements"
        )

    if model_class is ModelClass.GrtWind:
        intercepts = 2 * n_subjects
        slopes = 2 * n_subjects
        scaling = 2 * n_subjects
    else:
        n_levels, m_levels = levels
        intercepts = (n_levels - 1) + (m_levels - 1)
        slopes = 2
        scaling = 0
    if scheme.location_fix.kind is LocationKind.BoundIntersectionAtOrigin:
        intercepts -= 2
    decisional = intercepts + (0 if scheme.orthogonality_fix is OrthogonalityFix.AssumeDS else slopes)

    free = means + covariances + decisional + scaling
    counts_ok = free <= data_dof
    complete = scheme.is_complete
    identifiable = counts_ok and complete
    if not counts_ok:
        notes.append(f"over-parameterized: {free} free parameters for {data_dof} degrees of freedom")
    if not complete:
        notes.append("constraint scheme leaves " + ", ".join(scheme.missing()) + " unfixed")
    if model_class is ModelClass.GrtWind and levels[0] < 3:
        identifiable = False
        notes.append("GRTwIND is over-parameterized with data from fewer than three subjects")
    notes.append(CHECK_LABEL + ": balanced counts do not guarantee identifiability")

    return DofReport(
        model_class=model_class,
        dimensions=levels,
        scheme=scheme,
        data_dof=data_dof,
        perceptual_parameters=means + covariances,
        decisional_parameters=decisional,
        scaling_parameters=scaling,
        scheme_complete=complete,
        identifiable_under_scheme=identifiable,
        notes="; ".join(notes),
    )


def audit_two_by_two_conventions(
    location_fix: typ.Optional[LocationFix] = None,
    orthogonality_fix: OrthogonalityFix = OrthogonalityFix.AssumeDS,
) -> dict[str, DofReport]:
    """
    Audit the 2x2 class under both variance-fixing conventions.

    Returns:
        dict[str, DofReport]: Reports keyed by the scale-fix kind name, unit
            variances in every distribution and in one distribution only.
    """
    location_fix = location_fix or LocationFix.mean_at_origin(0)
    return {
        kind.value: audit(
            ModelClass.TwoByTwo,
            scheme=ConstraintScheme(location_fix, ScaleFix(kind, 0), orthogonality_fix),
        )
        for kind in (ScaleKind.UnitVariancesAll, ScaleKind.UnitVariancesOneDistribution)
    }


@dataclasses.dataclass(frozen=True)
class Twin:
    """
    One equivalence twin.

    Attributes:
        name (str): "induce_ds" or "normalize".
        model (TwoByTwoModel | MultiBoundModel): The twin.
        transforms (tuple[AffineTransform, ...]): Transforms producing it.
        discrepancy (float): Max-abs difference of the response probabilities.
        subject (int | None): Subject index for GRTwIND twins.
    """

    name: str
    model: SingleSubjectModel
    transforms: tuple[AffineTransform, ...]
    discrepancy: float
    subject: typ.Optional[int] = None

    @property
    def is_identity(self) -> bool:
        return all(t.is_identity for t in self.transforms)


@dataclasses.dataclass(frozen=True)
class EquivalenceCertificate:
    """
    Equivalence twins of a model and how closely they reproduce its probabilities.

    Attributes:
        model_class (ModelClass): Class of the certified model.
        twins (tuple[Twin, ...]): Every twin produced.
        universal_perception_violated (bool | None): For GRTwIND, whether the
            DS twins break universal perception; None otherwise.
        tolerance (float): The discrepancy bound.
    """

    model_class: ModelClass
    twins: tuple[Twin, ...]
    universal_perception_violated: typ.Optional[bool] = None
    tolerance: float = EQUIVALENCE_TOL

    @property
    def max_discrepancy(self) -> float:
        return max((twin.discrepancy for twin in self.twins), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_discrepancy < self.tolerance


def _discrepancy(reference: np.ndarray, twin: SingleSubjectModel) -> float:
    return float(np.max(np.abs(reference - response_probabilities(twin))))


def equivalence_certificate(model: SingleSubjectModel | GrtWindModel) -> EquivalenceCertificate:
    """
    Build the equivalence twins of a model and measure their discrepancies.

    The reference probabilities of the original model are integrated in
    bound coordinates (:func:`bound_coordinate_probabilities`), independently
    of the transforms that produce the twins.

    - 2x2 and multi-bound: the induce_ds twin. For a 2x2 model also the
      mean-variance normalized twin (of the DS twin when DS fails).
    - GRTwIND: one DS twin per subject, and whether the collection of twins
      violates universal perception.
    """
    if isinstance(model, GrtWindModel):
        images, transforms = subject_specific_induce_ds(model)
        twins = tuple(
            Twin(
                "induce_ds",
                image,
                (transform,),
                _discrepancy(bound_coordinate_probabilities(subject_model(model, index)), image),
                subject=index,
            )
            for index, (image, transform) in enumerate(zip(images, transforms))
        )
        return EquivalenceCertificate(
            ModelClass.GrtWind, twins, universal_perception_violated(images)
        )

    reference = bound_coordinate_probabilities(model)
    image, transform = induce_ds(model)
    twins = [Twin("induce_ds", image, (transform,), _discrepancy(reference, image))]
    if isinstance(model, TwoByTwoModel):
        normalized, per_distribution = normalize_model(image)
        twins.append(
            Twin(
                "normalize",
                normalized,
                (transform, *per_distribution),
                _discrepancy(reference, normalized),
            )
        )
    return EquivalenceCertificate(model.model_class, tuple(twins))
