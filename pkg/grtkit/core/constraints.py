"""
Constraint schemes fixing location, scale and dimensional orthogonality.

A Gaussian GRT model is only identifiable once three things are pinned down:
where the model sits in the plane, how large its unit is, and which pair of
directions counts as "orthogonal". Each ConstraintScheme field fixes one of
these, and the fitter refuses schemes that leave any of them open.

Example:
    >>> scheme = ConstraintScheme(
    ...     LocationFix.mean_at_origin(0),
    ...     ScaleFix.unit_variances_all(),
    ...     OrthogonalityFix.AssumeDS,
    ... )
    >>> scheme.is_complete
    True
    >>> ConstraintScheme().is_complete
    False
"""

from __future__ import annotations

import dataclasses
import enum
import typing as typ


class LocationKind(enum.Enum):
    MeanAtOrigin = "MeanAtOrigin"
    BoundIntersectionAtOrigin = "BoundIntersectionAtOrigin"
    None_ = "None"


class ScaleKind(enum.Enum):
    UnitVariancesOneDistribution = "UnitVariancesOneDistribution"
    UnitVariancesAll = "UnitVariancesAll"
    None_ = "None"


class OrthogonalityFix(enum.Enum):
    """
    How the orthogonality of the perceptual dimensions is fixed.

    Attributes:
        AssumeDS: All bound slopes are fixed at zero.
        FixPerceptualMeans: mu_x(A1B1) = mu_x(A1B2) and mu_y(A1B1) = mu_y(A2B1);
            bound slopes are free.
        None_: Nothing fixes orthogonality.
    """

    AssumeDS = "AssumeDS"
    FixPerceptualMeans = "FixPerceptualMeans"
    None_ = "None"


@dataclasses.dataclass(frozen=True)
class LocationFix:
    """
    How the location of the model is fixed.

    Attributes:
        kind (LocationKind): Which location constraint applies.
        stimulus (int): Row-major stimulus index whose mean sits at the origin
            (MeanAtOrigin only).
    """

    kind: LocationKind = LocationKind.None_
    stimulus: int = 0

    @classmethod
    def mean_at_origin(cls, stimulus: int = 0) -> LocationFix:
        return cls(LocationKind.MeanAtOrigin, stimulus)

    @classmethod
    def bound_intersection_at_origin(cls) -> LocationFix:
        return cls(LocationKind.BoundIntersectionAtOrigin)

    @classmethod
    def none(cls) -> LocationFix:
        return cls(LocationKind.None_)

    @property
    def is_set(self) -> bool:
        return self.kind is not LocationKind.None_


@dataclasses.dataclass(frozen=True)
class ScaleFix:
    """
    How the scale of the model is fixed.

    Attributes:
        kind (ScaleKind): Which scale constraint applies.
        stimulus (int): Row-major stimulus index with unit marginal variances
            (UnitVariancesOneDistribution only).
    """

    kind: ScaleKind = ScaleKind.None_
    stimulus: int = 0

    @classmethod
    def unit_variances_one(cls, stimulus: int = 0) -> ScaleFix:
        return cls(ScaleKind.UnitVariancesOneDistribution, stimulus)

    @classmethod
    def unit_variances_all(cls) -> ScaleFix:
        return cls(ScaleKind.UnitVariancesAll)

    @classmethod
    def none(cls) -> ScaleFix:
        return cls(ScaleKind.None_)

    @property
    def is_set(self) -> bool:
        return self.kind is not ScaleKind.None_

    def fixes_variances_of(self, stimulus: int) -> bool:
        """True if the marginal variances of ``stimulus`` are fixed at one."""
        if self.kind is ScaleKind.UnitVariancesAll:
            return True
        return self.kind is ScaleKind.UnitVariancesOneDistribution and self.stimulus == stimulus


@dataclasses.dataclass(frozen=True)
class ConstraintScheme:
    """
    Location, scale and orthogonality fixes for one model.

    Attributes:
        location_fix (LocationFix): Location constraint.
        scale_fix (ScaleFix): Scale constraint.
        orthogonality_fix (OrthogonalityFix): Orthogonality constraint.
    """

    location_fix: LocationFix = dataclasses.field(default_factory=LocationFix.none)
    scale_fix: ScaleFix = dataclasses.field(default_factory=ScaleFix.none)
    orthogonality_fix: OrthogonalityFix = OrthogonalityFix.None_

    @property
    def is_complete(self) -> bool:
        """bool: True iff none of the three fixes is None."""
        return (
            self.location_fix.is_set
            and self.scale_fix.is_set
            and self.orthogonality_fix is not OrthogonalityFix.None_
        )

    def missing(self) -> list[str]:
        """Names of the fixes that are not set."""
        names = []
        if not self.location_fix.is_set:
            names.append("location")
        if not self.scale_fix.is_set:
            names.append("scale")
        if self.orthogonality_fix is OrthogonalityFix.None_:
            names.append("orthogonality")
        return names

    def to_dict(self) -> dict[str, typ.Any]:
        return {
            "location_fix": {
                "kind": self.location_fix.kind.value,
                "stimulus": self.location_fix.stimulus,
            },
            "scale_fix": {
                "kind": self.scale_fix.kind.value,
                "stimulus": self.scale_fix.stimulus,
            },
            "orthogonality_fix": self.orthogonality_fix.value,
        }

    @classmethod
    def from_dict(cls, data: dict[str, typ.Any]) -> ConstraintScheme:
        location = data.get("location_fix", {}) or {}
        scale = data.get("scale_fix", {}) or {}
        return cls(
            LocationFix(
                LocationKind(location.get("kind", "None")), int(location.get("stimulus", 0))
            ),
            ScaleFix(ScaleKind(scale.get("kind", "None")), int(scale.get("stimulus", 0))),
            OrthogonalityFix(data.get("orthogonality_fix", "None")),
        )
