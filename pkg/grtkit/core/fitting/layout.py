"""
Unconstrained parameterization of GRT models for the simplex fitter.

A ParameterLayout lists every scalar of a model class as a named slot. A slot
is either free (read from the optimizer's vector through a link function),
fixed to an exact value by the constraint scheme, or tied to an earlier slot.
Links: identity for means, first intercepts and slopes; log for variances,
kappa and the gaps between successive intercepts; ``rho = 2 * expit(z) - 1``
for correlations; logistic for lambda.

Example:
    >>> from grtkit.core.identifiability import default_scheme
    >>> layout = ParameterLayout.for_class(ModelClass.TwoByTwo, default_scheme("2x2"))
    >>> layout.n_free
    12
"""

from __future__ import annotations

import dataclasses
import enum
import math
import typing as typ

import numpy as np
from scipy.special import expit, logit

from grtkit.core.bounds import BoundOrientation, LinearBound
from grtkit.core.constraints import (
    ConstraintScheme,
    LocationKind,
    OrthogonalityFix,
)
from grtkit.core.distribution import PerceptualDistribution
from grtkit.core.grtwind import LAMBDA_MAX, LAMBDA_MIN, GrtWindModel, SubjectParams
from grtkit.core.model import ModelClass, MultiBoundKind, MultiBoundModel, TwoByTwoModel

AnyModel = typ.Union[TwoByTwoModel, MultiBoundModel, GrtWindModel]


class Link(enum.Enum):
    Identity = "identity"
    Log = "log"
    Correlation = "correlation"
    Lambda = "lambda"

    def forward(self, z: float) -> float:
        if self is Link.Identity:
            return float(z)
        if self is Link.Log:
            return math.exp(z)
        if self is Link.Correlation:
            return float(2.0 * expit(z) - 1.0)
        return float(np.clip(LAMBDA_MIN + (LAMBDA_MAX - LAMBDA_MIN) * expit(z), LAMBDA_MIN, LAMBDA_MAX))

    def inverse(self, value: float) -> float:
        if self is Link.Identity:
            return float(value)
        if self is Link.Log:
            return math.log(value)
        if self is Link.Correlation:
            return float(logit((value + 1.0) / 2.0))
        return float(logit((value - LAMBDA_MIN) / (LAMBDA_MAX - LAMBDA_MIN)))


@dataclasses.dataclass(frozen=True)
class Slot:
    """
    One model scalar.

    Attributes:
        name (str): Slot name, e.g. ``mu_x[2]`` or ``kappa[0]``.
        link (Link): Map from the unconstrained coordinate.
        fixed (float | None): Exact value when fixed by the scheme.
        tied_to (str | None): Name of an earlier slot this one copies.
    """

    name: str
    link: Link = Link.Identity
    fixed: typ.Optional[float] = None
    tied_to: typ.Optional[str] = None

    @property
    def is_free(self) -> bool:
        return self.fixed is None and self.tied_to is None


@dataclasses.dataclass(frozen=True)
class ParameterLayout:
    """
    The slots of one model class under one constraint scheme.

    Attributes:
        model_class (ModelClass): The class being fitted.
        scheme (ConstraintScheme): The constraint scheme.
        stimulus_levels (tuple[int, int]): Grid of perceptual distributions.
        response_levels (tuple[int, int]): Response levels (n, m).
        n_subjects (int): Number of subjects (GRTwIND only, else 1).
        slots (tuple[Slot, ...]): Every scalar, in assembly order.
    """

    model_class: ModelClass
    scheme: ConstraintScheme
    stimulus_levels: tuple[int, int]
    response_levels: tuple[int, int]
    n_subjects: int
    slots: tuple[Slot, ...]

    @property
    def free_slots(self) -> tuple[Slot, ...]:
        return tuple(slot for slot in self.slots if slot.is_free)

    @property
    def n_free(self) -> int:
        return len(self.free_slots)

    @classmethod
    def for_class(
        cls,
        model_class: ModelClass | str,
        scheme: ConstraintScheme,
        response_levels: tuple[int, int] = (2, 2),
        n_subjects: int = 1,
    ) -> ParameterLayout:
        """
        Build the layout of a model class.

        Args:
            model_class (ModelClass | str): The class.
            scheme (ConstraintScheme): Fixes to apply.
            response_levels (tuple[int, int]): (n, m) response levels; for
                n x m identification also the stimulus grid.
            n_subjects (int): GRTwIND subject count.
        """
        model_class = ModelClass(model_class)
        if model_class is ModelClass.NxMIdentification:
            stimulus_levels = tuple(response_levels)
        else:
            stimulus_levels = (2, 2)
            if model_class is not ModelClass.ConcurrentRatings:
                response_levels = (2, 2)
        if model_class is not ModelClass.GrtWind:
            n_subjects = 1
        n_s, m_s = stimulus_levels
        n_stimuli = n_s * m_s

        fixed: dict[str, float] = {}
        if scheme.location_fix.kind is LocationKind.MeanAtOrigin:
            stim = scheme.location_fix.stimulus
            fixed[f"mu_x[{stim}]"] = 0.0
            fixed[f"mu_y[{stim}]"] = 0.0
        if scheme.location_fix.kind is LocationKind.BoundIntersectionAtOrigin:
            fixed["cx[0]"] = 0.0
            fixed["cy[0]"] = 0.0
        for stim in range(n_stimuli):
            if scheme.scale_fix.fixes_variances_of(stim):
                fixed[f"var_x[{stim}]"] = 1.0
                fixed[f"var_y[{stim}]"] = 1.0
        slopes_fixed = scheme.orthogonality_fix is OrthogonalityFix.AssumeDS
        if slopes_fixed:
            for k in range(n_subjects):
                fixed[_subject_name("slope_x", k, model_class)] = 0.0
                fixed[_subject_name("slope_y", k, model_class)] = 0.0

        ties: dict[str, str] = {}
        if scheme.orthogonality_fix is OrthogonalityFix.FixPerceptualMeans:
            for source, target in (("mu_x[0]", "mu_x[1]"), ("mu_y[0]", f"mu_y[{m_s}]")):
                if target in fixed:
                    fixed[source] = fixed[target]
                elif source in fixed:
                    fixed[target] = fixed[source]
                else:
                    ties[target] = source

        def slot(name: str, link: Link = Link.Identity) -> Slot:
            return Slot(name, link, fixed.get(name), ties.get(name))

        slots = []
        for stim in range(n_stimuli):
            slots += [
                slot(f"mu_x[{stim}]"),
                slot(f"mu_y[{stim}]"),
                slot(f"var_x[{stim}]", Link.Log),
                slot(f"var_y[{stim}]", Link.Log),
                slot(f"rho[{stim}]", Link.Correlation),
            ]
        if model_class is ModelClass.GrtWind:
            for k in range(n_subjects):
                slots += [
                    slot(f"kappa[{k}]", Link.Log),
                    slot(f"lambda[{k}]", Link.Lambda),
                    slot(f"cx[{k}]"),
                    slot(f"cy[{k}]"),
                    slot(_subject_name("slope_x", k, model_class)),
                    slot(_subject_name("slope_y", k, model_class)),
                ]
        else:
            n, m = response_levels
            slots.append(slot("cx[0]"))
            slots += [slot(f"cx_gap[{i}]", Link.Log) for i in range(1, n - 1)]
            slots.append(slot("cy[0]"))
            slots += [slot(f"cy_gap[{j}]", Link.Log) for j in range(1, m - 1)]
            slots += [slot("slope_x"), slot("slope_y")]
        return cls(
            model_class, scheme, stimulus_levels, tuple(response_levels), n_subjects, tuple(slots)
        )

    def values(self, theta: typ.Sequence[float]) -> dict[str, float]:
        """Decode an unconstrained vector into named model scalars."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_free,):
            raise ValueError(f"expected {self.n_free} free parameters, got {theta.shape}")
        values: dict[str, float] = {}
        position = 0
        for slot in self.slots:
            if slot.fixed is not None:
                values[slot.name] = slot.fixed
            elif slot.tied_to is not None:
                values[slot.name] = values[slot.tied_to]
            else:
                values[slot.name] = slot.link.forward(theta[position])
                position += 1
        return values

    def build(self, theta: typ.Sequence[float]) -> AnyModel:
        """
        Assemble a model from an unconstrained vector.

        Raises:
            InvalidModelError: If the decoded parameters violate a model invariant.
        """
        return self.model_from_values(self.values(theta))

    def model_from_values(self, values: dict[str, float]) -> AnyModel:
        n_s, m_s = self.stimulus_levels
        grid = [
            [_distribution(values, i * m_s + j) for j in range(m_s)] for i in range(n_s)
        ]
        if self.model_class is ModelClass.GrtWind:
            subjects = [
                SubjectParams(
                    values[f"kappa[{k}]"],
                    values[f"lambda[{k}]"],
                    LinearBound(
                        BoundOrientation.XBound,
                        values[f"cx[{k}]"],
                        values[_subject_name("slope_x", k, self.model_class)],
                    ),
                    LinearBound(
                        BoundOrientation.YBound,
                        values[f"cy[{k}]"],
                        values[_subject_name("slope_y", k, self.model_class)],
                    ),
                )
                for k in range(self.n_subjects)
            ]
            return GrtWindModel(grid, subjects, self.scheme)

        n, m = self.response_levels
        bounds_x = _family(values, "cx", n - 1, BoundOrientation.XBound, values["slope_x"])
        bounds_y = _family(values, "cy", m - 1, BoundOrientation.YBound, values["slope_y"])
        if self.model_class is ModelClass.TwoByTwo:
            return TwoByTwoModel(grid, bounds_x[0], bounds_y[0], self.scheme)
        kind = (
            MultiBoundKind.ConcurrentRatings
            if self.model_class is ModelClass.ConcurrentRatings
            else MultiBoundKind.NxMIdentification
        )
        return MultiBoundModel(kind, grid, bounds_x, bounds_y, self.scheme)

    def model_values(self, model: AnyModel) -> dict[str, float]:
        """Named scalars of an existing model (the inverse of :meth:`model_from_values`)."""
        values: dict[str, float] = {}
        for stim, dist in enumerate(model.flat_distributions):
            values[f"mu_x[{stim}]"], values[f"mu_y[{stim}]"] = dist.mean
            values[f"var_x[{stim}]"] = dist.covariance[0]
            values[f"var_y[{stim}]"] = dist.covariance[2]
            values[f"rho[{stim}]"] = dist.correlation
        if isinstance(model, GrtWindModel):
            for k, subject in enumerate(model.subjects):
                values[f"kappa[{k}]"] = subject.kappa
                values[f"lambda[{k}]"] = subject.lam
                values[f"cx[{k}]"] = subject.bound_x.intercept
                values[f"cy[{k}]"] = subject.bound_y.intercept
                values[_subject_name("slope_x", k, ModelClass.GrtWind)] = subject.bound_x.slope
                values[_subject_name("slope_y", k, ModelClass.GrtWind)] = subject.bound_y.slope
            return values
        for prefix, bounds in (("cx", model.bounds_x), ("cy", model.bounds_y)):
            values[f"{prefix}[0]"] = bounds[0].intercept
            for i in range(1, len(bounds)):
                values[f"{prefix}_gap[{i}]"] = bounds[i].intercept - bounds[i - 1].intercept
        values["slope_x"] = model.bounds_x[0].slope
        values["slope_y"] = model.bounds_y[0].slope
        return values

    def encode(self, model: AnyModel) -> np.ndarray:
        """Unconstrained vector of a model's free slots; fixed and tied slots are ignored."""
        values = self.model_values(model)
        return np.array([slot.link.inverse(values[slot.name]) for slot in self.free_slots])

    def encode_values(self, values: dict[str, float]) -> np.ndarray:
        return np.array([slot.link.inverse(values[slot.name]) for slot in self.free_slots])


def _subject_name(prefix: str, k: int, model_class: ModelClass) -> str:
    return f"{prefix}[{k}]" if model_class is ModelClass.GrtWind else prefix


def _distribution(values: dict[str, float], stim: int) -> PerceptualDistribution:
    sx = math.sqrt(values[f"var_x[{stim}]"])
    sy = math.sqrt(values[f"var_y[{stim}]"])
    rho = values[f"rho[{stim}]"]
    return PerceptualDistribution(
        (values[f"mu_x[{stim}]"], values[f"mu_y[{stim}]"]),
        (values[f"var_x[{stim}]"], rho * sx * sy, values[f"var_y[{stim}]"]),
    )


def _family(
    values: dict[str, float], prefix: str, count: int, orientation: BoundOrientation, slope: float
) -> list[LinearBound]:
    intercepts = [values[f"{prefix}[0]"]]
    for i in range(1, count):
        intercepts.append(intercepts[-1] + values[f"{prefix}_gap[{i}]"])
    return [LinearBound(orientation, c, slope) for c in intercepts]
