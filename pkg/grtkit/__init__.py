"""Gaussian General Recognition Theory: simulation, fitting and model equivalence."""

from grtkit.core import *  # noqa
from grtkit.core.fitting import FitOptions, FitResult, fit, simulate
from grtkit.core.identifiability import audit, equivalence_certificate
from grtkit.core.transforms import induce_ds, normalize_model

__all__ = [
    "BoundOrientation",
    "ConfusionMatrix",
    "ConstraintScheme",
    "FitOptions",
    "FitResult",
    "GrtWindModel",
    "LinearBound",
    "LocationFix",
    "ModelClass",
    "MultiBoundKind",
    "MultiBoundModel",
    "OrthogonalityFix",
    "PerceptualDistribution",
    "ScaleFix",
    "SubjectParams",
    "TwoByTwoModel",
    "audit",
    "equivalence_certificate",
    "fit",
    "induce_ds",
    "normalize_model",
    "simulate",
]
