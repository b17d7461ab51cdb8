from grtkit.core.bounds import BoundOrientation, LinearBound
from grtkit.core.confusion import ConfusionMatrix
from grtkit.core.constraints import (
    ConstraintScheme,
    LocationFix,
    OrthogonalityFix,
    ScaleFix,
)
from grtkit.core.distribution import PerceptualDistribution
from grtkit.core.grtwind import GrtWindModel, SubjectParams
from grtkit.core.model import ModelClass, MultiBoundKind, MultiBoundModel, TwoByTwoModel

__all__ = [
    "BoundOrientation",
    "ConfusionMatrix",
    "ConstraintScheme",
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
]
