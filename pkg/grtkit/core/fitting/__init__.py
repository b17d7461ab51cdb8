from grtkit.core.fitting.fitter import FitOptions, FitResult, fit
from grtkit.core.fitting.layout import ParameterLayout
from grtkit.core.fitting.likelihood import (
    TwinCheckReport,
    likelihood_twin_check,
    log_likelihood,
)
from grtkit.core.fitting.simulate import simulate

__all__ = [
    "FitOptions",
    "FitResult",
    "ParameterLayout",
    "TwinCheckReport",
    "fit",
    "likelihood_twin_check",
    "log_likelihood",
    "simulate",
]
