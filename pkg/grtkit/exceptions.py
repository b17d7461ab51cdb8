"""
Exceptions raised by grtkit.

Every error raised deliberately by the library derives from GrtKitError, so
callers (and the command-line front end) can separate domain failures from
programming errors with a single ``except`` clause.
"""

from __future__ import annotations

import typing as typ

if typ.TYPE_CHECKING:
    from grtkit.core.identifiability import DofReport


class GrtKitError(Exception):
    """Base class for all grtkit errors."""

    pass


class InvalidModelError(GrtKitError, ValueError):
    """Exception raised when a model or one of its parts violates a construction invariant."""

    pass


class InvalidCovarianceError(InvalidModelError):
    """Exception raised for a covariance matrix that is not symmetric positive definite."""

    pass


class DegenerateBoundsError(InvalidModelError):
    """Exception raised when the x- and y-bound families are parallel (omega = 0 mod pi)."""

    pass


class UnsupportedModelError(InvalidModelError):
    """Exception raised for non-parallel bounds on the same dimension."""

    pass


class PreconditionError(GrtKitError):
    """Exception raised when a transform is applied to a model outside its domain."""

    pass


class DomainError(GrtKitError, ValueError):
    """Exception raised for numeric arguments outside their mathematical domain."""

    pass


class DataShapeError(GrtKitError, ValueError):
    """Exception raised when confusion-matrix data does not match a model class."""

    pass


class OptimizationError(GrtKitError):
    """Exception raised when no restart of the fitter produces a finite likelihood."""

    pass


class SchemaError(GrtKitError):
    """Exception raised for malformed JSON model specs or CSV confusion matrices."""

    pass


class IdentifiabilityError(GrtKitError):
    """Exception raised when a fit is requested for a model that fails the identifiability gate.

    Attributes:
        report (DofReport): The degrees-of-freedom report that failed the gate.
    """

    def __init__(self, message: str, report: "DofReport"):
        super().__init__(message)
        self.report = report
