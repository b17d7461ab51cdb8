"""
Multinomial log-likelihood of confusion data, and the likelihood twin check.

The likelihood of a model is

.. math::
    \\ln L = \\sum_s \\sum_r n_{sr} \\ln p_{sr},

with predicted probabilities from :mod:`grtkit.core.probability` floored at
PROBABILITY_FLOOR so that an empty predicted cell never gives ``-inf``.
"""

from __future__ import annotations

import dataclasses
import typing as typ

import numpy as np

from grtkit.core.confusion import ConfusionMatrix
from grtkit.core.grtwind import GrtWindModel, subject_model, subject_specific_induce_ds
from grtkit.core.model import SingleSubjectModel, TwoByTwoModel
from grtkit.core.probability import grtwind_response_probabilities, response_probabilities
from grtkit.core.transforms import induce_ds, normalize_model
from grtkit.core.utils import LIKELIHOOD_TWIN_TOL, PROBABILITY_FLOOR
from grtkit.exceptions import DataShapeError

AnyData = typ.Union[ConfusionMatrix, typ.Sequence[ConfusionMatrix]]


def check_shape(model: SingleSubjectModel, data: ConfusionMatrix) -> None:
    """
    Raise DataShapeError unless the data has one row per stimulus and one column per response.
    """
    expected = (model.n_stimuli, model.n_responses)
    if data.shape != expected:
        raise DataShapeError(
            f"{model.model_class.value} model with {expected[0]} stimuli and {expected[1]} "
            f"responses cannot explain a {data.shape[0]}x{data.shape[1]} confusion matrix"
        )


def multinomial_log_likelihood(probabilities: np.ndarray, counts: np.ndarray) -> float:
    """
    Sum of ``count * ln(p)`` with p floored at PROBABILITY_FLOOR; zero counts contribute nothing.

    Examples:
        >>> round(multinomial_log_likelihood(np.full((1, 4), 0.25), np.array([[1, 1, 0, 2]])), 6)
        -5.545177
    """
    p = np.maximum(np.asarray(probabilities, dtype=float), PROBABILITY_FLOOR)
    counts = np.asarray(counts)
    mask = counts > 0
    return float(np.sum(counts[mask] * np.log(p[mask])))


def log_likelihood(model: SingleSubjectModel | GrtWindModel, data: AnyData) -> float:
    """
    Log-likelihood of confusion data under a model.

    Args:
        model: A 2x2, multi-bound or GRTwIND model.
        data: One confusion matrix, or for GRTwIND one matrix per subject.

    Returns:
        float: The log-likelihood (never positive).

    Raises:
        DataShapeError: If the data does not match the model class.
    """
    if isinstance(model, GrtWindModel):
        total = 0.0
        for k, matrix in enumerate(_subject_data(model, data)):
            if matrix.shape != (4, 4):
                raise DataShapeError(f"subject {k + 1}: GRTwIND data must be 4x4, got {matrix.shape}")
            total += multinomial_log_likelihood(grtwind_response_probabilities(model, k), matrix.counts)
        return total
    if not isinstance(data, ConfusionMatrix):
        raise DataShapeError("a single-subject model needs exactly one confusion matrix")
    check_shape(model, data)
    return multinomial_log_likelihood(response_probabilities(model), data.counts)


def _subject_data(model: GrtWindModel, data: AnyData) -> list[ConfusionMatrix]:
    matrices = [data] if isinstance(data, ConfusionMatrix) else list(data)
    if len(matrices) != model.n_subjects:
        raise DataShapeError(
            f"GRTwIND model has {model.n_subjects} subjects but {len(matrices)} confusion matrices were given"
        )
    return matrices


@dataclasses.dataclass(frozen=True)
class TwinLikelihood:
    """
    Log-likelihoods of one model and one of its equivalence twins.

    Attributes:
        name (str): Twin name ("induce_ds" or "normalize").
        original (float): Log-likelihood of the original model.
        twin (float): Log-likelihood of the twin.
        subject (int | None): Subject index for GRTwIND.
    """

    name: str
    original: float
    twin: float
    subject: typ.Optional[int] = None

    @property
    def delta(self) -> float:
        return self.twin - self.original


@dataclasses.dataclass(frozen=True)
class TwinCheckReport:
    """
    Likelihood differences between a model and its equivalence twins on one dataset.

    Attributes:
        entries (tuple[TwinLikelihood, ...]): One entry per twin (per subject for GRTwIND).
        tolerance (float): Bound on every absolute difference.
    """

    entries: tuple[TwinLikelihood, ...]
    tolerance: float = LIKELIHOOD_TWIN_TOL

    @property
    def total_delta(self) -> float:
        """float: Sum of the differences over entries sharing the first twin name."""
        if not self.entries:
            return 0.0
        name = self.entries[0].name
        return float(sum(entry.delta for entry in self.entries if entry.name == name))

    @property
    def max_abs_delta(self) -> float:
        return max((abs(entry.delta) for entry in self.entries), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_abs_delta < self.tolerance and abs(self.total_delta) < self.tolerance

    def to_dict(self) -> dict[str, typ.Any]:
        return {
            "entries": [
                {
                    "name": entry.name,
                    "subject": entry.subject,
                    "original": entry.original,
                    "twin": entry.twin,
                    "delta": entry.delta,
                }
                for entry in self.entries
            ],
            "total_delta": self.total_delta,
            "max_abs_delta": self.max_abs_delta,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def likelihood_twin_check(data: AnyData, model: SingleSubjectModel | GrtWindModel) -> TwinCheckReport:
    """
    Compare the log-likelihood of a model with those of its equivalence twins.

    Twins come from :func:`induce_ds` (and, for 2x2 models, the mean-variance
    normalization of the DS image); for GRTwIND each subject is compared with
    its own DS twin. Since the twins predict the same probabilities, every
    difference is zero up to rounding, so no dataset can tell them apart.
    """
    if isinstance(model, GrtWindModel):
        matrices = _subject_data(model, data)
        images, _ = subject_specific_induce_ds(model)
        entries = tuple(
            TwinLikelihood(
                "induce_ds",
                log_likelihood(subject_model(model, k), matrix),
                log_likelihood(image, matrix),
                subject=k,
            )
            for k, (image, matrix) in enumerate(zip(images, matrices))
        )
        return TwinCheckReport(entries)

    original = log_likelihood(model, data)
    image, _ = induce_ds(model)
    entries = [TwinLikelihood("induce_ds", original, log_likelihood(image, data))]
    if isinstance(model, TwoByTwoModel):
        normalized, _ = normalize_model(image)
        entries.append(TwinLikelihood("normalize", original, log_likelihood(normalized, data)))
    return TwinCheckReport(tuple(entries))
