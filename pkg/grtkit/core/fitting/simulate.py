"""Seeded simulation of confusion matrices from any model."""

from __future__ import annotations

import logging
import typing as typ

import numpy as np

from grtkit.core.confusion import ConfusionMatrix
from grtkit.core.grtwind import GrtWindModel, subject_model
from grtkit.core.model import SingleSubjectModel
from grtkit.core.probability import response_probabilities
from grtkit.exceptions import DomainError

logger = logging.getLogger(__name__)


def sample_counts(
    probabilities: np.ndarray, trials_per_stimulus: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw one multinomial row per stimulus, renormalizing each row first."""
    rows = []
    for p in np.asarray(probabilities, dtype=float):
        rows.append(rng.multinomial(trials_per_stimulus, p / p.sum()))
    return np.array(rows, dtype=np.int64)


def simulate(
    model: SingleSubjectModel | GrtWindModel,
    trials_per_stimulus: int,
    seed: typ.Optional[int] = 0,
) -> ConfusionMatrix | list[ConfusionMatrix]:
    """
    Simulate confusion data from a model.

    Args:
        model: A 2x2, multi-bound or GRTwIND model.
        trials_per_stimulus (int): Presentations of each stimulus (per subject).
        seed (int | None): Seed of ``numpy.random.default_rng``; equal seeds give
            equal matrices.

    Returns:
        ConfusionMatrix | list[ConfusionMatrix]: One matrix, or one per subject for GRTwIND.

    Raises:
        DomainError: If trials_per_stimulus is not a positive integer.

    Examples:
        >>> from grtkit.core.model import TwoByTwoModel
        >>> a = simulate(TwoByTwoModel.symmetric(), 100, seed=7)
        >>> b = simulate(TwoByTwoModel.symmetric(), 100, seed=7)
        >>> a == b, a.row_totals.tolist()
        (True, [100, 100, 100, 100])
    """
    if int(trials_per_stimulus) != trials_per_stimulus or trials_per_stimulus < 1:
        raise DomainError(f"trials per stimulus must be a positive integer, got {trials_per_stimulus}")
    trials_per_stimulus = int(trials_per_stimulus)
    rng = np.random.default_rng(seed)
    if isinstance(model, GrtWindModel):
        logger.debug("simulating %d subjects, %d trials per stimulus", model.n_subjects, trials_per_stimulus)
        return [
            _simulate_one(subject_model(model, k), trials_per_stimulus, rng)
            for k in range(model.n_subjects)
        ]
    logger.debug("simulating %s model, %d trials per stimulus", model.model_class.value, trials_per_stimulus)
    return _simulate_one(model, trials_per_stimulus, rng)


def _simulate_one(
    model: SingleSubjectModel, trials_per_stimulus: int, rng: np.random.Generator
) -> ConfusionMatrix:
    counts = sample_counts(response_probabilities(model), trials_per_stimulus, rng)
    return ConfusionMatrix(counts, model.stimulus_labels, model.response_labels)
