"""
Confusion matrices: the observable data GRT models are fit to.

A ConfusionMatrix holds integer counts of each response (columns) given each
stimulus (rows). The CSV format is a header row of response labels, then one
row per stimulus whose first cell is the stimulus label:

.. code::

    stimulus,a1b1,a1b2,a2b1,a2b2
    A1B1,70,12,14,4
    ...

Example:
    >>> cm = ConfusionMatrix.from_counts([[3, 1], [0, 4]])
    >>> cm.total_trials
    8
    >>> cm.proportions().tolist()
    [[0.75, 0.25], [0.0, 1.0]]
"""

from __future__ import annotations

import dataclasses
import io
import pathlib
import typing as typ

import numpy as np
import pandas as pd

from grtkit.exceptions import DataShapeError, SchemaError


@dataclasses.dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """
    Stimulus-by-response counts.

    Attributes:
        counts (np.ndarray): S x R array of non-negative integers (read-only).
        stimulus_labels (tuple[str, ...]): Row labels.
        response_labels (tuple[str, ...]): Column labels.
    """

    counts: np.ndarray
    stimulus_labels: tuple[str, ...]
    response_labels: tuple[str, ...]

    def __post_init__(self):
        counts = np.array(self.counts)
        if counts.ndim != 2:
            raise DataShapeError(f"counts must be a 2-D matrix, got {counts.ndim} dimensions")
        if counts.size and not np.all(np.equal(np.mod(counts, 1), 0)):
            raise DataShapeError("counts must be integers")
        counts = counts.astype(np.int64)
        if np.any(counts < 0):
            raise DataShapeError("counts must be non-negative")
        zero_rows = np.flatnonzero(counts.sum(axis=1) == 0)
        stimulus_labels = tuple(str(label) for label in self.stimulus_labels)
        response_labels = tuple(str(label) for label in self.response_labels)
        if len(stimulus_labels) != counts.shape[0]:
            raise DataShapeError(
                f"{len(stimulus_labels)} stimulus labels for {counts.shape[0]} rows"
            )
        if len(response_labels) != counts.shape[1]:
            raise DataShapeError(
                f"{len(response_labels)} response labels for {counts.shape[1]} columns"
            )
        if zero_rows.size:
            names = ", ".join(stimulus_labels[i] for i in zero_rows)
            raise DataShapeError(f"every stimulus must be presented at least once: {names}")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "stimulus_labels", stimulus_labels)
        object.__setattr__(self, "response_labels", response_labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return (
            np.array_equal(self.counts, other.counts)
            and self.stimulus_labels == other.stimulus_labels
            and self.response_labels == other.response_labels
        )

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def from_counts(
        cls,
        counts: typ.Sequence[typ.Sequence[int]] | np.ndarray,
        stimulus_labels: typ.Optional[typ.Sequence[str]] = None,
        response_labels: typ.Optional[typ.Sequence[str]] = None,
    ) -> ConfusionMatrix:
        """Build a matrix, generating S1.. / R1.. labels when none are given."""
        array = np.asarray(counts)
        if array.ndim != 2:
            raise DataShapeError(f"counts must be a 2-D matrix, got {array.ndim} dimensions")
        s, r = array.shape
        return cls(
            array,
            tuple(stimulus_labels) if stimulus_labels is not None else tuple(f"S{i + 1}" for i in range(s)),
            tuple(response_labels) if response_labels is not None else tuple(f"R{i + 1}" for i in range(r)),
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    @property
    def row_totals(self) -> np.ndarray:
        """np.ndarray: Number of presentations of each stimulus."""
        return self.counts.sum(axis=1)

    @property
    def total_trials(self) -> int:
        return int(self.counts.sum())

    def proportions(self) -> np.ndarray:
        """Row-normalized response proportions."""
        return self.counts / self.row_totals[:, None]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            self.counts, index=list(self.stimulus_labels), columns=list(self.response_labels)
        )
        frame.index.name = "stimulus"
        return frame

    def to_csv(self, path: typ.Optional[str | pathlib.Path] = None) -> str:
        """
        Serialize to CSV.

        Args:
            path (str | Path | None): When given, the CSV is also written there.

        Returns:
            str: The CSV text.
        """
        buffer = io.StringIO()
        self.to_frame().to_csv(buffer, lineterminator="\n")
        text = buffer.getvalue()
        if path is not None:
            pathlib.Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source: str | pathlib.Path | typ.TextIO) -> ConfusionMatrix:
        """
        Parse the CSV format described in the module docstring.

        Raises:
            SchemaError: If the file cannot be parsed or a cell is not an integer.
        """
        try:
            frame = pd.read_csv(source, index_col=0)
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise SchemaError(f"cannot parse confusion matrix CSV: {e}") from e
        try:
            values = frame.to_numpy(dtype=float)
        except (TypeError, ValueError) as e:
            raise SchemaError(f"confusion matrix cells must be integers: {e}") from e
        if np.any(~np.isfinite(values)) or np.any(values != np.round(values)):
            raise SchemaError("confusion matrix cells must be integers")
        try:
            return cls(
                values.astype(np.int64),
                tuple(str(label) for label in frame.index),
                tuple(str(label) for label in frame.columns),
            )
        except DataShapeError as e:
            raise SchemaError(str(e)) from e
