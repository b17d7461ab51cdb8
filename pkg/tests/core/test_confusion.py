import io

import numpy as np
import pytest

from grtkit.core.confusion import ConfusionMatrix
from grtkit.exceptions import DataShapeError, SchemaError


@pytest.fixture
def matrix():
    return ConfusionMatrix(
        np.array([[70, 12, 14, 4], [10, 75, 5, 10], [15, 5, 70, 10], [3, 12, 10, 75]]),
        ("A1B1", "A1B2", "A2B1", "A2B2"),
        ("a1b1", "a1b2", "a2b1", "a2b2"),
    )


def test_totals(matrix):
    assert matrix.shape == (4, 4)
    assert matrix.row_totals.tolist() == [100, 100, 100, 100]
    assert matrix.total_trials == 400
    np.testing.assert_allclose(matrix.proportions().sum(axis=1), 1.0)


def test_counts_are_read_only(matrix):
    with pytest.raises(ValueError):
        matrix.counts[0, 0] = 1


def test_csv_round_trip(matrix):
    text = matrix.to_csv()
    assert text.splitlines()[0] == "stimulus,a1b1,a1b2,a2b1,a2b2"
    assert text.splitlines()[1] == "A1B1,70,12,14,4"
    assert ConfusionMatrix.from_csv(io.StringIO(text)) == matrix


def test_csv_file(matrix, tmp_path):
    path = tmp_path / "data.csv"
    matrix.to_csv(path)
    assert ConfusionMatrix.from_csv(path) == matrix


def test_from_counts_labels():
    cm = ConfusionMatrix.from_counts([[1, 2, 3]])
    assert cm.stimulus_labels == ("S1",)
    assert cm.response_labels == ("R1", "R2", "R3")


@pytest.mark.parametrize(
    "counts, message",
    [
        ([[1, -1], [2, 2]], "non-negative"),
        ([[0, 0], [2, 2]], "at least once"),
        ([[1.5, 1], [2, 2]], "integers"),
    ],
)
def test_invalid_counts(counts, message):
    with pytest.raises(DataShapeError, match=message):
        ConfusionMatrix.from_counts(counts)


def test_label_count_mismatch():
    with pytest.raises(DataShapeError, match="stimulus labels"):
        ConfusionMatrix(np.ones((2, 2), dtype=int), ("S1",), ("R1", "R2"))


def test_malformed_csv():
    with pytest.raises(SchemaError, match="integers"):
        ConfusionMatrix.from_csv(io.StringIO("stimulus,a,b\nA,1,x\nB,2,3\n"))
    with pytest.raises(SchemaError):
        ConfusionMatrix.from_csv(io.StringIO(""))


def test_equality():
    a = ConfusionMatrix.from_counts([[1, 2], [3, 4]])
    assert a == ConfusionMatrix.from_counts([[1, 2], [3, 4]])
    assert a != ConfusionMatrix.from_counts([[1, 2], [3, 5]])
