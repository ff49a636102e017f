import numpy as np
import pytest

from unilateral._validation import check_dynamics_matrix, check_input_matrix, check_node_subset, check_states
from unilateral.system import InputMatrix, candidate_columns, format_column, parse_column


@pytest.mark.parametrize("text, col", [("+e3", (3, 1)), ("e3", (3, 1)), ("-e12", (12, -1)), (" - E2 ", (2, -1))])
def test_parse_column(text, col):
    assert parse_column(text) == col
    assert parse_column(format_column(col)) == col


@pytest.mark.parametrize("text", ["x3", "+e", "e0", "++e1", ""])
def test_parse_column_rejects(text):
    with pytest.raises(ValueError):
        parse_column(text)


def test_input_matrix_roundtrip():
    B = InputMatrix.parse("-e6, -e2")
    assert B.columns == ((6, -1), (2, -1))
    assert str(B) == "-e6,-e2"
    arr = B.to_array(7)
    assert arr.shape == (7, 2) and arr[5, 0] == -1 and arr[1, 1] == -1
    assert np.abs(arr).sum() == B.m
    assert InputMatrix.from_array(arr) == B
    assert InputMatrix.from_pairs(B.to_json()) == B
    assert B.driver_nodes == (2, 6)


def test_input_matrix_rejects_non_versor():
    with pytest.raises(ValueError):
        InputMatrix.from_array(np.array([[1.0], [1.0]]))
    with pytest.raises(ValueError):
        InputMatrix.from_array(np.array([[2.0], [0.0]]))
    with pytest.raises(ValueError):
        InputMatrix(((1, 0),))


def test_check_input_matrix_forms():
    n = 3
    ref = InputMatrix(((1, 1), (3, -1)))
    assert check_input_matrix("e1,-e3", n) == ref
    assert check_input_matrix([(1, 1), (3, -1)], n) == ref
    assert check_input_matrix(ref.to_array(n), n) == ref
    assert check_input_matrix(None, n) == InputMatrix()
    with pytest.raises(ValueError):
        check_input_matrix("e4", n)


def test_candidate_order():
    assert candidate_columns(2) == [(1, 1), (1, -1), (2, 1), (2, -1)]


def test_check_dynamics_matrix():
    assert check_dynamics_matrix([[1, 2], [3, 4]]).dtype == float
    for bad in ([[1, 2]], [[np.nan]], [[1j]], [], [[1, 2], [3]]):
        with pytest.raises(ValueError):
            check_dynamics_matrix(bad)


def test_check_node_subset():
    assert check_node_subset([3, 1], 3) == (1, 3)
    for bad in ([0], [4], [1, 1], [1.5]):
        with pytest.raises(ValueError):
            check_node_subset(bad, 3)


def test_check_states():
    assert check_states([1, 2], 2).shape == (1, 2)
    with pytest.raises(ValueError):
        check_states([[1, 2, 3]], 2)
