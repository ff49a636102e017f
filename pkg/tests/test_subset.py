import itertools

import numpy as np
import pytest

from unilateral.cone import ReachableCone, analyze, q_set
from unilateral.spectral import compute_spectrum
from unilateral.subset import (is_subset_controllable, max_controllable_subset, node_flags, positive_span_is_full,
                               ray_pair_node_test)
from unilateral.system import InputMatrix, candidate_columns


def cone_from(vectors):
    from unilateral.cone import ConeGenerator

    gens = [ConeGenerator(np.asarray(v, float) / np.linalg.norm(v), 0, 1, "+r", "positive", "ray") for v in vectors]
    n = len(vectors[0])
    return ReachableCone(gens, [], n, compute_spectrum(np.eye(n)), InputMatrix())


@pytest.mark.parametrize("vectors, full", [
    ([[1, 0], [0, 1], [-1, -1]], True),
    ([[1, 0], [0, 1]], False),
    ([[1, 1], [-1, 0], [0, -1]], True),
    ([[1, 0], [-1, 0], [0, 1]], False),
    ([[1, 0], [-1, 0], [0, 1], [0, -1]], True),
    ([[0, 0], [1, 0], [0, 1], [-1, -1]], True),
])
def test_positive_span_is_full(vectors, full):
    assert positive_span_is_full([np.array(v, float) for v in vectors], 2) is full
    assert positive_span_is_full(np.array(vectors, float).T, 2) is full


def test_positive_span_edge_cases():
    assert positive_span_is_full([], 0)
    assert not positive_span_is_full([], 1)
    assert positive_span_is_full([np.array([1.0]), np.array([-2.0])], 1)
    with pytest.raises(ValueError):
        positive_span_is_full([np.array([1.0, 0.0])], 3)


def test_projection_example():
    cone = cone_from([[1, 1], [-1, 0]])
    assert not is_subset_controllable(cone, [2])
    assert is_subset_controllable(cone, [1])
    assert is_subset_controllable(cone, [])


def test_sample_network_subset(sample_network):
    cone = analyze(sample_network, "-e6,-e2")
    assert is_subset_controllable(cone, [1, 2, 3, 4, 5, 6])


def test_ray_pair_node_test(sample_network):
    cone = analyze(sample_network, "-e6,-e2")
    Q = q_set(cone)
    assert ray_pair_node_test(3, Q)
    empty = np.zeros((3, 0))
    single = np.array([[1.0], [-1.0], [0.0]])
    for i in (1, 2, 3):
        assert not ray_pair_node_test(i, empty)
        assert not ray_pair_node_test(i, single)


def test_subsets_of_controllable_are_controllable():
    rng = np.random.default_rng(5)
    for _ in range(15):
        n = int(rng.integers(2, 5))
        A = rng.integers(-3, 4, (n, n)).astype(float)
        cols = candidate_columns(n)
        B = InputMatrix(tuple(cols[i] for i in rng.choice(len(cols), int(rng.integers(1, 4)))))
        cone = analyze(A, B)
        for size in range(1, n + 1):
            for S in itertools.combinations(range(1, n + 1), size):
                if is_subset_controllable(cone, S):
                    for sub in itertools.combinations(S, size - 1):
                        assert is_subset_controllable(cone, sub)


def test_max_controllable_subset_and_flags():
    cone = analyze(np.diag([1.0, 2.0]), "e1,-e1")
    assert node_flags(cone) == [True, False]
    assert max_controllable_subset(cone) == (1,)
    with pytest.raises(ValueError):
        max_controllable_subset(analyze(np.eye(8), "e1"))
