import numpy as np
import pytest

from unilateral.cone import (BIDIRECTIONAL, NEGATIVE, OSCILLATORY, POSITIVE, UNEXCITED, ReachableCone, analyze,
                             classify, cone_dimension, cone_membership, controllable_membership, gamma_set,
                             in_lineality, in_positive_span, irredundant_count, q_set, reachable_cone)
from unilateral.spectral import compute_spectrum, select_left_chains
from unilateral.system import InputMatrix, candidate_columns


def parallel(u, v, tol=1e-8):
    u, v = np.asarray(u, float), np.asarray(v, float)
    return abs(abs(u @ v) - np.linalg.norm(u) * np.linalg.norm(v)) <= tol * np.linalg.norm(u) * np.linalg.norm(v)


def block_for(d, value):
    return next(b for b in d.blocks if np.isclose(b.eigenvalue, value))


def test_positive_ray_case():
    d = compute_spectrum(np.diag([1.0, 2.0]))
    case, gens = gamma_set(block_for(d, 1), 1, "e1")
    assert case == POSITIVE
    assert len(gens) == 1 and np.allclose(gens[0].vector, [1, 0]) and gens[0].kind == "ray"


def test_unexcited_case():
    d = compute_spectrum(np.diag([1.0, 2.0]))
    case, gens = gamma_set(block_for(d, 1), 1, "e2")
    assert case == UNEXCITED and gens == []


def test_negative_and_bidirectional_cases():
    d = compute_spectrum(np.diag([1.0, 2.0]))
    b = block_for(d, 1)
    assert gamma_set(b, 1, "-e1")[0] == NEGATIVE
    assert np.allclose(gamma_set(b, 1, "-e1")[1][0].vector, [-1, 0])
    case, gens = gamma_set(b, 1, "e1,-e1")
    assert case == BIDIRECTIONAL and {g.part for g in gens} == {"+r", "-r"}
    assert all(g.kind == "line" for g in gens)


def test_oscillatory_case_covers_plane():
    A = np.array([[0.0, -1.0], [1.0, 0.0]])
    cone = analyze(A, "e1")
    assert set(cone.cases.values()) == {OSCILLATORY}
    assert len(cone.generators) == 4
    assert cone.lineality_dim == 2
    for x in ([1, 0], [0, 1], [-1, -1], [0.3, -2]):
        assert cone_membership(cone, x)


def test_chain_tail_decides_earlier_levels():
    # only the tail level sees the input with a sign; the head inherits it
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    d = compute_spectrum(A)
    (b,) = d.blocks
    Bmat = InputMatrix.parse("e1").to_array(2)
    assert classify(b, 2, Bmat) == UNEXCITED
    assert classify(b, 1, Bmat) in (POSITIVE, NEGATIVE)
    with pytest.raises(ValueError):
        classify(b, 3, Bmat)


def test_case_exclusivity_random():
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = int(rng.integers(1, 5))
        A = rng.integers(-3, 4, (n, n)).astype(float)
        cols = candidate_columns(n)
        B = InputMatrix(tuple(cols[i] for i in rng.choice(len(cols), int(rng.integers(1, 3)))))
        cone = analyze(A, B)
        d = cone.decomposition
        assert set(cone.cases) == {(b.index, k) for b in d.blocks for k in range(1, b.size + 1)}
        for (i, k), case in cone.cases.items():
            real = d.blocks[i].is_real
            assert case in ((UNEXCITED, BIDIRECTIONAL, POSITIVE, NEGATIVE) if real else (UNEXCITED, OSCILLATORY))


def test_empty_input_gives_trivial_cone():
    cone = analyze(np.diag([1.0, -1.0]), InputMatrix())
    assert cone.generators == [] and cone.lineality_dim == 0
    assert cone_membership(cone, [0, 0])
    assert not cone_membership(cone, [1, 0])


def test_full_space_from_paired_inputs():
    cone = analyze(np.diag([1.0, 2.0]), "e1,-e1,e2,-e2")
    assert cone.lineality_dim == 2
    assert q_set(cone).size == 0
    for x in ([1, 1], [-1, 1], [-1, -1], [1, -1]):
        assert cone_membership(cone, x)


def test_membership_examples():
    G = np.array([[1.0, -1.0], [1.0, 0.0]])
    assert in_positive_span(G, [0, 1])
    assert in_positive_span(G, [0, 0])
    assert not in_positive_span(np.array([[1.0], [0.0]]), [-1, 0])


def test_q_set_single_ray():
    cone = analyze(np.diag([1.0, 2.0]), "e1")
    Q = q_set(cone)
    assert Q.size == 1 and np.allclose(Q.columns[:, 0], [1, 0])


def test_sample_network_lineality_and_rays(sample_network):
    cone = analyze(sample_network, "-e6,-e2")
    d = cone.decomposition
    assert cone.lineality_dim == 5
    assert len(cone.lineality_basis) == 5
    W = cone.lineality_matrix
    # spanned by r1 and the real/imaginary parts of the two complex pairs
    expected = [d.blocks[0].right[:, 0].real]
    for value in (1 + 4j, 2 + 3j):
        r = block_for(d, value).right[:, 0]
        expected += [r.real, r.imag]
    assert np.linalg.matrix_rank(np.column_stack([W] + expected), tol=1e-8) == 5
    Q = q_set(cone)
    assert Q.size == 2
    r2 = block_for(d, 3).right[:, 0].real
    r3 = block_for(d, 0).right[:, 0].real
    assert parallel(Q.columns[:, 0], r2) and parallel(Q.columns[:, 1], r3)
    for q in Q.columns.T:
        assert not cone_membership(cone, -q)


def test_lineality_symmetry_and_rank(sample_network):
    cone = analyze(sample_network, "-e6,-e2")
    for w in cone.lineality_basis:
        assert cone_membership(cone, w) and cone_membership(cone, -w)
        assert in_lineality(cone, w)
    assert cone.lineality_dim == np.linalg.matrix_rank(cone.lineality_matrix)


def test_controllable_membership_scalar():
    cone = analyze([[1.0]], "e1")
    assert controllable_membership(cone, [-1.0])
    assert not controllable_membership(cone, [1.0])
    assert cone_membership(cone, [1.0]) and not cone_membership(cone, [-1.0])


def test_controllable_membership_in_lineality():
    cone = analyze([[1.0]], "e1,-e1")
    assert controllable_membership(cone, [1.0]) and controllable_membership(cone, [-1.0])


def test_controllable_membership_rejects_negative_time():
    cone = analyze([[-1.0]], "e1")
    with pytest.raises(ValueError):
        controllable_membership(cone, [1.0], time_grid=(-1.0,))


def test_irredundant_count():
    G = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
    assert irredundant_count(G) == 2
    assert irredundant_count(np.array([[1.0, -1.0]])) == 2


def test_cone_dimension_two_rays():
    cone = analyze(np.diag([1.0, 2.0]), "e1,e2")
    assert cone_dimension(cone) == 2


def test_monotone_growth_under_extra_column():
    rng = np.random.default_rng(7)
    for _ in range(25):
        n = int(rng.integers(1, 5))
        A = rng.integers(-3, 4, (n, n)).astype(float)
        cols = candidate_columns(n)
        B = InputMatrix(tuple(cols[i] for i in rng.choice(len(cols), int(rng.integers(0, 3)))))
        beta = cols[int(rng.integers(len(cols)))]
        d = compute_spectrum(A)
        small = reachable_cone(d, B, select=True)
        big = reachable_cone(d, B.append(beta), select=True)
        assert big.lineality_dim >= small.lineality_dim
        assert all(cone_membership(big, g.vector) for g in small.generators)
