import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cstar_hodge import (
    AlgebraShape,
    InconsistentPlant,
    SimplicialComplex,
    coboundary_complex,
    group_algebra_shape,
    hodge_decompose,
    planted_random_complex,
)
from cstar_hodge.builders import random_corpus_complex, random_plant, staircase_ranks
from oracles import betti_by_elimination, exact_rank

M1 = AlgebraShape([1])


def test_face_closure_and_counts():
    K = SimplicialComplex(4, [(0, 1, 2)])
    assert K.counts() == [4, 3, 1]
    assert SimplicialComplex.tetrahedron_boundary().counts() == [4, 6, 4]
    assert SimplicialComplex(3, [(2, 0), (0, 2)]).counts() == [3, 1]
    with pytest.raises(ValueError):
        SimplicialComplex(2, [(0, 0)])
    with pytest.raises(ValueError):
        SimplicialComplex(2, [(0, 2)])


def test_json_roundtrip():
    K = SimplicialComplex.tetrahedron_boundary()
    assert SimplicialComplex.from_json(K.to_json()).simplices == K.simplices
    # face closure on load
    assert SimplicialComplex.from_json({"vertices": 3, "simplices": [[0, 1, 2]]}).counts() == [3, 3, 1]


def test_single_vertex():
    c = coboundary_complex(SimplicialComplex(1, []), AlgebraShape([2, 1]))
    assert c.ranks == [1]
    assert hodge_decompose(c).multiplicities == [(1, 1)]


def test_cycle_incidence():
    delta = SimplicialComplex.cycle(3).coboundary_matrix(0)
    # edges (0,1), (0,2), (1,2); (delta f)(a,b) = f(b) - f(a)
    np.testing.assert_array_equal(delta, [[-1, 1, 0], [-1, 0, 1], [0, -1, 1]])
    c = coboundary_complex(SimplicialComplex.cycle(3), M1)
    np.testing.assert_array_equal(c.d(0).blocks[0].real, delta)


@pytest.mark.parametrize("K", [SimplicialComplex.cycle(5), SimplicialComplex.tetrahedron_boundary(),
                               SimplicialComplex.simplex_boundary(4), SimplicialComplex(5, [(0, 1, 2, 3)])])
def test_coboundary_squares_to_zero_exactly(K):
    for k in range(K.dim - 1):
        assert not np.any(K.coboundary_matrix(k + 1) @ K.coboundary_matrix(k))
    c = coboundary_complex(K, AlgebraShape([2, 1]), coeff_rank=2)
    assert all(r == 0 for r in c.square_residuals())


@pytest.mark.parametrize("m", [1, 2, 3])
def test_coefficient_scaling(m):
    K = SimplicialComplex.tetrahedron_boundary()
    base = hodge_decompose(coboundary_complex(K, AlgebraShape([1, 2]))).multiplicities
    scaled = hodge_decompose(coboundary_complex(K, AlgebraShape([1, 2]), m)).multiplicities
    assert scaled == [tuple(m * x for x in row) for row in base]


def test_group_algebra_shapes():
    assert group_algebra_shape([2]).block_dims == (1, 1)
    assert group_algebra_shape([3]).block_dims == (1, 1, 1)
    assert group_algebra_shape([2, 2]).block_dims == (1, 1, 1, 1)
    with pytest.raises(ValueError):
        group_algebra_shape([])


def test_staircase_ranks():
    assert staircase_ranks([2, 3, 2], [1, 0, 0]) == [1, 2]
    with pytest.raises(InconsistentPlant):
        staircase_ranks([2, 3, 2], [1, 1, 0])


def test_plant_zero_differentials():
    p = planted_random_complex(AlgebraShape([1, 2]), [2, 1, 3], seed=4)
    assert all(d.op_norm() == 0 for d in p.complex.differentials)
    assert hodge_decompose(p.complex).multiplicities == [(2, 2), (1, 1), (3, 3)]


def test_plant_invertible():
    p = planted_random_complex(M1, [1, 1], [[0], [0]], seed=2)
    d = p.complex.d(0).blocks[0][0, 0]
    assert abs(d) == pytest.approx(1.0)
    assert hodge_decompose(p.complex).multiplicities == [(0,), (0,)]


def test_inconsistent_plant_rejected():
    # violates the Euler characteristic in both blocks
    with pytest.raises(InconsistentPlant):
        planted_random_complex(AlgebraShape([1, 2]), [2, 3, 2], [[1, 0], [1, 1], [0, 0]])
    with pytest.raises(InconsistentPlant):
        planted_random_complex(M1, [1, 1], [[2], [0]])
    with pytest.raises(InconsistentPlant):
        planted_random_complex(M1, [1, 1], [[0]])


def test_plant_recovered_over_two_blocks():
    plant = [[1, 0], [0, 0], [0, 1]]
    p = planted_random_complex(AlgebraShape([1, 2]), [2, 3, 2], plant, seed=7)
    assert p.complex.validate()[0] <= 1e-15
    assert hodge_decompose(p.complex).multiplicities == [(1, 0), (0, 0), (0, 1)]


def test_planted_is_seed_deterministic():
    a = planted_random_complex(AlgebraShape([2]), [2, 2], [[1], [1]], seed=3, spread=2)
    b = planted_random_complex(AlgebraShape([2]), [2, 2], [[1], [1]], seed=3, spread=2)
    assert np.array_equal(a.complex.d(0).blocks[0], b.complex.d(0).blocks[0])


def test_unitaries_are_unitary():
    p = planted_random_complex(AlgebraShape([2, 3]), [2, 3], [[1, 0], [2, 1]], seed=1)
    for per_degree in p.unitaries:
        for U in per_degree:
            np.testing.assert_allclose(U.conj().T @ U, np.eye(len(U)), atol=1e-12)


def test_planted_unconjugated_structure_matches_exact_rank():
    # rank of each differential realization is n_b times the staircase rank
    plant = [[1, 0], [0, 0], [0, 1]]
    p = planted_random_complex(AlgebraShape([1, 2]), [2, 3, 2], plant, seed=7)
    for k, d in enumerate(p.complex.differentials):
        for b, nb in enumerate(p.complex.shape.block_dims):
            s = staircase_ranks([2, 3, 2], [row[b] for row in plant])[k]
            assert np.linalg.matrix_rank(d.blocks[b]) == s * nb


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_random_plants_consistent(seed):
    rng = np.random.default_rng(seed)
    shape = AlgebraShape([1, 2])
    ranks = list(rng.integers(0, 5, size=4))
    plant = random_plant(shape, ranks, rng)
    for b in range(2):
        staircase_ranks(ranks, [row[b] for row in plant])


def test_corpus_bounds():
    for seed in range(50):
        c = random_corpus_complex(seed).complex
        assert 1 <= c.shape.num_blocks <= 3
        assert max(c.shape.block_dims) <= 3
        assert max(c.ranks) <= 6
        assert 1 <= c.length <= 5


def test_topology_against_elimination_oracle():
    K = SimplicialComplex.cycle(4)
    c = coboundary_complex(K, AlgebraShape([2, 1]), 2)
    assert betti_by_elimination(c) == [[2, 2], [2, 2]]
    assert exact_rank(K.coboundary_matrix(0)) == 3
