import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from regmat.linalg import (
    BACKEND,
    LatticeBasis,
    NotFullRank,
    coset_reduce,
    det_int,
    hnf,
    lattice_index,
    left_kernel,
    matmul_mod,
    pack_gf2,
    rank_ff,
    rank_q,
    right_kernel,
    rref_ff,
    solve_left,
    solve_right,
    solve_rational,
    unpack_gf2,
)
from regmat.matroid import catalog
from regmat.albanese import albanese_lattice
from regmat.solver import membership_system


# -- oracle examples ---------------------------------------------------------------


def test_rank_examples(kernels):
    assert rank_ff(np.zeros((3, 3), dtype=int), 2, kernels=kernels) == 0
    assert rank_ff(np.eye(4, dtype=int), 3, kernels=kernels) == 4


def test_k33_condition_matrix_rank(kernels):
    sys_ = membership_system(catalog("K33"), 2)
    assert sys_.shape == (72, 80)
    assert rank_ff(sys_.condition, 2, kernels=kernels) == 57
    assert left_kernel(sys_.condition, 2, kernels=kernels).rank == 15


def test_kernel_examples():
    assert left_kernel(np.eye(2, dtype=int), 2).rank == 0
    K = left_kernel(np.zeros((1, 1), dtype=int), 3)
    assert K.vectors.tolist() == [[1]]
    assert right_kernel(np.eye(3, dtype=int), 5).rank == 0
    assert right_kernel(np.zeros((2, 3), dtype=int), 5).rank == 3


def test_right_kernel_brute_force(rng):
    p = 5
    M = rng.integers(0, p, size=(5, 8))
    K = right_kernel(M, p)
    span = {
        tuple(np.mod(np.array(c) @ K.vectors, p)) for c in itertools.product(range(p), repeat=K.rank)
    }
    brute = {x for x in itertools.product(range(p), repeat=8) if not np.mod(M @ np.array(x), p).any()}
    assert span == brute


def test_rref_does_not_mutate_input(kernels):
    A = np.array([[1, 1, 0], [1, 0, 1], [0, 1, 1]], dtype=np.uint8)
    before = A.copy()
    rref_ff(A, 3, kernels=kernels)
    rref_ff(A, 2, packed=False, kernels=kernels)
    assert np.array_equal(A, before)


def test_solve():
    p = 7
    M = np.array([[1, 2, 3], [0, 1, 4]])
    x = solve_right(M, [1, 2], p)
    assert np.array_equal(np.mod(M @ x, p), [1, 2])
    y = solve_left(M, [2, 4, 6], p)
    assert np.array_equal(np.mod(y @ M, p), [2, 4, 6])
    assert solve_right(np.array([[1, 1], [1, 1]]), [0, 1], 2) is None


def test_matmul_mod_large_prime():
    p = 2**31 - 1
    A = np.full((2, 3), p - 1)
    assert matmul_mod(A, A.T, p).tolist() == [[3, 3], [3, 3]]


def test_hnf_examples():
    H, U = hnf(np.eye(3, dtype=int))
    assert H == np.eye(3, dtype=int).tolist()
    assert hnf([[2, 0], [0, 2]])[0] == [[2, 0], [0, 2]]
    M = [[1, 1], [0, 3], [3, 0]]
    H, U = hnf(M)
    assert np.array_equal(np.array(U, dtype=object) @ np.array(M, dtype=object), np.array(H, dtype=object))
    assert abs(det_int(U)) == 1
    assert H[2] == [0, 0]
    assert det_int([row for row in H if any(row)]) == 3


def test_coset_examples():
    L = albanese_lattice(catalog("K33"), 2, 1, 0)
    assert coset_reduce([0] * 9, L) == (0,) * 9
    v = [1, 0, 1, 1, 0, 0, 1, 1, 0]
    w = list(v)
    w[4] += 2
    assert coset_reduce(v, L) == coset_reduce(w, L)
    reps = {L.reduce(x) for x in itertools.product((0, 1), repeat=9)}
    assert len(reps) == 16 == L.index


def test_not_full_rank():
    with pytest.raises(NotFullRank):
        LatticeBasis.from_generators([[1, 0], [2, 0]])
    assert lattice_index([[2, 1], [0, 3]]) == 6


def test_rank_q_and_solve_rational():
    assert rank_q([[1, 2], [2, 4]]) == 1
    x = solve_rational([[2, 0], [0, 3]], [1, 1])
    assert x[0] * 2 == 1 and x[1] * 3 == 1
    assert solve_rational([[1, 1]], [1, 0]) is None


# -- properties -----------------------------------------------------------------------


matrices = st.integers(1, 12).flatmap(
    lambda m: st.integers(1, 12).flatmap(
        lambda n: hnp.arrays(np.int64, (m, n), elements=st.integers(-5, 5))
    )
)


@given(matrices, st.sampled_from([2, 3, 5, 7]))
def test_rank_nullity(M, p):
    assert rank_ff(M, p) + left_kernel(M, p).rank == M.shape[0]
    K = left_kernel(M, p)
    if K.rank:
        assert not matmul_mod(K.vectors, M, p).any()


@given(st.integers(1, 64), st.integers(1, 64), st.integers(0, 2**32 - 1))
def test_packed_gf2_matches_generic(m, n, seed):
    A = np.random.default_rng(seed).integers(0, 2, size=(m, n))
    R1, p1 = rref_ff(A, 2, packed=True)
    R2, p2 = rref_ff(A, 2, packed=False)
    assert p1 == p2 and np.array_equal(R1, R2)
    assert np.array_equal(unpack_gf2(pack_gf2(A.astype(np.uint8)), n), A)


@given(st.integers(1, 40), st.integers(1, 40), st.sampled_from([2, 3, 251, 65521]), st.integers(0, 2**32 - 1))
def test_backends_agree(m, n, p, seed):
    from regmat.linalg import available_backends

    A = np.random.default_rng(seed).integers(0, p, size=(m, n))
    results = [rref_ff(A, p, packed=False, kernels=k) for k in available_backends().values()]
    for R, piv in results[1:]:
        assert piv == results[0][1] and np.array_equal(R, results[0][0])


vecs = hnp.arrays(np.int64, 9, elements=st.integers(-20, 20))


@given(vecs, vecs)
def test_coset_reduce_is_a_group_map(a, b):
    L = albanese_lattice(catalog("K33"), 3, 1, 0)
    ra, rb = np.array(L.reduce(a)), np.array(L.reduce(b))
    assert L.reduce(ra + rb) == L.reduce(a + b)
    assert np.array_equal(L.reduce_many(np.stack([a, b])), np.stack([ra, rb]))


def test_backend_is_reported():
    assert BACKEND in ("cython", "python")


def test_environment_forces_python_backend():
    import os
    import subprocess
    import sys

    env = dict(os.environ, REGMAT_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", "from regmat.linalg import BACKEND; print(BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
