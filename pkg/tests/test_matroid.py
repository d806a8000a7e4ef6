import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from regmat.generators import random_planar_graph, random_regular_matroid
from regmat.matroid import (
    CATALOG_NAMES,
    Contract,
    Delete,
    GroundSetTooLarge,
    LoopContraction,
    LoopElement,
    Matroid,
    MinorTrace,
    NotTU,
    UnknownName,
    catalog,
    cographic,
    contract,
    delete,
    dual,
    find_isomorphism,
    find_unit_covector,
    graphic,
    is_cographic,
    is_isomorphic,
    normalize_signs,
    validate,
)
from regmat.solver import membership_system, solution_space, exists_indivisible

from conftest import K4_EDGES

W4_EDGES = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1), (4, 2), (4, 3)]


def test_validate_examples():
    assert validate(np.eye(3, dtype=int)).rank == 3
    with pytest.raises(NotTU):
        validate([[2]])
    R10 = catalog("R10")
    assert validate(R10.A, R10.ground).n == 10


def test_non_tu_reports_witness():
    with pytest.raises(NotTU) as exc:
        validate([[1, 0, 1, 1], [0, 1, 1, -1]])
    assert abs(exc.value.det) == 2


@pytest.mark.parametrize("name, rank, n", [("K5", 4, 10), ("K33", 5, 9), ("R10", 5, 10)])
def test_catalog(name, rank, n):
    M = catalog(name)
    assert (M.rank, M.n) == (rank, n)
    assert M.is_loopless()


def test_catalog_aliases_and_errors():
    assert catalog("k3,3") == catalog("K33")
    with pytest.raises(UnknownName):
        catalog("F7")


def test_r10_deletions_are_k33():
    R10, K33 = catalog("R10"), catalog("K33")
    for s in R10.ground:
        assert is_isomorphic(delete(R10, s), K33)


def test_normalize_signs_examples():
    M = catalog("K5")
    N = normalize_signs(M)
    assert normalize_signs(N) == N
    flipped = N.with_signs(col_signs=[-1] + [1] * (N.n - 1))
    assert normalize_signs(flipped) == N


def test_sign_flipped_k5_same_solution_space(rng):
    M = catalog("K5")
    F = M.with_signs(rng.choice([-1, 1], M.rank), rng.choice([-1, 1], M.n))
    for N in (M, F, normalize_signs(F)):
        sp = solution_space(membership_system(N, 2))
        assert sp.dim == 103
        assert not exists_indivisible(sp).exists


def test_unit_covector():
    M = Matroid("z", ("a", "b"), np.array([[1, 0]]))
    assert M.loops() == ["b"]
    with pytest.raises(LoopElement):
        find_unit_covector(M, "b")
    I = validate(np.array([[1, 0, 1], [0, 1, -1]]), ["a", "b", "c"])
    assert find_unit_covector(I, "a").tolist() == [1, 0, 1]
    K33 = catalog("K33")
    for s in K33.ground:
        u = find_unit_covector(K33, s)
        assert u[K33.index(s)] == 1
        # u lies in the row lattice
        from regmat.linalg import solve_rational

        x = solve_rational(K33.A.tolist(), u.tolist())
        assert x is not None and all(q.denominator == 1 for q in x)


def test_delete_contract_examples():
    I = validate(np.eye(3, dtype=int), ["a", "b", "c"])
    assert delete(I, "a").rank == 2
    with pytest.raises(LoopContraction):
        contract(Matroid("z", ("a", "b"), np.array([[1, 0]])), "b")
    M = catalog("K5")
    a, b = M.ground[0], M.ground[5]
    assert is_isomorphic(delete(contract(M, a), b), contract(delete(M, b), a))


def test_graph_constructions():
    tri = graphic([(0, 1), (1, 2), (2, 0)])
    assert (tri.rank, tri.n, len(tri.circuits)) == (2, 3, 1)
    G, C = graphic(K4_EDGES), cographic(K4_EDGES)
    assert (G.rank, G.n, C.rank, C.n) == (3, 6, 3, 6)
    assert is_isomorphic(G, C)
    assert (catalog("K33").rank, catalog("K33").n) == (5, 9)


def test_isomorphism_examples():
    M = catalog("K5")
    assert find_isomorphism(M, M) == {s: s for s in M.ground}
    assert not is_isomorphic(M, catalog("K33"))
    flipped = M.with_signs(col_signs=[1, -1] * 5)
    assert is_isomorphic(M, flipped)
    big = Matroid("big", tuple(f"x{i}" for i in range(17)), np.eye(17, dtype=np.int64))
    with pytest.raises(GroundSetTooLarge):
        is_isomorphic(big, big)


def test_is_cographic_examples():
    assert is_cographic(graphic(K4_EDGES)).cographic
    k5 = is_cographic(catalog("K5"))
    assert not k5 and k5.excluded == "K5" and len(k5.witness) == 0
    r10 = is_cographic(catalog("R10"))
    assert not r10 and r10.excluded == "K33"
    assert len(r10.witness) == 1 and isinstance(r10.witness.ops[0], Delete)
    assert is_isomorphic(r10.witness.apply(catalog("R10")), catalog("K33"))
    assert is_cographic(graphic(W4_EDGES, 5)).cographic


def test_minor_trace_json():
    t = MinorTrace((Contract("a"), Delete("b")))
    assert MinorTrace.from_json(t.to_json()) == t


def test_json_round_trip():
    for name in CATALOG_NAMES:
        M = catalog(name)
        N = Matroid.from_json(M.to_json())
        assert N == M and N.content_hash() == M.content_hash()


def test_dual_involution():
    for name in CATALOG_NAMES:
        M = catalog(name)
        assert is_isomorphic(dual(dual(M)), M)
        assert dual(M).rank == M.n - M.rank


def _maximal_minor_gcd(A: np.ndarray) -> int:
    r = np.linalg.matrix_rank(A)
    if r == 0:
        return 0
    g = 0
    for rows in itertools.combinations(range(A.shape[0]), r):
        for cols in itertools.combinations(range(A.shape[1]), r):
            g = math.gcd(g, int(round(np.linalg.det(A[np.ix_(rows, cols)]))))
    return g


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_saturation(name):
    M = catalog(name)
    for k in range(1, 7):
        for T in itertools.combinations(range(M.n), k):
            assert _maximal_minor_gcd(M.A[:, T].astype(float)) in (0, 1)


@given(st.integers(0, 2**32 - 1))
def test_random_planar_graphs_are_cographic(seed):
    n, edges = random_planar_graph(np.random.default_rng(seed))
    M = graphic(edges, n)
    assert is_cographic(M).cographic


@given(st.integers(0, 2**32 - 1))
def test_minors_stay_tu_and_dual_involution(seed):
    rng = np.random.default_rng(seed)
    M = random_regular_matroid(rng)
    assert is_isomorphic(dual(dual(M)), M)
    s = M.ground[int(rng.integers(M.n))]
    D = delete(M, s)
    if D.rank:
        validate(D.A, D.ground)
    if s not in M.loops():
        C = contract(M, s)
        if C.rank:
            validate(C.A, C.ground)


def test_excluded_minor_needing_contraction():
    # K33 with one edge subdivided: the K33 minor appears only after a contraction.
    from regmat.matroid import K33_EDGES

    edges = [(0, 6), (6, 3)] + K33_EDGES[1:]
    M = graphic(edges, 7)
    res = is_cographic(M)
    assert not res.cographic and res.excluded == "K33"
    assert any(isinstance(op, Contract) for op in res.witness.ops)
    assert is_isomorphic(res.witness.apply(M), catalog("K33"))
    # K5 plus a pendant edge at a new vertex: a deletion or contraction exposes K5.
    from regmat.matroid import K5_EDGES

    res = is_cographic(graphic(K5_EDGES + [(0, 5)], 6))
    assert not res.cographic and res.excluded == "K5"
