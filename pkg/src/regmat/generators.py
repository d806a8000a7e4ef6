"""Random test objects: graphs, regular matroids and quadratic splittings."""

from __future__ import annotations

import itertools

import numpy as np

from .colored_graph import Chain1, ColoredGraph, h1_basis, refine
from .matroid import Matroid, cographic, graphic
from .solver import SplittingWitness


def _connected(n: int, edges) -> bool:
    parent = list(range(n))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for u, v in edges:
        parent[find(u)] = find(v)
    return len({find(v) for v in range(n)}) == 1


def _bridges(n: int, edges) -> list[int]:
    return [i for i in range(len(edges)) if not _connected(n, edges[:i] + edges[i + 1 :])]


def random_planar_graph(rng: np.random.Generator, max_vertices: int = 6) -> tuple[int, list[tuple[int, int]]]:
    """A connected planar multigraph-free graph: a random triangulated polygon, thinned."""
    n = int(rng.integers(3, max_vertices + 1))
    edges = {(i, (i + 1) % n) if i < (i + 1) % n else ((i + 1) % n, i) for i in range(n)}
    # Fan triangulation of the polygon from a random apex keeps the graph outerplanar.
    apex = int(rng.integers(n))
    for k in range(n):
        if k != apex and rng.random() < 0.6:
            edges.add((min(apex, k), max(apex, k)))
    edges = sorted(edges)
    rng.shuffle(edges)
    while len(edges) > n - 1 and rng.random() < 0.3:
        cand = edges[1:]
        if _connected(n, cand):
            edges = cand
        else:
            break
    return n, [tuple(e) for e in edges]


def random_bridgeless_graph(
    rng: np.random.Generator, n_vertices: int = 4, extra_edges: int = 2
) -> tuple[int, list[tuple[int, int]]]:
    """A connected bridgeless graph: a Hamiltonian cycle plus random chords (parallels allowed)."""
    n = n_vertices
    perm = [int(x) for x in rng.permutation(n)]
    edges = [(perm[i], perm[(i + 1) % n]) for i in range(n)] if n > 2 else [(0, 1), (1, 0)]
    for _ in range(extra_edges):
        u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
        edges.append((u, v))
    assert not _bridges(n, edges)
    return n, edges


def random_regular_matroid(rng: np.random.Generator, max_elements: int = 7) -> Matroid:
    """A graphic or cographic matroid with randomly flipped row/column signs."""
    while True:
        n, edges = random_bridgeless_graph(rng, int(rng.integers(2, 5)), int(rng.integers(0, 4)))
        if len(edges) <= max_elements:
            break
    M = cographic(edges, n) if rng.random() < 0.5 else graphic(edges, n)
    rows = rng.choice([-1, 1], size=M.rank)
    cols = rng.choice([-1, 1], size=M.n)
    return M.with_signs(rows, cols)


def cographic_splitting(edges, n_vertices: int, ell: int = 2, level: int = 1, name: str = "") -> SplittingWitness:
    """The tautological splitting of the bond matroid of a bridgeless graph.

    Each edge is coloured by itself and U is the cycle space, so the
    complement is zero. ``level`` > 1 subdivides every edge into ``level``
    edges of its colour, which multiplies every diagonal form by ``level``.
    """
    M = cographic(edges, n_vertices, name=name)
    G0 = ColoredGraph.from_edges(n_vertices, [(u, v, s) for (u, v), s in zip(edges, M.ground)], M.ground)
    H = h1_basis(G0)
    if len(H) != M.rank:
        raise ValueError("graph must be connected")
    rows = [Chain1({e: int(x) for e, x in enumerate(M.A[k]) if x}) for k in range(M.rank)]
    if level > 1:
        R = refine(G0, level)
        G0, rows = R.graph, [R.transfer(c) for c in rows]
    return SplittingWitness(M, G0, tuple(rows), (), level, ell)


def small_tu_matrices(g: int, n: int):
    """All g x n matrices over {-1, 0, 1} (for brute-force oracles on tiny sizes)."""
    for flat in itertools.product((-1, 0, 1), repeat=g * n):
        yield np.array(flat, dtype=np.int64).reshape(g, n)
