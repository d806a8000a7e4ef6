"""Albanese graphs of a regular matroid and the maps between them.

``Alb_{l^r, l^j}(M)`` has vertex set Z^S / (l^j U + l^r Z^S) and, for every
vertex v and element s, one edge of colour s from v to v + e_s. Vertices
are numbered in breadth-first order from 0 and edge ``v * n + s`` is the
s-coloured edge leaving v, so ids are reproducible.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .colored_graph import (
    COLORLESS,
    Chain1,
    ColoredGraph,
    GraphError,
    GraphMorphism,
    Refinement,
    refine,
)
from .linalg import LatticeBasis
from .matroid import CATALOG_NAMES, Matroid
from .ring import is_prime

DEFAULT_MAX_EDGES = 10**7


class AlbaneseError(ValueError):
    pass


class TooLarge(AlbaneseError):
    pass


class InvalidParams(AlbaneseError):
    pass


class WrongParams(InvalidParams):
    pass


class InconsistentParams(InvalidParams):
    pass


class Disconnected(AlbaneseError):
    pass


class HypothesisFails(AlbaneseError):
    """The colour profile of some cycle is not in l^j U + l^r Z^S."""

    def __init__(self, message: str, cycle: Chain1):
        super().__init__(message)
        self.cycle = cycle


def max_edges() -> int:
    raw = os.environ.get("TOOLKIT_MAX_EDGES")
    return int(raw) if raw else DEFAULT_MAX_EDGES


def albanese_lattice(M: Matroid, ell: int, r: int, j: int) -> LatticeBasis:
    """HNF basis of l^j U + l^r Z^S."""
    n = M.n
    gens = [[ell**j * int(x) for x in row] for row in M.A]
    gens += [[ell**r if a == b else 0 for b in range(n)] for a in range(n)]
    return LatticeBasis.from_generators(gens)


@dataclass(frozen=True, eq=False)
class AlbaneseGraph:
    matroid: Matroid
    ell: int
    r: int
    j: int
    graph: ColoredGraph
    lattice: LatticeBasis
    vertex_reps: np.ndarray
    lookup: np.ndarray

    @property
    def params(self) -> tuple[int, int, int]:
        return self.ell, self.r, self.j

    @property
    def n_vertices(self) -> int:
        return self.graph.n_vertices

    @property
    def n_colors(self) -> int:
        return self.matroid.n

    def edge_id(self, v: int, s: int) -> int:
        return v * self.n_colors + s

    def vertices_of(self, points) -> np.ndarray:
        """Vertex ids of the classes of integer points (rows)."""
        R = self.lattice.reduce_many(points)
        return self.lookup[self.lattice.encode(R)]

    def vertex_of(self, point) -> int:
        return int(self.vertices_of(np.asarray(point).reshape(1, -1))[0])

    def loop_edges(self) -> np.ndarray:
        return np.flatnonzero(self.graph.tails == self.graph.heads)

    def sidecar(self) -> dict:
        return {
            "vertex_reps": self.vertex_reps.tolist(),
            "lattice_hnf": self.lattice.to_list(),
            "params": {"ell": self.ell, "r": self.r, "j": self.j},
        }

    def to_json(self) -> dict:
        return {"graph": self.graph.to_json(), **self.sidecar()}


def build(M: Matroid, ell: int, r: int, j: int, limit: int | None = None) -> AlbaneseGraph:
    """The Albanese graph Alb_{ell^r, ell^j}(M)."""
    if not is_prime(ell):
        raise InvalidParams(f"{ell} is not prime")
    if not 0 <= j <= r:
        raise InvalidParams(f"need 0 <= j <= r, got j={j}, r={r}")
    n, g = M.n, M.rank
    index = ell ** (j * g + r * (n - g))
    limit = max_edges() if limit is None else limit
    if index * n > limit:
        raise TooLarge(f"{index} vertices x {n} colours exceeds the edge limit {limit}")
    L = albanese_lattice(M, ell, r, j)
    assert L.index == index
    eye = np.eye(n, dtype=np.int64)
    lookup = np.full(index, -1, dtype=np.int64)
    lookup[0] = 0
    layers = [np.zeros((1, n), dtype=np.int64)]
    frontier = layers[0]
    count = 1
    while frontier.shape[0] and count < index:
        cand = L.reduce_many((frontier[:, None, :] + eye[None, :, :]).reshape(-1, n))
        codes = L.encode(cand)
        fresh = lookup[codes] < 0
        codes, cand = codes[fresh], cand[fresh]
        _, first = np.unique(codes, return_index=True)
        first.sort()
        frontier = cand[first]
        lookup[codes[first]] = np.arange(count, count + first.size)
        count += first.size
        layers.append(frontier)
    reps = np.vstack(layers)
    reps.flags.writeable = False
    heads = np.empty((index, n), dtype=np.int64)
    for s in range(n):
        heads[:, s] = lookup[L.encode(L.reduce_many(reps + eye[s]))]
    graph = ColoredGraph(
        index,
        np.repeat(np.arange(index, dtype=np.int64), n),
        heads.reshape(-1),
        np.tile(np.arange(n, dtype=np.int64), index),
        M.ground,
    )
    alb = AlbaneseGraph(M, ell, r, j, graph, L, reps, lookup)
    if M.name in CATALOG_NAMES and (ell, r, j) == (2, 1, 0) and alb.loop_edges().size:
        raise AlbaneseError(f"unexpected loops in Alb_2,1({M.name})")
    return alb


@dataclass(frozen=True, eq=False)
class ReducedAlbanese:
    alb: AlbaneseGraph
    graph: ColoredGraph
    quotient: GraphMorphism

    @property
    def matroid(self) -> Matroid:
        return self.alb.matroid


def reduce_2_1(alb: AlbaneseGraph) -> ReducedAlbanese:
    """Identify each opposite pair v -> v + e_s, v + e_s -> v of equal colour.

    The merged edge points from the lower to the higher vertex id; the
    quotient sends the original edges to it with sign +1 / -1. Loops stay.
    """
    if alb.params != (2, 1, 0):
        raise WrongParams(f"reduction needs (ell, r, j) = (2, 1, 0), got {alb.params}")
    G, n = alb.graph, alb.n_colors
    e = np.arange(G.n_edges, dtype=np.int64)
    partner = G.heads * n + G.edge_colors
    keep = e <= partner
    new_id = np.full(G.n_edges, -1, dtype=np.int64)
    new_id[keep] = np.arange(int(keep.sum()))
    edge_map = new_id[np.minimum(e, partner)]
    lo = np.minimum(G.tails, G.heads)
    hi = np.maximum(G.tails, G.heads)
    red = ColoredGraph(G.n_vertices, lo[keep], hi[keep], G.edge_colors[keep], G.colors)
    sign = np.where(G.tails <= G.heads, 1, -1)
    q = GraphMorphism(G, red, np.arange(G.n_vertices), edge_map, sign)
    return ReducedAlbanese(alb, red, q)


def _color_map(G: ColoredGraph, M: Matroid) -> np.ndarray:
    try:
        return np.array([M.index(c) for c in G.colors], dtype=np.int64)
    except KeyError as exc:
        raise GraphError(f"colour {exc} is not an element of the matroid") from None


def alb_map(
    G: ColoredGraph,
    M: Matroid,
    ell: int,
    r: int,
    j: int,
    basepoint: int = 0,
    target: AlbaneseGraph | None = None,
) -> GraphMorphism:
    """Universal map from a connected S-coloured graph into Alb_{ell^r, ell^j}(M).

    A vertex v goes to the class of the colour profile of a tree path from
    the basepoint to v. Requires the profile of every cycle to lie in
    ell^j U + ell^r Z^S; the first violating fundamental cycle is reported.
    """
    target = target or build(M, ell, r, j)
    if target.params != (ell, r, j) or target.matroid.ground != M.ground:
        raise InconsistentParams("target Albanese graph does not match the arguments")
    if np.any(G.edge_colors == COLORLESS):
        raise GraphError("every edge must carry a colour")
    cmap = _color_map(G, M)
    F = G.spanning_forest(root=basepoint)
    if len(F.roots) != 1:
        raise Disconnected(f"graph has {len(F.roots)} components")
    n = M.n
    lam = np.zeros((G.n_vertices, n), dtype=np.int64)
    for v in F.order[1:]:
        pe = int(F.parent_edge[v])
        lam[v] = lam[F.parent[v]]
        lam[v, cmap[G.edge_colors[pe]]] += F.parent_sign[v]
    vid = target.vertices_of(lam)
    cols = cmap[G.edge_colors]
    step = np.zeros((G.n_edges, n), dtype=np.int64)
    step[np.arange(G.n_edges), cols] = 1
    expected = target.vertices_of(lam[G.tails] + step)
    bad = np.flatnonzero(expected != vid[G.heads])
    if bad.size:
        e = int(bad[0])
        t, h, _ = G.edge(e)
        coeffs = {e: 1}
        for f, sg in F.path_from_root(t).items():
            coeffs[f] = coeffs.get(f, 0) + sg
        for f, sg in F.path_from_root(h).items():
            coeffs[f] = coeffs.get(f, 0) - sg
        raise HypothesisFails(f"cycle through edge {e} has profile outside the lattice", Chain1(coeffs))
    return GraphMorphism(
        G, target.graph, vid, vid[G.tails] * n + cols, np.ones(G.n_edges, dtype=np.int64)
    )


def hat(X: AlbaneseGraph | ColoredGraph, factor: int) -> Refinement:
    """Uniform refinement: every edge becomes a path of ``factor`` edges."""
    G = X.graph if isinstance(X, AlbaneseGraph) else X
    if factor < 1:
        raise InvalidParams("refinement factor must be >= 1")
    return refine(G, int(factor))


def _homotopy_coordinates(P: np.ndarray, f: int) -> np.ndarray:
    """Per-coordinate two-piece map on points of the f-times-scaled refinement.

    A point x of the refined torus has scaled coordinates P = f * x. Writing
    x = f*q + t with t in [0, f), the map sends t to f*t on [0, 1] and to f on
    [1, f]; the image is the integer point returned here.
    """
    q, m = np.divmod(P, f * f)
    return np.where(m <= f, f * q + m, f * (q + 1))


def _refined_points(alb: AlbaneseGraph, R: Refinement) -> np.ndarray:
    """Scaled coordinates of the tail of every refined edge."""
    f = int(R.counts[0]) if R.counts.size else 1
    par = R.parent
    s = alb.graph.edge_colors[par]
    P = f * alb.vertex_reps[alb.graph.tails[par]]
    P[np.arange(par.size), s] += R.position
    return P


def homotopy_pushforward(alb: AlbaneseGraph, refinement: Refinement | None = None) -> GraphMorphism:
    """Graph map H from hat(Alb_{l^r, l^j}) (refined by l^j) to Alb_{l^r, l^j}.

    Its image lies in the embedded copy of hat(Alb_{l^(r-j), 1}) (see
    ``hat_embedding``). For j = 0 it is the identity.
    """
    f = alb.ell**alb.j
    R = refinement or hat(alb, f)
    if R.source is not alb.graph and R.source != alb.graph:
        raise InconsistentParams("refinement is not of this Albanese graph")
    if R.counts.size and np.any(R.counts != f):
        raise InconsistentParams(f"expected a uniform refinement by {f}")
    n = alb.n_colors
    P = _refined_points(alb, R)
    img = _homotopy_coordinates(P, f)
    tail_vid = alb.vertices_of(img)
    s = alb.graph.edge_colors[R.parent]
    ms = np.mod(P[np.arange(P.shape[0]), s], f * f)
    live = ms + 1 <= f
    edge_map = np.where(live, tail_vid * n + s, -1)
    vmap = np.full(R.graph.n_vertices, -1, dtype=np.int64)
    vmap[R.graph.tails] = tail_vid
    return GraphMorphism(R.graph, alb.graph, vmap, edge_map, live.astype(np.int64))


def hat_embedding(low: AlbaneseGraph, high: AlbaneseGraph) -> tuple[Refinement, GraphMorphism]:
    """Embedding iota of hat(Alb_{l^b, l^a}) into Alb_{l^(b+j), l^(a+j)}.

    A vertex x goes to l^j x and sub-edge k of the s-edge at x goes to the
    s-edge at l^j x + k e_s.
    """
    ell = low.ell
    jj = high.j - low.j
    if high.ell != ell or jj < 0 or high.r - low.r != jj or low.matroid.ground != high.matroid.ground:
        raise InconsistentParams(f"cannot embed {low.params} into {high.params}")
    f = ell**jj
    R = hat(low, f)
    P = _refined_points(low, R)
    vid = high.vertices_of(P)
    s = low.graph.edge_colors[R.parent]
    n = low.n_colors
    vmap = np.full(R.graph.n_vertices, -1, dtype=np.int64)
    vmap[R.graph.tails] = vid
    return R, GraphMorphism(R.graph, high.graph, vmap, vid * n + s, np.ones(vid.size, dtype=np.int64))
