"""Oriented multigraphs with coloured edges, 1-chains and graph morphisms.

Vertices are ``0..V-1``; edges are ``0..E-1`` and their position is their
stable id. Each edge stores the index of its colour in ``colors`` or
``COLORLESS`` (-1). Chains are sparse maps ``edge id -> coefficient`` over
either a residue ring ``Z/l^r`` or exact rationals (``ring=None``).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .ring import ResidueRing, format_rational, parse_rational, parse_ring, to_residue

COLORLESS = -1


class GraphError(ValueError):
    pass


class UnknownEdge(GraphError, KeyError):
    pass


class ColorlessEdgeInChain(GraphError):
    pass


class MissingWeight(GraphError, KeyError):
    pass


class NotAMorphism(GraphError):
    pass


class ColoredGraph:
    """Finite oriented multigraph whose edges carry colours from ``colors``."""

    __slots__ = ("n_vertices", "colors", "tails", "heads", "edge_colors", "_color_index")

    def __init__(
        self,
        n_vertices: int,
        tails: Sequence[int],
        heads: Sequence[int],
        edge_colors: Sequence[int],
        colors: Sequence[str],
    ):
        self.n_vertices = int(n_vertices)
        self.colors = tuple(str(c) for c in colors)
        self.tails = np.asarray(tails, dtype=np.int64).reshape(-1)
        self.heads = np.asarray(heads, dtype=np.int64).reshape(-1)
        self.edge_colors = np.asarray(edge_colors, dtype=np.int64).reshape(-1)
        m = self.tails.size
        if self.heads.size != m or self.edge_colors.size != m:
            raise GraphError("tails, heads and colours must have equal length")
        if len(set(self.colors)) != len(self.colors):
            raise GraphError("colour labels must be unique")
        if m and (
            min(self.tails.min(), self.heads.min()) < 0
            or max(self.tails.max(), self.heads.max()) >= self.n_vertices
        ):
            raise GraphError("edge endpoint out of range")
        if m and (self.edge_colors.min() < COLORLESS or self.edge_colors.max() >= len(self.colors)):
            raise GraphError("edge colour out of range")
        for arr in (self.tails, self.heads, self.edge_colors):
            arr.flags.writeable = False
        self._color_index = {c: i for i, c in enumerate(self.colors)}

    @classmethod
    def from_edges(
        cls, n_vertices: int, edges: Iterable[tuple[int, int, Any]], colors: Sequence[str]
    ) -> "ColoredGraph":
        """Build from ``(tail, head, colour)`` triples; colour is a label or None."""
        colors = tuple(str(c) for c in colors)
        index = {c: i for i, c in enumerate(colors)}
        t, h, c = [], [], []
        for tail, head, col in edges:
            t.append(tail)
            h.append(head)
            if col is None:
                c.append(COLORLESS)
            elif str(col) in index:
                c.append(index[str(col)])
            else:
                raise GraphError(f"colour {col!r} is not in the colour set")
        return cls(n_vertices, t, h, c, colors)

    @property
    def n_edges(self) -> int:
        return int(self.tails.size)

    @property
    def n_colors(self) -> int:
        return len(self.colors)

    def color_index(self, label) -> int:
        try:
            return self._color_index[str(label)]
        except KeyError:
            raise GraphError(f"unknown colour {label!r}") from None

    def edge(self, e: int) -> tuple[int, int, int]:
        self._check_edge(e)
        return int(self.tails[e]), int(self.heads[e]), int(self.edge_colors[e])

    def _check_edge(self, e: int):
        if not 0 <= e < self.n_edges:
            raise UnknownEdge(e)

    def edges_of_color(self, s: int) -> np.ndarray:
        return np.flatnonzero(self.edge_colors == s)

    def __repr__(self):
        return f"ColoredGraph(V={self.n_vertices}, E={self.n_edges}, colors={len(self.colors)})"

    def __eq__(self, other):
        if not isinstance(other, ColoredGraph):
            return NotImplemented
        return (
            self.n_vertices == other.n_vertices
            and self.colors == other.colors
            and np.array_equal(self.tails, other.tails)
            and np.array_equal(self.heads, other.heads)
            and np.array_equal(self.edge_colors, other.edge_colors)
        )

    __hash__ = None

    # -- connectivity ---------------------------------------------------
    def adjacency(self) -> list[list[tuple[int, int, int]]]:
        """Per vertex: list of ``(edge, neighbour, sign)``; sign +1 if leaving."""
        adj: list[list[tuple[int, int, int]]] = [[] for _ in range(self.n_vertices)]
        for e in range(self.n_edges):
            t, h = int(self.tails[e]), int(self.heads[e])
            adj[t].append((e, h, 1))
            if t != h:
                adj[h].append((e, t, -1))
        return adj

    def spanning_forest(self, root: int = 0) -> "SpanningForest":
        """BFS forest grown from ``root`` first, then from the lowest unreached vertex."""
        parent_edge = np.full(self.n_vertices, -1, dtype=np.int64)
        parent_sign = np.zeros(self.n_vertices, dtype=np.int64)
        parent = np.full(self.n_vertices, -1, dtype=np.int64)
        component = np.full(self.n_vertices, -1, dtype=np.int64)
        order: list[int] = []
        adj = self.adjacency()
        roots = []
        starts = [root] + [v for v in range(self.n_vertices) if v != root] if self.n_vertices else []
        for start in starts:
            if component[start] >= 0:
                continue
            cid = len(roots)
            roots.append(start)
            component[start] = cid
            queue = deque([start])
            while queue:
                v = queue.popleft()
                order.append(v)
                for e, w, sign in adj[v]:
                    if component[w] < 0:
                        component[w] = cid
                        parent[w] = v
                        parent_edge[w] = e
                        parent_sign[w] = sign
                        queue.append(w)
        tree = np.zeros(self.n_edges, dtype=bool)
        tree[parent_edge[parent_edge >= 0]] = True
        return SpanningForest(
            roots=tuple(roots),
            component=component,
            parent=parent,
            parent_edge=parent_edge,
            parent_sign=parent_sign,
            order=np.asarray(order, dtype=np.int64),
            tree_mask=tree,
        )

    def n_components(self) -> int:
        return len(self.spanning_forest().roots)

    def is_connected(self) -> bool:
        return self.n_vertices > 0 and self.n_components() == 1

    def boundary_matrix(self) -> np.ndarray:
        """Integer |V| x |E| matrix of the boundary map."""
        B = np.zeros((self.n_vertices, self.n_edges), dtype=np.int64)
        idx = np.arange(self.n_edges)
        np.add.at(B, (self.heads, idx), 1)
        np.add.at(B, (self.tails, idx), -1)
        return B

    # -- serialisation ---------------------------------------------------
    def to_json(self) -> dict:
        return {
            "colors": list(self.colors),
            "vertices": self.n_vertices,
            "edges": [
                {
                    "id": e,
                    "tail": int(self.tails[e]),
                    "head": int(self.heads[e]),
                    "color": None if self.edge_colors[e] < 0 else self.colors[self.edge_colors[e]],
                }
                for e in range(self.n_edges)
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ColoredGraph":
        colors = [str(c) for c in data["colors"]]
        edges = sorted(data["edges"], key=lambda d: int(d["id"]))
        ids = [int(d["id"]) for d in edges]
        if ids != list(range(len(ids))):
            raise GraphError("edge ids must be exactly 0..E-1")
        return cls.from_edges(
            int(data["vertices"]),
            [(int(d["tail"]), int(d["head"]), d.get("color")) for d in edges],
            colors,
        )


@dataclass(frozen=True, eq=False)
class SpanningForest:
    roots: tuple[int, ...]
    component: np.ndarray
    parent: np.ndarray
    parent_edge: np.ndarray
    parent_sign: np.ndarray
    order: np.ndarray
    tree_mask: np.ndarray

    def path_from_root(self, v: int) -> dict[int, int]:
        """Integer chain of tree edges running from the root of ``v`` to ``v``."""
        out: dict[int, int] = {}
        while self.parent[v] >= 0:
            out[int(self.parent_edge[v])] = int(self.parent_sign[v])
            v = int(self.parent[v])
        return out


# -- chains --------------------------------------------------------------


def _normalize(value, ring: ResidueRing | None):
    if ring is not None:
        return to_residue(value, ring.modulus)
    if isinstance(value, (int, np.integer)):
        return int(value)
    q = Fraction(value)
    return q.numerator if q.denominator == 1 else q


@dataclass(frozen=True)
class Chain1:
    """Finitely supported 1-chain; ``ring=None`` means rational coefficients."""

    coeffs: Mapping[int, Any] = field(default_factory=dict)
    ring: ResidueRing | None = None

    def __post_init__(self):
        clean = {}
        for e, x in self.coeffs.items():
            x = _normalize(x, self.ring)
            if x != 0:
                clean[int(e)] = x
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def edge(cls, e: int, coeff=1, ring: ResidueRing | None = None) -> "Chain1":
        return cls({e: coeff}, ring)

    @classmethod
    def from_dense(cls, vec, ring: ResidueRing | None = None) -> "Chain1":
        vec = np.asarray(vec)
        return cls({int(e): vec[e].item() for e in np.flatnonzero(vec)}, ring)

    def to_dense(self, n_edges: int, dtype=np.int64) -> np.ndarray:
        out = np.zeros(n_edges, dtype=dtype if self.ring is not None else object)
        for e, x in self.coeffs.items():
            out[e] = x
        return out

    def support(self) -> list[int]:
        return list(self.coeffs)

    def __getitem__(self, e: int):
        return self.coeffs.get(e, 0)

    def __iter__(self):
        return iter(self.coeffs.items())

    def __len__(self):
        return len(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def _merge(self, other: "Chain1", sign: int) -> "Chain1":
        if self.ring != other.ring:
            raise GraphError(f"cannot combine chains over {self.ring} and {other.ring}")
        out = dict(self.coeffs)
        for e, x in other.coeffs.items():
            out[e] = out.get(e, 0) + sign * x
        return Chain1(out, self.ring)

    def __add__(self, other):
        return self._merge(other, 1)

    def __sub__(self, other):
        return self._merge(other, -1)

    def __neg__(self):
        return Chain1({e: -x for e, x in self.coeffs.items()}, self.ring)

    def scale(self, a) -> "Chain1":
        return Chain1({e: a * x for e, x in self.coeffs.items()}, self.ring)

    def __rmul__(self, a):
        return self.scale(a)

    def change_ring(self, ring: ResidueRing | None) -> "Chain1":
        return Chain1(self.coeffs, ring)

    def to_json(self) -> dict:
        return {
            "ring": self.ring.tag if self.ring is not None else "Q",
            "coeffs": {str(e): format_rational(x) for e, x in self.coeffs.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Chain1":
        tag = data.get("ring", "Q")
        ring = None if tag == "Q" else parse_ring(tag)
        return cls({int(e): parse_rational(x) for e, x in data["coeffs"].items()}, ring)


def boundary(c: Chain1, G: ColoredGraph) -> dict[int, Any]:
    """0-chain ``sum c_e (head(e) - tail(e))``, zero entries dropped."""
    out: dict[int, Any] = {}
    for e, x in c:
        t, h, _ = G.edge(e)
        out[h] = out.get(h, 0) + x
        out[t] = out.get(t, 0) - x
    return {v: y for v, y in sorted(out.items()) if _normalize(y, c.ring) != 0}


def is_closed(c: Chain1, G: ColoredGraph) -> bool:
    return not boundary(c, G)


@dataclass(frozen=True, eq=False)
class H1Basis:
    """Fundamental cycles of a spanning forest (integer coefficients)."""

    cycles: tuple[Chain1, ...]
    forest_edges: tuple[int, ...]
    cycle_edges: tuple[int, ...]

    def __len__(self):
        return len(self.cycles)

    def matrix(self, n_edges: int) -> np.ndarray:
        out = np.zeros((len(self.cycles), n_edges), dtype=np.int64)
        for i, c in enumerate(self.cycles):
            for e, x in c:
                out[i, e] = x
        return out


def h1_basis(G: ColoredGraph) -> H1Basis:
    """Basis of H_1(G, Z) made of the fundamental cycles of a BFS forest.

    The cycle of a non-tree edge ``e`` has coefficient 1 on ``e``, so these
    coordinates expand any closed chain: ``c = sum_e c_e * cycle_e``.
    """
    F = G.spanning_forest()
    cycles = []
    non_tree = [e for e in range(G.n_edges) if not F.tree_mask[e]]
    for e in non_tree:
        t, h, _ = G.edge(e)
        coeffs = {e: 1}
        for f, s in F.path_from_root(t).items():
            coeffs[f] = coeffs.get(f, 0) + s
        for f, s in F.path_from_root(h).items():
            coeffs[f] = coeffs.get(f, 0) - s
        cycles.append(Chain1(coeffs))
    return H1Basis(
        tuple(cycles),
        tuple(int(e) for e in np.flatnonzero(F.tree_mask)),
        tuple(non_tree),
    )


def color_profile(c: Chain1, G: ColoredGraph) -> list:
    """Vector in Λ^S summing the coefficients of each colour."""
    out: list[Any] = [0] * G.n_colors
    for e, x in c:
        s = int(G.edge_colors[e]) if 0 <= e < G.n_edges else None
        if s is None:
            raise UnknownEdge(e)
        if s == COLORLESS:
            raise ColorlessEdgeInChain(f"edge {e} has no colour")
        out[s] = out[s] + x
    return [_normalize(x, c.ring) for x in out]


def weighted_color_profile(c: Chain1, weights: Mapping[int, Any], G: ColoredGraph) -> list:
    """Like ``color_profile`` but edge ``e`` contributes ``weights[e] * c_e``."""
    out: list[Any] = [0] * G.n_colors
    for e, x in c:
        G._check_edge(e)
        s = int(G.edge_colors[e])
        if s == COLORLESS:
            raise ColorlessEdgeInChain(f"edge {e} has no colour")
        if e not in weights:
            raise MissingWeight(e)
        out[s] = out[s] + weights[e] * x
    return [_normalize(x, c.ring) for x in out]


# -- morphisms -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GraphMorphism:
    """Map of coloured graphs.

    ``edge_map[e]`` is the image edge or -1 if ``e`` is contracted;
    ``edge_sign[e]`` is +1 / -1 (0 when contracted).
    """

    source: ColoredGraph
    target: ColoredGraph
    vertex_map: np.ndarray
    edge_map: np.ndarray
    edge_sign: np.ndarray

    def __post_init__(self):
        for name in ("vertex_map", "edge_map", "edge_sign"):
            arr = np.asarray(getattr(self, name), dtype=np.int64).reshape(-1)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def identity(cls, G: ColoredGraph) -> "GraphMorphism":
        return cls(G, G, np.arange(G.n_vertices), np.arange(G.n_edges), np.ones(G.n_edges))

    @classmethod
    def to_point(cls, G: ColoredGraph, target: ColoredGraph | None = None) -> "GraphMorphism":
        """Contract everything onto vertex 0 of ``target`` (a single vertex by default)."""
        target = target or ColoredGraph(1, [], [], [], G.colors)
        return cls(
            G,
            target,
            np.zeros(G.n_vertices),
            np.full(G.n_edges, -1),
            np.zeros(G.n_edges),
        )

    def validate(self) -> "GraphMorphism":
        S, T = self.source, self.target
        if self.vertex_map.size != S.n_vertices or self.edge_map.size != S.n_edges:
            raise NotAMorphism("map sizes do not match the source graph")
        if S.n_vertices and (self.vertex_map.min() < 0 or self.vertex_map.max() >= T.n_vertices):
            raise NotAMorphism("vertex image out of range")
        vt = self.vertex_map[S.tails]
        vh = self.vertex_map[S.heads]
        contracted = self.edge_map < 0
        if np.any(vt[contracted] != vh[contracted]):
            e = int(np.flatnonzero(contracted & (vt != vh))[0])
            raise NotAMorphism(f"contracted edge {e} joins distinct image vertices")
        live = np.flatnonzero(~contracted)
        if live.size == 0:
            return self
        img = self.edge_map[live]
        if img.max() >= T.n_edges:
            raise NotAMorphism("edge image out of range")
        sign = self.edge_sign[live]
        if np.any((sign != 1) & (sign != -1)):
            raise NotAMorphism("edge signs must be +1 or -1")
        tt = np.where(sign == 1, T.tails[img], T.heads[img])
        th = np.where(sign == 1, T.heads[img], T.tails[img])
        bad = (tt != vt[live]) | (th != vh[live])
        if bad.any():
            raise NotAMorphism(f"edge {int(live[np.argmax(bad)])} is not incidence-compatible")
        sc = S.edge_colors[live]
        tc = T.edge_colors[img]
        src_labels = np.array([S.colors[c] if c >= 0 else None for c in sc], dtype=object)
        tgt_labels = np.array([T.colors[c] if c >= 0 else None for c in tc], dtype=object)
        if np.any(src_labels != tgt_labels):
            raise NotAMorphism(f"edge {int(live[np.argmax(src_labels != tgt_labels)])} changes colour")
        return self

    def compose(self, after: "GraphMorphism") -> "GraphMorphism":
        """``after ∘ self``."""
        em = np.full(self.edge_map.size, -1, dtype=np.int64)
        es = np.zeros(self.edge_map.size, dtype=np.int64)
        live = self.edge_map >= 0
        img = self.edge_map[live]
        em[live] = after.edge_map[img]
        es[live] = self.edge_sign[live] * after.edge_sign[img]
        es[em < 0] = 0
        return GraphMorphism(self.source, after.target, after.vertex_map[self.vertex_map], em, es)


def pushforward(f: GraphMorphism, c: Chain1) -> Chain1:
    out: dict[int, Any] = {}
    for e, x in c:
        f.source._check_edge(e)
        img = int(f.edge_map[e])
        if img < 0:
            continue
        out[img] = out.get(img, 0) + int(f.edge_sign[e]) * x
    return Chain1(out, c.ring)


def pushforward_vertices(f: GraphMorphism, z: Mapping[int, Any]) -> dict[int, Any]:
    out: dict[int, Any] = {}
    for v, x in z.items():
        w = int(f.vertex_map[v])
        out[w] = out.get(w, 0) + x
    return {v: x for v, x in sorted(out.items()) if x != 0}


# -- refinement ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Refinement:
    """Result of subdividing each edge into a directed path.

    ``paths[e]`` lists the new edge ids replacing old edge ``e`` (in order
    from tail to head); ``parent`` / ``position`` give the inverse lookup.
    Old vertices keep their ids; inner path vertices are appended.
    """

    source: ColoredGraph
    graph: ColoredGraph
    counts: np.ndarray
    offsets: np.ndarray
    parent: np.ndarray
    position: np.ndarray

    def path(self, e: int) -> range:
        return range(int(self.offsets[e]), int(self.offsets[e + 1]))

    def transfer(self, c: Chain1) -> Chain1:
        """Ξ: an edge goes to the sum of the edges of its path."""
        out: dict[int, Any] = {}
        for e, x in c:
            for f in self.path(e):
                out[f] = x
        return Chain1(out, c.ring)

    __call__ = transfer

    def inner_vertex(self, e: int, k: int) -> int:
        """k-th vertex along the path of ``e`` (0 = tail, counts[e] = head)."""
        n = int(self.counts[e])
        if k == 0:
            return int(self.source.tails[e])
        if k == n:
            return int(self.source.heads[e])
        return int(self.graph.tails[self.offsets[e] + k])


def refine(G: ColoredGraph, counts: Mapping[int, int] | Sequence[int] | int) -> Refinement:
    """Subdivide edge ``e`` into ``counts[e]`` consecutive edges of its colour."""
    m = G.n_edges
    if isinstance(counts, (int, np.integer)):
        cnt = np.full(m, int(counts), dtype=np.int64)
    elif isinstance(counts, Mapping):
        cnt = np.array([int(counts.get(e, 1)) for e in range(m)], dtype=np.int64)
    else:
        cnt = np.asarray(counts, dtype=np.int64).reshape(-1)
        if cnt.size != m:
            raise GraphError("one count per edge required")
    if m and cnt.min() < 1:
        raise GraphError("refinement counts must be >= 1")
    offsets = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(cnt, out=offsets[1:])
    total = int(offsets[-1])
    parent = np.repeat(np.arange(m, dtype=np.int64), cnt)
    position = np.arange(total, dtype=np.int64) - offsets[parent]
    # inner vertex k (1..cnt-1) of edge e gets id V + (offsets[e] - e) + k - 1
    inner_base = G.n_vertices + offsets[:-1] - np.arange(m)
    tails = np.where(position == 0, G.tails[parent], inner_base[parent] + position - 1)
    last = position == cnt[parent] - 1
    heads = np.where(last, G.heads[parent], inner_base[parent] + position)
    n_vertices = G.n_vertices + total - m
    graph = ColoredGraph(n_vertices, tails, heads, G.edge_colors[parent], G.colors)
    return Refinement(G, graph, cnt, offsets, parent, position)


# -- isomorphism of functional coloured graphs ----------------------------


def _color_functions(G: ColoredGraph):
    """Per colour, successor and predecessor arrays (requires in/out degree <= 1)."""
    n, k = G.n_vertices, G.n_colors
    succ = np.full((k, n), -1, dtype=np.int64)
    pred = np.full((k, n), -1, dtype=np.int64)
    out_edge = np.full((k, n), -1, dtype=np.int64)
    for e in range(G.n_edges):
        t, h, s = G.edge(e)
        if s < 0:
            raise GraphError("isomorphism test requires all edges coloured")
        if succ[s, t] >= 0 or pred[s, h] >= 0:
            raise GraphError("isomorphism test requires in/out degree <= 1 per colour")
        succ[s, t], pred[s, h], out_edge[s, t] = h, t, e
    return succ, pred, out_edge


def colored_isomorphism(
    G1: ColoredGraph, G2: ColoredGraph, allow_reversal: bool = True
) -> tuple[np.ndarray, frozenset[str]] | None:
    """Colour-preserving isomorphism between graphs with one in/out edge per colour.

    Returns ``(vertex_map, reversed_colours)`` where edges of the colours in
    ``reversed_colours`` map with reversed orientation, or None.
    """
    if (
        G1.n_vertices != G2.n_vertices
        or G1.n_edges != G2.n_edges
        or set(G1.colors) != set(G2.colors)
        or not G1.is_connected()
    ):
        return None
    perm = [G2.color_index(c) for c in G1.colors]
    s1, p1, _ = _color_functions(G1)
    s2, p2, _ = _color_functions(G2)
    k = G1.n_colors
    flips = range(2**k) if allow_reversal else [0]
    for mask in flips:
        fwd2 = [p2[perm[s]] if mask >> s & 1 else s2[perm[s]] for s in range(k)]
        for start in range(G2.n_vertices):
            phi = np.full(G1.n_vertices, -1, dtype=np.int64)
            phi[0] = start
            queue = deque([0])
            ok = True
            while queue and ok:
                v = queue.popleft()
                for s in range(k):
                    for w1, table in ((s1[s, v], fwd2[s]), (p1[s, v], None)):
                        if w1 < 0:
                            continue
                        if table is None:
                            back = s2[perm[s]] if mask >> s & 1 else p2[perm[s]]
                            w2 = back[phi[v]]
                        else:
                            w2 = table[phi[v]]
                        if w2 < 0:
                            ok = False
                            break
                        if phi[w1] < 0:
                            phi[w1] = w2
                            queue.append(w1)
                        elif phi[w1] != w2:
                            ok = False
                            break
                    if not ok:
                        break
            if ok and np.unique(phi).size == G1.n_vertices:
                # degree counts per colour must also agree for a bijection
                if all(
                    np.array_equal((s1[s] >= 0), ((fwd2[s] >= 0)[phi])) for s in range(k)
                ):
                    rev = frozenset(G1.colors[s] for s in range(k) if mask >> s & 1)
                    return phi, rev
    return None


def dumps(obj) -> str:
    """Deterministic JSON text."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
