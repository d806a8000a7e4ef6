from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from regmat.albanese import build
from regmat.colored_graph import (
    COLORLESS,
    Chain1,
    ColoredGraph,
    ColorlessEdgeInChain,
    GraphError,
    GraphMorphism,
    MissingWeight,
    NotAMorphism,
    boundary,
    color_profile,
    colored_isomorphism,
    h1_basis,
    is_closed,
    pushforward,
    pushforward_vertices,
    refine,
    weighted_color_profile,
)
from regmat.linalg import rank_q
from regmat.matroid import catalog
from regmat.ring import ResidueRing

TRIANGLE = ColoredGraph.from_edges(3, [(0, 1, "a"), (1, 2, "b"), (2, 0, "c")], ["a", "b", "c"])


def test_boundary_examples():
    assert boundary(Chain1.edge(0), TRIANGLE) == {1: 1, 0: -1}
    cycle = Chain1({0: 1, 1: 1, 2: 1})
    assert boundary(cycle, TRIANGLE) == {}
    assert is_closed(cycle, TRIANGLE)


def test_h1_examples():
    tree = ColoredGraph.from_edges(3, [(0, 1, None), (1, 2, None)], [])
    assert len(h1_basis(tree)) == 0
    loop = ColoredGraph.from_edges(1, [(0, 0, None)], [])
    assert len(h1_basis(loop)) == 1
    wedge = build(catalog("K33"), 3, 0, 0).graph
    assert wedge.n_vertices == 1 and len(h1_basis(wedge)) == 9


def test_color_profile_examples():
    assert color_profile(Chain1.edge(1), TRIANGLE) == [0, 1, 0]
    c = Chain1({0: 2, 2: -1})
    assert color_profile(c - c, TRIANGLE) == [0, 0, 0]
    G = ColoredGraph.from_edges(2, [(0, 1, None)], ["a"])
    with pytest.raises(ColorlessEdgeInChain):
        color_profile(Chain1.edge(0), G)


def test_closed_cycles_of_alb_have_profile_in_u_mod_2():
    alb = build(catalog("K33"), 2, 1, 0)
    for cyc in h1_basis(alb.graph).cycles:
        lam = np.array([color_profile(cyc, alb.graph)[alb.graph.color_index(s)] for s in alb.matroid.ground])
        assert alb.lattice.contains(lam)


def test_weighted_profile_examples():
    c = Chain1({0: 1, 1: 3})
    assert weighted_color_profile(c, {0: 1, 1: 1, 2: 1}, TRIANGLE) == color_profile(c, TRIANGLE)
    assert weighted_color_profile(Chain1({}), {}, TRIANGLE) == [0, 0, 0]
    assert weighted_color_profile(c, {0: Fraction(1, 2), 1: 2}, TRIANGLE) == [Fraction(1, 2), 6, 0]
    with pytest.raises(MissingWeight):
        weighted_color_profile(c, {0: 1}, TRIANGLE)


def test_refine_examples():
    R = refine(TRIANGLE, 1)
    assert R.graph == TRIANGLE
    loop = ColoredGraph.from_edges(1, [(0, 0, "a")], ["a"])
    R3 = refine(loop, 3)
    assert (R3.graph.n_vertices, R3.graph.n_edges) == (3, 3)
    assert len(h1_basis(R3.graph)) == 1
    assert is_closed(R3.transfer(Chain1.edge(0)), R3.graph)
    G = build(catalog("K33"), 2, 1, 0).graph
    R2 = refine(G, 2)
    assert R2.graph.n_edges == 2 * G.n_edges
    assert R2.graph.n_vertices == G.n_vertices + G.n_edges


def test_refine_mixed_counts():
    R = refine(TRIANGLE, [1, 2, 3])
    assert R.graph.n_edges == 6
    assert list(R.path(2)) == [3, 4, 5]
    assert R.inner_vertex(2, 1) == 4
    assert R.transfer(Chain1({2: 5})) == Chain1({3: 5, 4: 5, 5: 5})


def test_pushforward_examples():
    c = Chain1({0: 1, 2: 4})
    assert pushforward(GraphMorphism.identity(TRIANGLE), c) == c
    assert pushforward(GraphMorphism.to_point(TRIANGLE), c) == Chain1({})


def test_morphism_validation():
    bad = GraphMorphism(TRIANGLE, TRIANGLE, np.array([0, 1, 2]), np.array([1, 1, 2]), np.array([1, 1, 1]))
    with pytest.raises(NotAMorphism):
        bad.validate()


def test_chain_ring_arithmetic():
    R = ResidueRing(2, 2)
    c = Chain1({0: 3, 1: 5}, R)
    assert (c + c) == Chain1({0: 2, 1: 2}, R)
    assert c.scale(4) == Chain1({}, R)
    assert Chain1.from_json(c.to_json()) == c
    q = Chain1({3: Fraction(1, 3)})
    assert Chain1.from_json(q.to_json()) == q


def test_json_round_trip():
    G = ColoredGraph.from_edges(3, [(0, 1, "a"), (1, 2, None)], ["a", "b"])
    assert ColoredGraph.from_json(G.to_json()) == G


def test_graph_errors():
    with pytest.raises(GraphError):
        ColoredGraph.from_edges(2, [(0, 5, None)], [])
    with pytest.raises(GraphError):
        ColoredGraph.from_edges(2, [(0, 1, "z")], ["a"])


def test_colored_isomorphism_with_reversal():
    # Z/3 with both colours stepping +1, versus colour b stepping -1.
    G = ColoredGraph.from_edges(3, [(v, (v + 1) % 3, s) for v in range(3) for s in "ab"], ["a", "b"])
    H = ColoredGraph.from_edges(3, [(v, (v + d) % 3, s) for v in range(3) for s, d in (("a", 1), ("b", 2))], ["a", "b"])
    assert colored_isomorphism(G, H, allow_reversal=False) is None
    phi, rev = colored_isomorphism(G, H)
    assert rev in (frozenset({"a"}), frozenset({"b"}))  # negation swaps the two choices


# -- random graphs ----------------------------------------------------------------------


@st.composite
def graphs_with_chains(draw):
    n = draw(st.integers(1, 7))
    m = draw(st.integers(0, 12))
    edges = [(draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1)), draw(st.sampled_from("ab"))) for _ in range(m)]
    G = ColoredGraph.from_edges(n, edges, ["a", "b"])
    coeffs = {e: draw(st.integers(-3, 3)) for e in range(m)}
    return G, Chain1(coeffs)


@given(graphs_with_chains())
def test_boundary_linearity(gc):
    G, c = gc
    total: dict[int, int] = {}
    for e, x in c:
        for v, y in boundary(Chain1.edge(e, x), G).items():
            total[v] = total.get(v, 0) + y
    assert boundary(c, G) == {v: y for v, y in sorted(total.items()) if y}


@given(graphs_with_chains())
def test_h1_dimension(gc):
    G, _ = gc
    H = h1_basis(G)
    assert len(H) == G.n_edges - G.n_vertices + G.n_components()
    rank_b = rank_q(G.boundary_matrix()) if G.n_edges else 0
    assert len(H) == G.n_edges - rank_b
    assert all(is_closed(c, G) for c in H.cycles)


@given(graphs_with_chains(), st.integers(1, 4))
def test_refinement_commutes_with_boundary(gc, k):
    G, c = gc
    R = refine(G, k)
    assert boundary(R.transfer(c), R.graph) == boundary(c, G)
    assert len(h1_basis(R.graph)) == len(h1_basis(G))


@given(graphs_with_chains(), st.integers(0, 2**32 - 1))
def test_pushforward_commutes_with_boundary(gc, seed):
    """Random quotient morphism: identify vertices by a random map, contracting some edges."""
    G, c = gc
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, G.n_vertices + 1))
    vmap = rng.integers(0, k, size=G.n_vertices)
    edges, emap, signs = [], [], []
    for e in range(G.n_edges):
        t, h, s = G.edge(e)
        if vmap[t] == vmap[h] and rng.random() < 0.5:
            emap.append(-1)
            signs.append(0)
            continue
        flip = rng.random() < 0.5
        emap.append(len(edges))
        signs.append(-1 if flip else 1)
        a, b = (vmap[h], vmap[t]) if flip else (vmap[t], vmap[h])
        edges.append((int(a), int(b), G.colors[s] if s != COLORLESS else None))
    T = ColoredGraph.from_edges(k, edges, G.colors)
    f = GraphMorphism(G, T, vmap, np.array(emap), np.array(signs)).validate()
    assert boundary(pushforward(f, c), T) == {
        v: y for v, y in sorted(pushforward_vertices(f, boundary(c, G)).items()) if y
    }
