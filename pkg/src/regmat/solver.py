"""Solution systems on coloured graphs, indivisibility, and the splitting pipeline.

A solution of a matroid M in an S-coloured graph is a family of chains b_s,
b_s supported on edges of colour s, such that sum_s A[k, s] b_s is closed
for every row k of the realization. Since every edge carries one colour, a
solution is stored as one coefficient per edge.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

import numpy as np

from . import albanese as alb_mod
from .albanese import AlbaneseGraph, InvalidParams, build, hat, hat_embedding, reduce_2_1
from .colored_graph import (
    COLORLESS,
    Chain1,
    ColoredGraph,
    h1_basis,
    is_closed,
    refine,
)
from .linalg import KernelBasis, det_int, left_kernel, matmul_mod, rank_ff, rref_ff, solve_left
from .matroid import (
    Contract,
    Delete,
    LoopContraction,
    LoopElement,
    Matroid,
    catalog,
    contract,
    delete,
)
from .ring import (
    NotLocal,
    ResidueRing,
    ell_valuation,
    format_rational,
    is_prime,
    parse_rational,
    primes_below,
    to_residue,
)

IMAGE_ENUMERATION_LIMIT = 2**24


class SolverError(ValueError):
    pass


class ColorMismatch(SolverError):
    pass


class ImageTooLarge(SolverError):
    pass


class InvalidSolution(SolverError):
    pass


class NotSupportedOnSubgraph(InvalidSolution):
    pass


class SplittingError(SolverError):
    pass


class NotClosed(SplittingError):
    pass


class NotBasis(SplittingError):
    pass


class NotOrthogonal(SplittingError):
    pass


class WrongRestriction(SplittingError):
    pass


class NotMultiple(SplittingError):
    pass


class DivisionUndefined(SplittingError):
    pass


# -- solutions ----------------------------------------------------------------


def _color_positions(graph: ColoredGraph, M: Matroid) -> np.ndarray:
    """For each graph colour, the index of that element in ``M.ground``."""
    if set(graph.colors) != set(M.ground):
        raise ColorMismatch("graph colours and matroid ground set differ")
    return np.array([M.index(c) for c in graph.colors], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Solution:
    """Chains b_s on ``graph`` with coefficients in ``ring``.

    ``values[e]`` is the coefficient of edge e in b_{colour(e)}. ``params``
    records (ell, r, j, reduced) when the host is an Albanese graph.
    """

    matroid: Matroid
    graph: ColoredGraph
    values: np.ndarray
    ring: ResidueRing
    params: Mapping[str, Any] | None = None
    alb: AlbaneseGraph | None = None

    def __post_init__(self):
        v = np.mod(np.asarray(self.values, dtype=np.int64).reshape(-1), self.ring.modulus)
        if v.size != self.graph.n_edges:
            raise InvalidSolution("one coefficient per edge required")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def ell(self) -> int:
        return self.ring.ell

    @property
    def chains(self) -> dict[str, Chain1]:
        out = {}
        for label in self.matroid.ground:
            s = self.graph.color_index(label)
            idx = self.graph.edges_of_color(s)
            out[label] = Chain1({int(e): int(self.values[e]) for e in idx}, self.ring)
        return out

    def profiles(self) -> dict[str, int]:
        """lambda_s(b_s) for every element s, in [0, modulus)."""
        m = self.ring.modulus
        sums = np.zeros(self.graph.n_colors, dtype=np.int64)
        colored = self.graph.edge_colors >= 0
        np.add.at(sums, self.graph.edge_colors[colored], self.values[colored])
        return {c: int(sums[i] % m) for i, c in enumerate(self.graph.colors)}

    def profile_vector(self) -> list[int]:
        p = self.profiles()
        return [p[s] for s in self.matroid.ground]

    def valuations(self) -> dict[str, int]:
        return {s: int(self.ring.valuation(x)) for s, x in self.profiles().items()}

    def indivisibility_exponent(self) -> int:
        """Least i such that no profile is divisible by ell^i."""
        return max(self.valuations().values(), default=0) + 1

    def is_indivisible(self, i: int = 1) -> bool:
        return all(v < i for v in self.valuations().values())

    def closedness_defect(self) -> np.ndarray:
        """(g, V) array: boundary of sum_s A[k, s] b_s, mod the ring modulus."""
        M, G, m = self.matroid, self.graph, self.ring.modulus
        pos = _color_positions(G, M)
        colored = G.edge_colors >= 0
        if np.any(self.values[~colored]):
            raise InvalidSolution("colourless edges must have coefficient 0")
        coeff = np.zeros((M.rank, G.n_edges), dtype=np.int64)
        coeff[:, colored] = M.A[:, pos[G.edge_colors[colored]]] * self.values[colored]
        out = np.zeros((M.rank, G.n_vertices), dtype=np.int64)
        for k in range(M.rank):
            np.add.at(out[k], G.heads, coeff[k])
            np.add.at(out[k], G.tails, -coeff[k])
        return np.mod(out, m)

    def validate(self) -> "Solution":
        defect = self.closedness_defect()
        if defect.any():
            k, v = (int(x) for x in np.argwhere(defect)[0])
            raise InvalidSolution(f"row {k} combination is not closed at vertex {v}")
        return self

    def is_valid(self) -> bool:
        try:
            self.validate()
        except InvalidSolution:
            return False
        return True

    def to_json(self) -> dict:
        chains = {}
        for label, c in self.chains.items():
            chains[label] = {str(e): int(x) for e, x in c}
        return {
            "matroid": self.matroid.name,
            "matroid_hash": self.matroid.content_hash(),
            "realization": self.matroid.to_json(),
            "params": dict(self.params) if self.params else None,
            "ring": self.ring.tag,
            "chains": chains,
            "profiles": self.profiles(),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Solution":
        from .ring import parse_ring

        M = Matroid.from_json(data["realization"], check=False)
        ring = parse_ring(data["ring"])
        params = data.get("params")
        if not params:
            raise InvalidSolution("solution file lacks Albanese parameters")
        alb, graph = host_graph(M, int(params["ell"]), int(params["r"]), int(params["j"]), bool(params.get("reduced")))
        values = np.zeros(graph.n_edges, dtype=np.int64)
        for label, coeffs in data["chains"].items():
            s = graph.color_index(label)
            for e, x in coeffs.items():
                e = int(e)
                if graph.edge_colors[e] != s:
                    raise InvalidSolution(f"edge {e} does not have colour {label}")
                values[e] = int(x)
        return cls(M, graph, values, ring, dict(params), alb).validate()


def host_graph(M: Matroid, ell: int, r: int, j: int, reduced: bool) -> tuple[AlbaneseGraph, ColoredGraph]:
    alb = build(M, ell, r, j)
    if reduced:
        return alb, reduce_2_1(alb).graph
    return alb, alb.graph


def _params(alb: AlbaneseGraph, reduced: bool = False) -> dict:
    return {"ell": alb.ell, "r": alb.r, "j": alb.j, "reduced": reduced}


# -- linear systems -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SolutionSystem:
    """Left-kernel formulation: a row vector y solves iff y @ condition = 0 mod ell."""

    matroid: Matroid
    graph: ColoredGraph
    ell: int
    condition: np.ndarray
    profile: np.ndarray
    params: Mapping[str, Any] | None = None
    alb: AlbaneseGraph | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.condition.shape

    @property
    def augmented_cols(self) -> int:
        return self.condition.shape[1] + self.profile.shape[1]

    def augmented(self) -> np.ndarray:
        return np.hstack([self.condition, self.profile])


def assemble(M: Matroid, host, ell: int) -> SolutionSystem:
    """Condition matrix with entry A[k, colour(e)] * (boundary e)_v at (e, (k, v))."""
    params, alb = None, None
    if isinstance(host, AlbaneseGraph):
        alb, params, graph = host, _params(host), host.graph
    elif isinstance(host, alb_mod.ReducedAlbanese):
        alb, params, graph = host.alb, _params(host.alb, True), host.graph
    else:
        graph = host
    if not is_prime(ell):
        raise InvalidParams(f"{ell} is not prime")
    pos = _color_positions(graph, M)
    E, V, g, n = graph.n_edges, graph.n_vertices, M.rank, M.n
    dtype = np.uint8 if ell < 256 else np.int64
    C = np.zeros((E, g * V), dtype=dtype)
    P = np.zeros((E, n), dtype=dtype)
    colored = np.flatnonzero(graph.edge_colors >= 0)
    s = pos[graph.edge_colors[colored]]
    P[colored, s] = 1
    nonloop = colored[graph.tails[colored] != graph.heads[colored]]
    s_nl = pos[graph.edge_colors[nonloop]]
    for k in range(g):
        a = M.A[k, s_nl]
        C[nonloop, k * V + graph.heads[nonloop]] = np.mod(a, ell)
        C[nonloop, k * V + graph.tails[nonloop]] = np.mod(-a, ell)
    return SolutionSystem(M, graph, ell, C, P, params, alb)


@dataclass(frozen=True, eq=False)
class SolutionSpace:
    system: SolutionSystem
    basis: KernelBasis
    profile_image: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.rank

    @property
    def profile_rank(self) -> int:
        return rank_ff(self.profile_image, self.system.ell) if self.dim else 0

    @property
    def augmented_dim(self) -> int:
        """Dimension of the left kernel of the matrix with profile columns appended."""
        return self.dim - self.profile_rank

    @property
    def augmented_rank_equal(self) -> bool:
        return self.profile_rank == 0

    def solution(self, coeffs) -> Solution:
        y = matmul_mod(np.asarray(coeffs, dtype=np.int64).reshape(1, -1), self.basis.vectors, self.system.ell)
        return _make_solution(self.system, y.reshape(-1))


def _make_solution(sys: SolutionSystem, y) -> Solution:
    return Solution(sys.matroid, sys.graph, y, ResidueRing(sys.ell, 1), sys.params, sys.alb)


def solution_space(sys: SolutionSystem) -> SolutionSpace:
    K = left_kernel(sys.condition, sys.ell)
    Kp = matmul_mod(K.vectors, sys.profile, sys.ell) if K.rank else np.zeros((0, sys.matroid.n), dtype=np.int64)
    return SolutionSpace(sys, K, Kp)


@dataclass(frozen=True, eq=False)
class IndivisibleResult:
    exists: bool
    witness: Solution | None
    image_dim: int
    space: SolutionSpace

    def __bool__(self):
        return self.exists


def _all_nonzero_vector(W: np.ndarray, p: int) -> np.ndarray | None:
    """A vector of the row space of W (rows independent) with no zero coordinate."""
    d, n = W.shape
    if d == 0 or np.any(~W.any(axis=0)):
        return None
    W = W.astype(np.int64)
    if p > n:
        # Avoid the at most n - 1 values of c that kill a coordinate already set.
        w = np.zeros(n, dtype=np.int64)
        for col in range(n):
            if w[col]:
                continue
            row = W[int(np.flatnonzero(W[:, col])[0])]
            for c in range(1, p):
                cand = np.mod(w + c * row, p)
                if cand[col] and np.all(cand[w != 0] != 0):
                    w = cand
                    break
            else:  # pragma: no cover - excluded by the counting argument
                raise SolverError("greedy construction failed")
        return w
    if p**d > IMAGE_ENUMERATION_LIMIT:
        raise ImageTooLarge(f"profile image has {p}^{d} elements")
    chunk = max(1, 2**16 // max(1, p))
    it = itertools.product(range(p), repeat=d)
    while True:
        block = np.array(list(itertools.islice(it, chunk)), dtype=np.int64)
        if block.size == 0:
            return None
        vals = np.mod(block @ W, p)
        hit = np.flatnonzero(np.all(vals != 0, axis=1))
        if hit.size:
            return vals[hit[0]]


def exists_indivisible(sys_or_space, i: int = 1) -> IndivisibleResult:
    """Is there a solution with every colour profile nonzero mod ell?"""
    space = sys_or_space if isinstance(sys_or_space, SolutionSpace) else solution_space(sys_or_space)
    sys = space.system
    if i != 1:
        raise SolverError("over a prime field only i = 1 is meaningful")
    p = sys.ell
    if space.dim == 0:
        return IndivisibleResult(False, None, 0, space)
    R, piv = rref_ff(space.profile_image, p)
    W = R[: len(piv)]
    w = _all_nonzero_vector(W, p)
    if w is None:
        return IndivisibleResult(False, None, len(piv), space)
    x = solve_left(space.profile_image, w, p)
    sol = space.solution(x).validate()
    if not sol.is_indivisible(1):
        raise SolverError("witness construction produced a divisible solution")
    return IndivisibleResult(True, sol, len(piv), space)


# -- membership ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MembershipResult:
    ell: int
    member: bool
    witness: Solution | None
    dim: int
    shape: tuple[int, int]

    def __bool__(self):
        return self.member


def membership_system(M: Matroid, ell: int) -> SolutionSystem:
    alb = build(M, ell, 1, 0)
    host = reduce_2_1(alb) if ell == 2 else alb
    return assemble(M, host, ell)


def membership(M: Matroid, ell: int) -> MembershipResult:
    """Whether M admits an ell-indivisible F_ell-solution in Alb_{ell,1}(M).

    For ell = 2 the reduced Albanese graph is used.
    """
    sys = membership_system(M, ell)
    res = exists_indivisible(sys)
    return MembershipResult(ell, res.exists, res.witness, res.space.dim, sys.shape)


@dataclass(frozen=True)
class DistanceResult:
    distance: int
    memberships: Mapping[int, bool]


def radical_distance(M: Matroid, threads: int = 1) -> DistanceResult:
    """lcm of the primes ell < rank(M) with M outside the class of ell."""
    if not M.is_loopless():
        raise LoopElement(f"matroid has loops: {M.loops()}")
    primes = primes_below(M.rank)
    if threads > 1 and len(primes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            flags = list(pool.map(lambda p: membership(M, p).member, primes))
    else:
        flags = [membership(M, p).member for p in primes]
    members = dict(zip(primes, flags))
    d = 1
    for p, ok in members.items():
        if not ok:
            d = math.lcm(d, p)
    return DistanceResult(d, members)


# -- splittings ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SplittingWitness:
    """A quadratic splitting of level ``level`` of M in a coloured graph.

    ``embedding[k]`` is the closed chain representing row k of M's
    realization; ``complement`` spans a complement U'. With ``weights``
    (edge -> {element: multiplicity}) the witness is in the weighted form
    and is converted by ``normalized()``.
    """

    matroid: Matroid
    graph: ColoredGraph
    embedding: tuple[Chain1, ...]
    complement: tuple[Chain1, ...]
    level: int
    ell: int
    weights: Mapping[int, Mapping[str, int]] | None = None

    def __post_init__(self):
        object.__setattr__(self, "embedding", tuple(Chain1(c.coeffs) for c in self.embedding))
        object.__setattr__(self, "complement", tuple(Chain1(c.coeffs) for c in self.complement))

    def normalized(self) -> "SplittingWitness":
        if self.weights is None:
            return self
        return normalize_weighted(self)

    def to_json(self) -> dict:
        out = {
            "matroid": self.matroid.to_json(),
            "graph": self.graph.to_json(),
            "embedding": [{str(e): format_rational(x) for e, x in c} for c in self.embedding],
            "complement": [{str(e): format_rational(x) for e, x in c} for c in self.complement],
            "level": self.level,
            "ell": self.ell,
        }
        if self.weights is not None:
            out["weights"] = {str(e): dict(w) for e, w in sorted(self.weights.items())}
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "SplittingWitness":
        m = data["matroid"]
        M = catalog(m) if isinstance(m, str) else Matroid.from_json(m, check=False)
        chains = lambda rows: tuple(  # noqa: E731
            Chain1({int(e): parse_rational(x) for e, x in row.items()}) for row in rows
        )
        weights = data.get("weights")
        if weights is not None:
            weights = {int(e): {str(k): int(v) for k, v in w.items()} for e, w in weights.items()}
        return cls(
            M,
            ColoredGraph.from_json(data["graph"]),
            chains(data["embedding"]),
            chains(data.get("complement", [])),
            int(data["level"]),
            int(data["ell"]),
            weights,
        )


def normalize_weighted(w: SplittingWitness) -> SplittingWitness:
    """Turn a weighted splitting into the one-colour-per-edge form.

    Non-loop edges with all weights zero are contracted, loops with all
    weights zero are deleted, and every other edge becomes a path with
    weights[e][s] edges of colour s (in ground-set order).
    """
    G, M = w.graph, w.matroid
    weights = w.weights or {}
    total = {e: sum(int(x) for x in weights.get(e, {}).values()) for e in range(G.n_edges)}
    if any(x < 0 for we in weights.values() for x in we.values()):
        raise SplittingError("weights must be non-negative")
    parent = list(range(G.n_vertices))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in range(G.n_edges):
        t, h, _ = G.edge(e)
        if total[e] == 0 and t != h:
            a, b = find(t), find(h)
            if a != b:
                parent[max(a, b)] = min(a, b)
            else:
                raise SplittingError(f"zero-weight edge {e} closes a cycle of zero-weight edges")
    roots = sorted({find(v) for v in range(G.n_vertices)})
    vid = {r: i for i, r in enumerate(roots)}
    n_vertices = len(roots)
    edges: list[tuple[int, int, str]] = []
    paths: dict[int, list[int]] = {}
    next_vertex = n_vertices
    for e in range(G.n_edges):
        if total[e] == 0:
            continue
        t, h = vid[find(int(G.tails[e]))], vid[find(int(G.heads[e]))]
        colors = [s for s in M.ground for _ in range(int(weights.get(e, {}).get(s, 0)))]
        pts = [t] + list(range(next_vertex, next_vertex + len(colors) - 1)) + [h]
        next_vertex += len(colors) - 1
        paths[e] = []
        for k, s in enumerate(colors):
            paths[e].append(len(edges))
            edges.append((pts[k], pts[k + 1], s))
    graph = ColoredGraph.from_edges(next_vertex, edges, M.ground)

    def move(c: Chain1) -> Chain1:
        out = {}
        for e, x in c:
            for f in paths.get(e, []):
                out[f] = x
        return Chain1(out)

    return SplittingWitness(
        M, graph, tuple(move(c) for c in w.embedding), tuple(move(c) for c in w.complement), w.level, w.ell
    )


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


_CHECK_ERRORS = {
    "colored": SplittingError,
    "shape": SplittingError,
    "local": NotLocal,
    "closed": NotClosed,
    "basis": NotBasis,
    "orthogonal": NotOrthogonal,
    "restriction": WrongRestriction,
}


@dataclass(frozen=True, eq=False)
class SplittingReport:
    witness: SplittingWitness
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self):
        return self.passed

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def raise_if_failed(self) -> "SplittingReport":
        for c in self.checks:
            if not c.passed:
                raise _CHECK_ERRORS[c.name](c.detail)
        return self

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
        }


def _rational_matrix(rows: Sequence[Chain1], n_edges: int) -> np.ndarray:
    X = np.zeros((len(rows), n_edges), dtype=object)
    X[:] = Fraction(0)
    for i, c in enumerate(rows):
        for e, x in c:
            X[i, e] = Fraction(x)
    return X


def _det_rational(T: np.ndarray) -> Fraction:
    if T.shape[0] == 0:
        return Fraction(1)
    scale = Fraction(1)
    rows = []
    for row in T:
        den = math.lcm(*(Fraction(x).denominator for x in row))
        rows.append([int(Fraction(x) * den) for x in row])
        scale /= den
    return det_int(rows) * scale


def verify_splitting(w: SplittingWitness) -> SplittingReport:
    """Check a quadratic splitting exactly over the rationals."""
    w = w.normalized()
    G, M, d, ell = w.graph, w.matroid, w.level, w.ell
    checks: list[Check] = []

    def add(name, ok, detail=""):
        checks.append(Check(name, bool(ok), "" if ok else detail))

    uncolored = np.flatnonzero(G.edge_colors == COLORLESS)
    add("colored", uncolored.size == 0, f"edge {int(uncolored[0])} has no colour" if uncolored.size else "")
    try:
        pos = _color_positions(G, M)
        add("shape", len(w.embedding) == M.rank, f"{len(w.embedding)} embedded rows for rank {M.rank}")
    except ColorMismatch as exc:
        add("shape", False, str(exc))
        return SplittingReport(w, tuple(checks))
    if not checks[-1].passed or not checks[0].passed:
        return SplittingReport(w, tuple(checks))

    rows = list(w.embedding) + list(w.complement)
    bad = [
        (i, e, x)
        for i, c in enumerate(rows)
        for e, x in c
        if ell_valuation(x, ell) < 0 or not 0 <= e < G.n_edges
    ]
    add("local", not bad, f"row {bad[0][0]}, edge {bad[0][1]}: {bad[0][2]}" if bad else "")
    open_rows = [i for i, c in enumerate(rows) if not is_closed(c, G)]
    add("closed", not open_rows, f"row {open_rows[0]} is not closed" if open_rows else "")
    if bad or open_rows:
        return SplittingReport(w, tuple(checks))

    H = h1_basis(G)
    T = _rational_matrix(rows, G.n_edges)[:, list(H.cycle_edges)]
    if T.shape[0] != T.shape[1]:
        add("basis", False, f"{T.shape[0]} rows for first Betti number {T.shape[1]}")
    else:
        det = _det_rational(T)
        add("basis", det != 0 and ell_valuation(det, ell) == 0, f"determinant {det} is not a unit at {ell}")

    X = _rational_matrix(w.embedding, G.n_edges)
    Y = _rational_matrix(w.complement, G.n_edges)
    orth_fail = restr_fail = None
    for s_idx, label in enumerate(G.colors):
        mask = G.edge_colors == s_idx
        Xs, Ys = X[:, mask], Y[:, mask]
        if Ys.shape[0] and orth_fail is None:
            Q = Xs @ Ys.T
            hits = np.argwhere(Q != 0)
            if hits.size:
                a, b = (int(x) for x in hits[0])
                orth_fail = f"Q_{label}(u_{a}, u'_{b}) = {Q[a, b]}"
        if restr_fail is None:
            Q = Xs @ Xs.T
            col = M.A[:, pos[s_idx]].astype(object)
            target = d * np.outer(col, col)
            hits = np.argwhere(Q != target)
            if hits.size:
                a, b = (int(x) for x in hits[0])
                restr_fail = f"Q_{label}(u_{a}, u_{b}) = {Q[a, b]}, expected {target[a, b]}"
    add("orthogonal", orth_fail is None, orth_fail or "")
    add("restriction", restr_fail is None, restr_fail or "")
    return SplittingReport(w, tuple(checks))


@dataclass(frozen=True, eq=False)
class CharacteristicChains:
    weights: Mapping[int, Fraction]
    chains: Mapping[str, Chain1]


def characteristic_chains(w: SplittingWitness) -> CharacteristicChains:
    """Weights a(e) with x_e|U = a(e) y_s, and b_s = sum_{e in E_s} a(e) e."""
    w = w.normalized()
    G, M = w.graph, w.matroid
    pos = _color_positions(G, M)
    X = _rational_matrix(w.embedding, G.n_edges)
    weights: dict[int, Fraction] = {}
    chains: dict[str, dict[int, Fraction]] = {s: {} for s in M.ground}
    for e in range(G.n_edges):
        c = int(G.edge_colors[e])
        if c == COLORLESS:
            raise SplittingError(f"edge {e} has no colour")
        col = M.A[:, pos[c]]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            raise DivisionUndefined(f"element {G.colors[c]} is a loop")
        a = Fraction(X[nz[0], e]) / int(col[nz[0]])
        if any(X[k, e] != a * int(col[k]) for k in range(M.rank)):
            raise NotMultiple(f"x_{e} restricted to U is not a multiple of y_{G.colors[c]}")
        weights[e] = a
        chains[G.colors[c]][e] = a
    out = {s: Chain1(ch) for s, ch in chains.items()}
    for k in range(M.rank):
        combo = Chain1({})
        for s in M.ground:
            combo = combo + out[s].scale(int(M.A[k, M.index(s)]))
        if combo != w.embedding[k]:
            raise NotMultiple(f"characteristic chains do not reproduce row {k}")
    return CharacteristicChains(weights, out)


def glue_components(G: ColoredGraph) -> tuple[ColoredGraph, np.ndarray]:
    """Identify the lowest vertex of every component with vertex 0."""
    F = G.spanning_forest()
    roots = set(F.roots[1:])
    keep = [v for v in range(G.n_vertices) if v not in roots]
    new = np.full(G.n_vertices, -1, dtype=np.int64)
    new[keep] = np.arange(len(keep))
    base = new[F.roots[0]] if F.roots else 0
    for r in roots:
        new[r] = base
    return ColoredGraph(len(keep), new[G.tails], new[G.heads], G.edge_colors, G.colors), new


def splitting_to_solution(w: SplittingWitness, r: int) -> Solution:
    """Solution in Alb_{l^r, l^j}(M), j = v_l(level), with profiles level * e_s mod l^r."""
    w = w.normalized()
    verify_splitting(w).raise_if_failed()
    M, ell, d = w.matroid, w.ell, w.level
    if d <= 0:
        raise SplittingError("level must be a positive integer")
    j = int(ell_valuation(d, ell))
    if r < j + 1:
        raise InvalidParams(f"need r >= j + 1 = {j + 1}")
    cc = characteristic_chains(w)
    m = ell**r
    G, _ = glue_components(w.graph)
    a_hat = [to_residue(cc.weights[e], m) or m for e in range(G.n_edges)]
    R = refine(G, a_hat)
    ring = ResidueRing(ell, r)
    target = build(M, ell, r, j)
    f = alb_mod.alb_map(R.graph, M, ell, r, j, basepoint=0, target=target)
    y = np.zeros(target.graph.n_edges, dtype=np.int64)
    hat_values = np.array([to_residue(cc.weights[int(e)], m) for e in R.parent], dtype=np.int64)
    np.add.at(y, f.edge_map, f.edge_sign * hat_values)
    sol = Solution(M, target.graph, y, ring, _params(target), target).validate()
    prof = sol.profiles()
    for s in M.ground:
        if prof[s] != d % m:
            raise SplittingError(f"profile of b_{s} is {prof[s]}, expected {d % m}")
    return sol


# -- reduction to level (l^(r-j), 1) -------------------------------------------------


@dataclass(frozen=True, eq=False)
class ReductionResult:
    solution: Solution
    input_profiles: Mapping[str, int]
    pushed_profiles: Mapping[str, int]
    input_exponent: int
    guaranteed_exponent: int

    @property
    def profiles_preserved(self) -> bool:
        return dict(self.input_profiles) == dict(self.pushed_profiles)


def _require_alb(sol: Solution) -> AlbaneseGraph:
    if sol.alb is None or (sol.params or {}).get("reduced"):
        raise InvalidSolution("operation needs a solution on a full Albanese graph")
    return sol.alb


def reduce_solution(sol: Solution) -> ReductionResult:
    """Push a solution on Alb_{l^r, l^j} to one on Alb_{l^(r-j), 1}.

    Refine by l^j, push along the homotopy map, pull back through the
    embedded hat(Alb_{l^(r-j),1}) and collapse each subdivided edge. The
    profiles after the homotopy equal the input profiles; the collapsed
    profiles are those divided by l^j, so an l^i-indivisible input gives an
    l^(i-j)-indivisible output.
    """
    sol.validate()
    alb = _require_alb(sol)
    ell, r, j = alb.params
    exp_in = sol.indivisibility_exponent()
    if j == 0:
        prof = sol.profiles()
        return ReductionResult(sol, prof, prof, exp_in, exp_in)
    m = sol.ring.modulus
    f = ell**j
    R = hat(alb, f)
    H = alb_mod.homotopy_pushforward(alb, R)
    y_hat = sol.values[R.parent]
    live = H.edge_map >= 0
    pushed = np.zeros(alb.graph.n_edges, dtype=np.int64)
    np.add.at(pushed, H.edge_map[live], H.edge_sign[live] * y_hat[live])
    pushed = np.mod(pushed, m)
    pushed_sol = Solution(sol.matroid, alb.graph, pushed, sol.ring, sol.params, alb).validate()

    low = build(sol.matroid, ell, r - j, 0)
    Rl, iota = hat_embedding(low, alb)
    in_image = np.zeros(alb.graph.n_edges, dtype=bool)
    in_image[iota.edge_map] = True
    if np.any(pushed[~in_image]):
        raise InvalidSolution("pushed chains leave the embedded refined graph")
    pulled = pushed[iota.edge_map].reshape(low.graph.n_edges, f)
    if np.any(pulled != pulled[:, :1]):
        raise InvalidSolution("pulled-back chains are not constant along subdivided edges")
    out = Solution(sol.matroid, low.graph, pulled[:, 0], sol.ring, _params(low), low).validate()

    prof_in, prof_push, prof_out = sol.profiles(), pushed_sol.profiles(), out.profiles()
    for s in sol.matroid.ground:
        if (f * prof_out[s] - prof_in[s]) % m:
            raise InvalidSolution(f"collapsed profile of {s} is inconsistent")
    return ReductionResult(out, prof_in, prof_push, exp_in, exp_in - j)


# -- minors ----------------------------------------------------------------------------


def lift_reduced(sol: Solution) -> Solution:
    """Solution on the reduced Alb_{2,1} lifted to Alb_{2,1} (lower-to-higher edges only)."""
    if not (sol.params or {}).get("reduced"):
        return sol
    red = reduce_2_1(sol.alb)
    q = red.quotient
    y = np.where(q.edge_sign == 1, sol.values[q.edge_map], 0)
    params = dict(sol.params, reduced=False)
    return Solution(sol.matroid, sol.alb.graph, y, sol.ring, params, sol.alb).validate()


def push_to_reduced(sol: Solution) -> Solution:
    alb = _require_alb(sol)
    red = reduce_2_1(alb)
    q = red.quotient
    y = np.zeros(red.graph.n_edges, dtype=np.int64)
    np.add.at(y, q.edge_map, q.edge_sign * sol.values)
    params = dict(sol.params, reduced=True)
    return Solution(sol.matroid, red.graph, y, sol.ring, params, alb).validate()


def minor_pushforward(sol: Solution, op: Delete | Contract) -> Solution:
    """Transport a solution on Alb_{l^r, l^j}(M) to the same level of a one-step minor."""
    sol = lift_reduced(sol.validate())
    alb = _require_alb(sol)
    M = sol.matroid
    ell, r, j = alb.params
    s = M.index(op.label)
    n = M.n
    G = alb.graph
    colors = G.edge_colors
    if isinstance(op, Delete):
        Mp = delete(M, op.label)
        keep = [k for k in range(n) if k != s]
        target = build(Mp, ell, r, j)
        vmap = target.vertices_of(alb.vertex_reps[:, keep])
    elif isinstance(op, Contract):
        if not M.A[:, s].any():
            raise LoopContraction(f"cannot contract the loop {op.label!r}")
        Mp = contract(M, op.label)
        keep = [k for k in range(n) if k != s]
        target = build(Mp, ell, r, j)
        lifted = np.zeros((target.n_vertices, n), dtype=np.int64)
        lifted[:, keep] = target.vertex_reps
        image = alb.vertices_of(lifted)
        preimage = np.full(alb.n_vertices, -1, dtype=np.int64)
        preimage[image] = np.arange(target.n_vertices)
        vmap = np.full(alb.n_vertices, -1, dtype=np.int64)
        shift = 0
        reps = alb.vertex_reps.copy()
        while np.any(vmap < 0):
            cur = alb.vertices_of(reps)
            todo = (vmap < 0) & (preimage[cur] >= 0)
            vmap[todo] = preimage[cur[todo]]
            reps[:, s] -= 1
            shift += 1
            if shift > alb.ell**alb.r:
                raise NotSupportedOnSubgraph("translates of the embedded minor do not cover the graph")
    else:
        raise TypeError(f"unknown minor operation {op!r}")
    new_color = np.full(n, -1, dtype=np.int64)
    new_color[keep] = np.arange(n - 1)
    on = colors != s
    support = sol.values != 0
    t_img = vmap[G.tails]
    h_img = vmap[G.heads]
    edge_img = t_img * (n - 1) + new_color[colors]
    if isinstance(op, Contract):
        ok = target.graph.heads[np.where(on, edge_img, 0)] == h_img
        if np.any(on & support & ~ok):
            raise NotSupportedOnSubgraph("solution uses edges outside the translated minor graphs")
    y = np.zeros(target.graph.n_edges, dtype=np.int64)
    np.add.at(y, edge_img[on], sol.values[on])
    return Solution(Mp, target.graph, y, sol.ring, _params(target), target).validate()
