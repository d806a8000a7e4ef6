"""Regular matroids carried by totally unimodular integer matrices.

A ``Matroid`` holds a g x n matrix ``A`` of full row rank whose rows span the
lattice U inside Z^S (S = ground set, one column per element). Minors,
duals and standard forms are all produced by unimodular pivoting, so the
row lattice is always the one the construction calls for and total
unimodularity is preserved.

Because every realization here is TU, ranks of column subsets agree over Q
and over any prime field; they are computed over F_2 on bitmasks.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .colored_graph import ColoredGraph, h1_basis
from .linalg import rank_q

TU_MAX_COLUMNS = 12
ISO_MAX_ELEMENTS = 16
COGRAPHIC_MAX_ELEMENTS = 14


class MatroidError(ValueError):
    pass


class NotTU(MatroidError):
    def __init__(self, rows: Sequence[int], cols: Sequence[int], det: int):
        self.rows, self.cols, self.det = tuple(rows), tuple(cols), det
        super().__init__(f"submatrix rows={list(rows)} cols={list(cols)} has determinant {det}")


class RankDeficient(MatroidError):
    pass


class LoopElement(MatroidError):
    pass


class LoopContraction(LoopElement):
    pass


class UnknownElement(MatroidError, KeyError):
    pass


class GroundSetTooLarge(MatroidError):
    pass


class UnknownName(MatroidError, KeyError):
    pass


@dataclass(frozen=True, eq=False)
class Matroid:
    """A regular matroid with ground set ``ground`` realized by the rows of ``A``."""

    name: str
    ground: tuple[str, ...]
    A: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=np.int64, copy=True)
        if A.ndim == 1:
            A = A.reshape(0 if A.size == 0 else 1, -1)
        ground = tuple(str(x) for x in self.ground)
        if A.shape[1] != len(ground) and not (A.size == 0 and A.shape[0] == 0):
            raise MatroidError(f"{A.shape[1]} columns but {len(ground)} labels")
        if A.shape[0] == 0:
            A = np.zeros((0, len(ground)), dtype=np.int64)
        if len(set(ground)) != len(ground):
            raise MatroidError("ground labels must be unique")
        A.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "ground", ground)

    # -- basic data ------------------------------------------------------
    @property
    def rank(self) -> int:
        return int(self.A.shape[0])

    @property
    def n(self) -> int:
        return len(self.ground)

    def __len__(self):
        return self.n

    def index(self, label) -> int:
        try:
            return self.ground.index(str(label))
        except ValueError:
            raise UnknownElement(label) from None

    def column(self, label) -> np.ndarray:
        return self.A[:, self.index(label)]

    def __repr__(self):
        return f"Matroid({self.name!r}, rank={self.rank}, n={self.n})"

    def __eq__(self, other):
        if not isinstance(other, Matroid):
            return NotImplemented
        return self.ground == other.ground and np.array_equal(self.A, other.A)

    __hash__ = None

    def renamed(self, name: str) -> "Matroid":
        return Matroid(name, self.ground, self.A)

    def relabeled(self, mapping: Mapping[str, str] | Sequence[str]) -> "Matroid":
        if isinstance(mapping, Mapping):
            labels = [mapping.get(x, x) for x in self.ground]
        else:
            labels = list(mapping)
        return Matroid(self.name, labels, self.A)

    def with_signs(self, row_signs=None, col_signs=None) -> "Matroid":
        """Same matroid, realization with rows / columns multiplied by +-1."""
        A = self.A.copy()
        if row_signs is not None:
            A = A * np.asarray(row_signs, dtype=np.int64)[:, None]
        if col_signs is not None:
            A = A * np.asarray(col_signs, dtype=np.int64)[None, :]
        return Matroid(self.name, self.ground, A)

    def restrict_columns(self, labels: Sequence[str]) -> "Matroid":
        idx = [self.index(x) for x in labels]
        return Matroid(self.name, [self.ground[i] for i in idx], self.A[:, idx])

    # -- serialisation ---------------------------------------------------
    def to_json(self) -> dict:
        return {"name": self.name, "ground": list(self.ground), "matrix": self.A.tolist()}

    @classmethod
    def from_json(cls, data: Mapping, check: bool = True) -> "Matroid":
        matrix = data["matrix"]
        ground = data.get("ground") or [str(i) for i in range(len(matrix[0]) if matrix else 0)]
        if check:
            return validate(matrix, ground=ground, name=data.get("name", ""))
        return cls(data.get("name", ""), ground, matrix)

    def content_hash(self) -> str:
        payload = json.dumps({"ground": list(self.ground), "matrix": self.A.tolist()}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    # -- combinatorics on bitmasks --------------------------------------
    @cached_property
    def _colmasks(self) -> tuple[int, ...]:
        out = []
        for j in range(self.n):
            m = 0
            for i in range(self.rank):
                if self.A[i, j] & 1:
                    m |= 1 << i
            out.append(m)
        return tuple(out)

    def rank_of(self, subset: int | Iterable) -> int:
        """Rank of a set of elements (bitmask over positions, or labels)."""
        if not isinstance(subset, int):
            mask = 0
            for x in subset:
                mask |= 1 << (x if isinstance(x, (int, np.integer)) else self.index(x))
            subset = mask
        basis: list[int] = []
        cols = self._colmasks
        j = 0
        while subset:
            if subset & 1:
                v = cols[j]
                for b in basis:
                    v = min(v, v ^ b)
                if v:
                    basis.append(v)
                    basis.sort(reverse=True)
            subset >>= 1
            j += 1
        return len(basis)

    def is_independent(self, subset) -> bool:
        subset = list(subset)
        return self.rank_of(subset) == len(subset)

    @cached_property
    def bases(self) -> tuple[frozenset[int], ...]:
        g = self.rank
        return tuple(
            frozenset(c)
            for c in itertools.combinations(range(self.n), g)
            if self.rank_of(sum(1 << i for i in c)) == g
        )

    @cached_property
    def circuits(self) -> tuple[frozenset[int], ...]:
        """All circuits, as sets of element positions."""
        found: list[int] = []
        for k in range(1, self.rank + 2):
            for c in itertools.combinations(range(self.n), k):
                mask = sum(1 << i for i in c)
                if any(f & mask == f for f in found):
                    continue
                if self.rank_of(mask) == k - 1:
                    found.append(mask)
        return tuple(frozenset(i for i in range(self.n) if m >> i & 1) for m in found)

    def loops(self) -> list[str]:
        return [self.ground[j] for j in range(self.n) if not self.A[:, j].any()]

    def coloops(self) -> list[str]:
        return [self.ground[j] for j in range(self.n) if self.rank_of(((1 << self.n) - 1) & ~(1 << j)) < self.rank]

    def is_loopless(self) -> bool:
        return not self.loops()


# -- construction and validation ------------------------------------------


def _check_entries(A: np.ndarray):
    bad = np.argwhere(np.abs(A) > 1)
    if bad.size:
        i, j = (int(x) for x in bad[0])
        raise NotTU([i], [j], int(A[i, j]))


def check_tu(A) -> None:
    """Exhaustive check that every square submatrix has determinant in {0, +-1}."""
    A = np.asarray(A, dtype=np.int64)
    g, n = A.shape
    if min(g, n) > 0 and max(g, n) > TU_MAX_COLUMNS and min(g, n) > 1:
        raise GroundSetTooLarge(f"exhaustive TU check is limited to {TU_MAX_COLUMNS} columns")
    _check_entries(A)
    Af = A.astype(np.float64)
    for k in range(2, min(g, n) + 1):
        col_sets = np.array(list(itertools.combinations(range(n), k)), dtype=np.intp)
        for rows in itertools.combinations(range(g), k):
            sub = Af[list(rows)][:, col_sets]  # (k, m, k)
            dets = np.rint(np.linalg.det(np.transpose(sub, (1, 0, 2))))
            bad = np.flatnonzero(np.abs(dets) > 1)
            if bad.size:
                cols = col_sets[bad[0]]
                raise NotTU(rows, [int(c) for c in cols], int(dets[bad[0]]))


def validate(A, ground: Sequence[str] | None = None, name: str = "") -> Matroid:
    """Wrap ``A`` as a matroid after checking full row rank and total unimodularity."""
    A = np.asarray(A)
    if A.dtype == object or not np.issubdtype(A.dtype, np.integer):
        if not np.all(np.asarray(A, dtype=float) == np.rint(np.asarray(A, dtype=float))):
            raise MatroidError("realization entries must be integers")
    A = np.asarray(A, dtype=np.int64)
    if A.ndim != 2 or A.size == 0:
        raise MatroidError("realization must be a non-empty 2-d integer matrix")
    if ground is None:
        ground = [str(i) for i in range(A.shape[1])]
    r = rank_q(A.tolist())
    if r != A.shape[0]:
        raise RankDeficient(f"rank {r} but {A.shape[0]} rows")
    check_tu(A)
    return Matroid(name, ground, A)


def _pivot(A: np.ndarray, i: int, j: int) -> np.ndarray:
    """Clear column j with row i (A[i, j] = +-1); row i keeps its sign."""
    A = A.copy()
    p = int(A[i, j])
    if p not in (1, -1):
        raise MatroidError(f"pivot entry {p} is not a unit")
    for k in np.flatnonzero(A[:, j]):
        if k != i:
            A[k] -= A[k, j] * p * A[i]
    return A


def standard_form(A) -> tuple[np.ndarray, list[int]]:
    """Unimodular row reduction of a TU matrix to (I | D) on pivot columns.

    Returns the reduced matrix with zero rows removed and the pivot columns;
    row ``k`` has a +1 in pivot column ``pivots[k]``.
    """
    A = np.asarray(A, dtype=np.int64).copy()
    g, n = A.shape
    pivots: list[int] = []
    r = 0
    for j in range(n):
        if r == g:
            break
        nz = np.flatnonzero(A[r:, j])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        A[[r, i]] = A[[i, r]]
        if A[r, j] < 0:
            A[r] = -A[r]
        A = _pivot(A, r, j)
        pivots.append(j)
        r += 1
    return A[:r], pivots


def delete(M: Matroid, s) -> Matroid:
    """Deletion M \\ s; the row lattice is the projection of U to S - {s}."""
    j = M.index(s)
    keep = [k for k in range(M.n) if k != j]
    A = M.A[:, keep]
    ground = [M.ground[k] for k in keep]
    if M.rank_of(sum(1 << k for k in keep)) < M.rank:
        A, _ = standard_form(A)
    return Matroid(_minor_name(M.name, "d", s), ground, A)


def contract(M: Matroid, s) -> Matroid:
    """Contraction M / s; the row lattice is {u in U : u_s = 0} restricted to S - {s}."""
    j = M.index(s)
    rows = np.flatnonzero(M.A[:, j])
    if rows.size == 0:
        raise LoopContraction(f"cannot contract the loop {s!r}")
    i = int(rows[0])
    A = _pivot(M.A, i, j)
    keep_rows = [k for k in range(M.rank) if k != i]
    keep = [k for k in range(M.n) if k != j]
    return Matroid(
        _minor_name(M.name, "c", s), [M.ground[k] for k in keep], A[np.ix_(keep_rows, keep)]
    )


def _minor_name(name: str, op: str, s) -> str:
    return f"{name}/{s}" if op == "c" else f"{name}\\{s}"


def dual(M: Matroid) -> Matroid:
    """Dual matroid realized by (-D^T | I) for a standard form (I | D)."""
    S, pivots = standard_form(M.A)
    nonpivots = [j for j in range(M.n) if j not in pivots]
    D = S[:, nonpivots]
    A = np.zeros((len(nonpivots), M.n), dtype=np.int64)
    A[:, pivots] = -D.T
    A[:, nonpivots] = np.eye(len(nonpivots), dtype=np.int64)
    return Matroid(f"{M.name}*" if M.name else "", M.ground, A)


def find_unit_covector(M: Matroid, s) -> np.ndarray:
    """A vector of U (integer combination of rows) whose s-coordinate is 1."""
    j = M.index(s)
    rows = np.flatnonzero(M.A[:, j])
    if rows.size == 0:
        raise LoopElement(f"{s!r} is a loop")
    i = int(rows[0])
    return M.A[i] * int(M.A[i, j])


def normalize_signs(M: Matroid) -> Matroid:
    """Canonical representative under row and column sign changes.

    Walk a BFS spanning forest of the bipartite support graph (rows before
    columns, lowest index first) and flip signs so every forest entry is +1.
    Two realizations with the same support that differ by sign changes give
    the same output.
    """
    g, n = M.A.shape
    sign = np.zeros(g + n, dtype=np.int64)
    for root in range(g + n):
        if sign[root]:
            continue
        sign[root] = 1
        queue = [root]
        while queue:
            nxt = []
            for node in queue:
                if node < g:
                    nbrs = [(g + j, int(M.A[node, j])) for j in np.flatnonzero(M.A[node])]
                else:
                    j = node - g
                    nbrs = [(int(i), int(M.A[i, j])) for i in np.flatnonzero(M.A[:, j])]
                for other, a in nbrs:
                    if not sign[other]:
                        sign[other] = sign[node] * a
                        nxt.append(other)
            queue = nxt
    A = M.A * sign[:g, None] * sign[None, g:]
    return Matroid(M.name, M.ground, A)


# -- graphs -----------------------------------------------------------------


def _edge_labels(edges, labels):
    if labels is None:
        # parallel edges get a ".k" suffix from their second occurrence on
        seen: Counter = Counter()
        out = []
        for u, v in edges:
            base = f"{u}-{v}"
            out.append(base if not seen[base] else f"{base}.{seen[base]}")
            seen[base] += 1
        return out
    return [str(x) for x in labels]


def graphic(
    edges: Sequence[tuple[int, int]],
    n_vertices: int | None = None,
    labels: Sequence[str] | None = None,
    name: str = "",
) -> Matroid:
    """Cycle matroid M(G): signed incidence matrix minus one row per component."""
    edges = [(int(u), int(v)) for u, v in edges]
    if n_vertices is None:
        n_vertices = 1 + max((max(e) for e in edges), default=-1)
    G = ColoredGraph.from_edges(n_vertices, [(u, v, None) for u, v in edges], [])
    B = G.boundary_matrix()
    roots = set(G.spanning_forest().roots)
    rows = [v for v in range(n_vertices) if v not in roots]
    return Matroid(name, _edge_labels(edges, labels), B[rows])


def cographic(
    edges: Sequence[tuple[int, int]],
    n_vertices: int | None = None,
    labels: Sequence[str] | None = None,
    name: str = "",
) -> Matroid:
    """Bond matroid M*(G): rows are the fundamental cycles of a spanning forest."""
    edges = [(int(u), int(v)) for u, v in edges]
    if n_vertices is None:
        n_vertices = 1 + max((max(e) for e in edges), default=-1)
    G = ColoredGraph.from_edges(n_vertices, [(u, v, None) for u, v in edges], [])
    H = h1_basis(G)
    A = H.matrix(G.n_edges)
    return Matroid(name, _edge_labels(edges, labels), A)


# -- minors -----------------------------------------------------------------


@dataclass(frozen=True)
class Delete:
    label: str

    def apply(self, M: Matroid) -> Matroid:
        return delete(M, self.label)

    def to_json(self):
        return {"op": "delete", "label": self.label}


@dataclass(frozen=True)
class Contract:
    label: str

    def apply(self, M: Matroid) -> Matroid:
        return contract(M, self.label)

    def to_json(self):
        return {"op": "contract", "label": self.label}


@dataclass(frozen=True)
class MinorTrace:
    ops: tuple = ()

    def apply(self, M: Matroid) -> Matroid:
        for op in self.ops:
            M = op.apply(M)
        return M

    def __len__(self):
        return len(self.ops)

    def to_json(self) -> list:
        return [op.to_json() for op in self.ops]

    @classmethod
    def from_json(cls, data) -> "MinorTrace":
        kinds = {"delete": Delete, "contract": Contract}
        return cls(tuple(kinds[d["op"]](str(d["label"])) for d in data))


def minor(M: Matroid, contract_set: Iterable = (), delete_set: Iterable = ()) -> Matroid:
    for s in contract_set:
        M = contract(M, s)
    for s in delete_set:
        M = delete(M, s)
    return M


# -- isomorphism ------------------------------------------------------------


def _element_invariants(M: Matroid) -> list[tuple]:
    per = [Counter() for _ in range(M.n)]
    for c in M.circuits:
        for i in c:
            per[i][len(c)] += 1
    in_bases = Counter(i for b in M.bases for i in b)
    return [(in_bases[i], tuple(sorted(per[i].items()))) for i in range(M.n)]


def _global_invariants(M: Matroid) -> tuple:
    return (
        M.n,
        M.rank,
        len(M.bases),
        tuple(sorted(Counter(len(c) for c in M.circuits).items())),
    )


def find_isomorphism(M1: Matroid, M2: Matroid) -> dict[str, str] | None:
    """A bijection of ground sets carrying circuits to circuits, or None."""
    if max(M1.n, M2.n) > ISO_MAX_ELEMENTS:
        raise GroundSetTooLarge(f"isomorphism search is limited to {ISO_MAX_ELEMENTS} elements")
    if M1.n != M2.n or M1.rank != M2.rank:
        return None
    if len(M1.bases) != len(M2.bases) or _global_invariants(M1) != _global_invariants(M2):
        return None
    inv1, inv2 = _element_invariants(M1), _element_invariants(M2)
    if sorted(inv1) != sorted(inv2):
        return None
    n = M1.n
    circ2 = {frozenset(c) for c in M2.circuits}
    # circuits of M1 indexed by their largest element in the search order
    rarity = Counter(inv1)
    order = sorted(range(n), key=lambda i: (rarity[inv1[i]], inv1[i], i))
    pos = {x: k for k, x in enumerate(order)}
    closing: list[list[frozenset[int]]] = [[] for _ in range(n)]
    for c in M1.circuits:
        closing[max(pos[i] for i in c)].append(c)
    phi = [-1] * n
    used = [False] * n

    def extend(k: int) -> bool:
        if k == n:
            return True
        x = order[k]
        for y in range(n):
            if used[y] or inv2[y] != inv1[x]:
                continue
            phi[x] = y
            if all(frozenset(phi[i] for i in c) in circ2 for c in closing[k]):
                used[y] = True
                if extend(k + 1):
                    return True
                used[y] = False
            phi[x] = -1
        return False

    if not extend(0):
        return None
    return {M1.ground[i]: M2.ground[phi[i]] for i in range(n)}


def is_isomorphic(M1: Matroid, M2: Matroid) -> bool:
    return find_isomorphism(M1, M2) is not None


# -- catalog ------------------------------------------------------------------

K5_EDGES = [(u, v) for u in range(5) for v in range(u + 1, 5)]
K33_EDGES = [(u, v) for u in range(3) for v in range(3, 6)]
# Standard form (I_5 | D) of R10: D is the circulant with rows (-1,1,0,0,1).
R10_D = [
    [-1, 1, 0, 0, 1],
    [1, -1, 1, 0, 0],
    [0, 1, -1, 1, 0],
    [0, 0, 1, -1, 1],
    [1, 0, 0, 1, -1],
]

_ALIASES = {"k5": "K5", "k33": "K33", "k3,3": "K33", "k_33": "K33", "k_{3,3}": "K33", "r10": "R10"}


def canonical_name(name: str) -> str:
    key = name.strip().lower().replace(" ", "")
    if key not in _ALIASES:
        raise UnknownName(name)
    return _ALIASES[key]


@lru_cache(maxsize=None)
def _catalog(name: str) -> Matroid:
    if name == "K5":
        return graphic(K5_EDGES, 5, name="K5")
    if name == "K33":
        return graphic(K33_EDGES, 6, name="K33")
    A = np.hstack([np.eye(5, dtype=np.int64), np.array(R10_D, dtype=np.int64)])
    ground = [f"e{i}" for i in range(10)]
    M = validate(A, ground, name="R10")
    k33 = _catalog("K33")
    for s in M.ground:
        if not is_isomorphic(delete(M, s), k33):
            raise MatroidError(f"R10 certification failed: deletion of {s} is not M(K3,3)")
    return M


def catalog(name: str) -> Matroid:
    """``"K5"``, ``"K33"`` (alias ``"K3,3"``) or ``"R10"``, case-insensitive."""
    return _catalog(canonical_name(name))


CATALOG_NAMES = ("K5", "K33", "R10")


# -- cographicity -----------------------------------------------------------


@dataclass(frozen=True)
class CographicResult:
    cographic: bool
    witness: MinorTrace | None = None
    excluded: str | None = None

    def __bool__(self):
        return self.cographic


def _simple(M: Matroid) -> bool:
    if not M.is_loopless():
        return False
    seen = set()
    for j in range(M.n):
        col = M.A[:, j]
        nz = np.flatnonzero(col)
        key = tuple(col * int(col[nz[0]]))
        if key in seen:
            return False
        seen.add(key)
    return True


def _minor_candidates(M: Matroid, target: Matroid):
    g, n = M.rank, M.n
    nc = g - target.rank
    nd = n - target.n - nc
    if nc < 0 or nd < 0:
        return
    for C in itertools.combinations(range(n), nc):
        if M.rank_of(sum(1 << i for i in C)) != nc:
            continue
        rest = [i for i in range(n) if i not in C]
        for D in itertools.combinations(rest, nd):
            keep = [i for i in rest if i not in D]
            # rank(M/C\\D) = rank(C u keep) - |C| must equal the target rank
            if M.rank_of(sum(1 << i for i in keep) | sum(1 << i for i in C)) != g:
                continue
            yield [M.ground[i] for i in C], [M.ground[i] for i in D]


def is_cographic(M: Matroid, threads: int = 1) -> CographicResult:
    """Tutte: a regular matroid is cographic iff it has no M(K5) or M(K3,3) minor."""
    if M.n > COGRAPHIC_MAX_ELEMENTS:
        raise GroundSetTooLarge(f"excluded-minor search is limited to {COGRAPHIC_MAX_ELEMENTS} elements")
    targets = [catalog("K5"), catalog("K33")]
    for target in targets:
        key = _global_invariants(target)

        def check(cd):
            C, D = cd
            N = minor(M, C, D)
            if N.rank != target.rank or not _simple(N):
                return None
            if _global_invariants(N) != key:
                return None
            if is_isomorphic(N, target):
                return MinorTrace(tuple(Contract(c) for c in C) + tuple(Delete(d) for d in D))
            return None

        candidates = _minor_candidates(M, target)
        if threads > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=threads) as pool:
                for trace in pool.map(check, candidates):
                    if trace is not None:
                        return CographicResult(False, trace, target.name)
        else:
            for cd in candidates:
                trace = check(cd)
                if trace is not None:
                    return CographicResult(False, trace, target.name)
    return CographicResult(True)
