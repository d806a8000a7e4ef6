"""Integer lattices: Hermite normal form, coset representatives, determinants.

All arithmetic here is on Python ints so nothing overflows; the vectorised
``LatticeBasis.reduce_many`` uses int64 and is only fed small coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


class NotFullRank(ValueError):
    """The lattice has infinite index in Z^n."""


def _as_rows(M) -> list[list[int]]:
    return [[int(x) for x in row] for row in np.asarray(M, dtype=object).reshape(len(M), -1)]


def hnf(M) -> tuple[list[list[int]], list[list[int]]]:
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``H = U @ M``, ``U`` unimodular, ``H`` in row
    echelon form with positive pivots, entries above each pivot reduced into
    ``[0, pivot)`` and zero rows last.
    """
    A = _as_rows(M)
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == k) for k in range(m)] for i in range(m)]

    def sub(i, r, q):
        if q:
            Ai, Ar = A[i], A[r]
            for c in range(n):
                Ai[c] -= q * Ar[c]
            Ui, Ur = U[i], U[r]
            for c in range(m):
                Ui[c] -= q * Ur[c]

    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][c] != 0]
            if not nz:
                break
            best = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[best] = A[best], A[r]
            U[r], U[best] = U[best], U[r]
            done = True
            for i in range(r + 1, m):
                if A[i][c]:
                    sub(i, r, A[i][c] // A[r][c])
                    if A[i][c]:
                        done = False
            if done:
                break
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
            U[r] = [-x for x in U[r]]
        for i in range(r):
            sub(i, r, A[i][c] // A[r][c])
        r += 1
    return A, U


@dataclass(frozen=True)
class LatticeBasis:
    """Upper-triangular HNF basis of a full-rank sublattice L of Z^n."""

    rows: tuple[tuple[int, ...], ...]

    @classmethod
    def from_generators(cls, gens: Iterable[Sequence[int]], n: int | None = None) -> "LatticeBasis":
        gens = [list(g) for g in gens]
        if not gens:
            if n:
                raise NotFullRank("no generators")
            return cls(())
        H, _ = hnf(gens)
        H = [row for row in H if any(row)]
        n = len(gens[0])
        if len(H) != n or any(H[i][i] == 0 for i in range(n)):
            raise NotFullRank(f"lattice of rank {len(H)} in Z^{n}")
        return cls(tuple(tuple(row) for row in H))

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.rows[i][i] for i in range(self.dim))

    @property
    def index(self) -> int:
        out = 1
        for d in self.diagonal:
            out *= d
        return out

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        """Canonical representative: coordinate i lies in [0, H_ii)."""
        v = [int(x) for x in v]
        for i, row in enumerate(self.rows):
            q = v[i] // row[i]
            if q:
                for c in range(i, len(v)):
                    v[c] -= q * row[c]
        return tuple(v)

    def reduce_many(self, V) -> np.ndarray:
        """Vectorised ``reduce`` over the rows of an int64 array."""
        V = np.array(V, dtype=np.int64, copy=True)
        if V.ndim == 1:
            V = V.reshape(1, -1)
        H = np.array(self.rows, dtype=np.int64)
        for i in range(self.dim):
            q = np.floor_divide(V[:, i], H[i, i])
            nz = q != 0
            if nz.any():
                V[nz] -= np.outer(q[nz], H[i])
        return V

    def encode(self, reps) -> np.ndarray:
        """Mixed-radix index of reduced representatives (row-wise)."""
        R = np.asarray(reps, dtype=np.int64).reshape(-1, self.dim)
        code = np.zeros(R.shape[0], dtype=np.int64)
        for i, d in enumerate(self.diagonal):
            code = code * d + R[:, i]
        return code

    def contains(self, v: Sequence[int]) -> bool:
        return not any(self.reduce(v))

    def to_list(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


def coset_reduce(v: Sequence[int], H) -> tuple[int, ...]:
    """Canonical representative of ``v + L`` where ``H`` generates ``L``."""
    if not isinstance(H, LatticeBasis):
        H = LatticeBasis.from_generators(H, n=len(v))
    return H.reduce(v)


def coset_reduce_many(V, H) -> np.ndarray:
    if not isinstance(H, LatticeBasis):
        H = LatticeBasis.from_generators(H)
    return H.reduce_many(V)


def lattice_index(gens) -> int:
    return LatticeBasis.from_generators(gens).index


def det_int(M) -> int:
    """Exact determinant of a square integer matrix (Bareiss elimination)."""
    A = _as_rows(M) if len(M) else []
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def rank_q(M) -> int:
    """Rank over the rationals."""
    H, _ = hnf(M) if len(M) else ([], [])
    return sum(1 for row in H if any(row))


def solve_rational(M, b) -> list[Fraction] | None:
    """Some rational x with x @ M = b (row combination), or None."""
    rows = [[Fraction(int(x)) if not isinstance(x, Fraction) else x for x in row] for row in M]
    m = len(rows)
    n = len(b)
    # Gaussian elimination on the transpose system M^T x = b.
    aug = [[rows[i][c] for i in range(m)] + [Fraction(b[c])] for c in range(n)]
    piv_cols: list[int] = []
    r = 0
    for c in range(m):
        p = next((i for i in range(r, n) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        f = aug[r][c]
        aug[r] = [x / f for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][c] != 0:
                g = aug[i][c]
                aug[i] = [x - g * y for x, y in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    if any(aug[i][m] != 0 for i in range(r, n)):
        return None
    x = [Fraction(0)] * m
    for i, c in enumerate(piv_cols):
        x[c] = aug[i][m]
    return x
