"""Numpy implementations of the row-reduction kernels in ``_core.pyx``.

Same contracts: reduce in place to RREF, return the list of pivot columns.
"""

from __future__ import annotations

import numpy as np


def _rref_modp(M: np.ndarray, p: int) -> list[int]:
    rows, cols = M.shape
    work = M.astype(np.int64)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(work[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            work[[r, i]] = work[[i, r]]
        f = int(work[r, c])
        if f != 1:
            work[r, c:] = work[r, c:] * pow(f, -1, p) % p
        others = np.flatnonzero(work[:, c])
        others = others[others != r]
        if others.size:
            sub = work[others, c:] - np.outer(work[others, c], work[r, c:])
            work[others, c:] = sub % p
        pivots.append(c)
        r += 1
    M[...] = work
    return pivots


def rref_modp_u8(M: np.ndarray, p: int) -> list[int]:
    return _rref_modp(M, p)


def rref_modp_i64(M: np.ndarray, p: int) -> list[int]:
    return _rref_modp(M, p)


def rref_gf2(W: np.ndarray, ncols: int) -> list[int]:
    rows = W.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        w, bit = c >> 6, np.uint64(1) << np.uint64(c & 63)
        hits = np.flatnonzero(W[r:, w] & bit)
        if hits.size == 0:
            continue
        i = r + int(hits[0])
        if i != r:
            W[[r, i]] = W[[i, r]]
        others = np.flatnonzero(W[:, w] & bit)
        others = others[others != r]
        if others.size:
            W[others, w:] ^= W[r, w:]
        pivots.append(c)
        r += 1
    return pivots
