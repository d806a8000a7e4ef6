"""Dense exact linear algebra over prime fields.

Matrices are numpy arrays with entries in [0, p). Reductions go through the
kernels picked in ``_backend``; for p = 2 rows are bit-packed into uint64
words and eliminated by XOR.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import ModuleType

import numpy as np

from . import _backend


@dataclass(frozen=True)
class KernelBasis:
    """Linearly independent vectors (rows) spanning a kernel over F_p."""

    vectors: np.ndarray
    dim: int
    p: int

    @property
    def rank(self) -> int:
        return int(self.vectors.shape[0])

    def __len__(self):
        return self.rank

    @property
    def ring_tag(self) -> str:
        return f"F{self.p}"


def _storage_dtype(p: int):
    return np.uint8 if p < 256 else np.int64


def reduce_mod(M, p: int) -> np.ndarray:
    """Entries of ``M`` reduced into [0, p), as a fresh 2-d array in storage dtype."""
    A = np.asarray(M)
    if A.dtype == object:
        A = np.array([[int(x) % p for x in row] for row in A], dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if A.dtype == _storage_dtype(p) and A.size and int(A.max()) < p:
        return np.array(A, order="C", copy=True)
    A = np.mod(A.astype(np.int64), p)
    return np.ascontiguousarray(A.astype(_storage_dtype(p)))


def pack_gf2(A: np.ndarray) -> np.ndarray:
    rows, cols = A.shape
    nwords = max((cols + 63) // 64, 1)
    padded = np.zeros((rows, nwords * 64), dtype=np.uint8)
    padded[:, :cols] = A & 1
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view(np.dtype("<u8")).astype(np.uint64)


def unpack_gf2(W: np.ndarray, ncols: int) -> np.ndarray:
    as_bytes = np.ascontiguousarray(W.astype(np.dtype("<u8"))).view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return np.ascontiguousarray(bits[:, :ncols])


def rref_ff(
    M, p: int, *, packed: bool = True, kernels: ModuleType | None = None
) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``M`` over F_p and its pivot columns."""
    k = kernels or _backend.kernels
    A = reduce_mod(M, p)
    rows, cols = A.shape
    if rows == 0 or cols == 0:
        return A, []
    if p == 2 and packed:
        W = pack_gf2(A)
        pivots = k.rref_gf2(W, cols)
        return unpack_gf2(W, cols), list(pivots)
    if A.dtype == np.uint8:
        pivots = k.rref_modp_u8(A, p)
    else:
        pivots = k.rref_modp_i64(A, p)
    return A, list(pivots)


def rank_ff(M, p: int, **kw) -> int:
    return len(rref_ff(M, p, **kw)[1])


def _kernel_from_rref(R: np.ndarray, pivots: list[int], cols: int, p: int) -> np.ndarray:
    free = np.setdiff1d(np.arange(cols), np.asarray(pivots, dtype=np.intp))
    K = np.zeros((free.size, cols), dtype=_storage_dtype(p))
    if free.size == 0:
        return K
    K[np.arange(free.size), free] = 1
    if pivots:
        block = R[: len(pivots)][:, free].astype(np.int64)
        K[:, pivots] = ((p - block) % p).T.astype(K.dtype)
    return K


def right_kernel(M, p: int, **kw) -> KernelBasis:
    """Basis of {x : M x = 0}."""
    A = reduce_mod(M, p)
    cols = A.shape[1]
    R, pivots = rref_ff(A, p, **kw)
    return KernelBasis(_kernel_from_rref(R, pivots, cols, p), cols, p)


def left_kernel(M, p: int, **kw) -> KernelBasis:
    """Basis of {v : v M = 0}."""
    A = reduce_mod(M, p)
    return right_kernel(np.ascontiguousarray(A.T), p, **kw)


def solve_right(M, b, p: int) -> np.ndarray | None:
    """Some x with M x = b over F_p, or None if the system is inconsistent."""
    A = reduce_mod(M, p).astype(np.int64)
    rhs = np.mod(np.asarray(b, dtype=np.int64).reshape(-1, 1), p)
    R, pivots = rref_ff(np.hstack([A, rhs]), p)
    cols = A.shape[1]
    if pivots and pivots[-1] == cols:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = int(R[i, cols])
    return x


def solve_left(M, t, p: int) -> np.ndarray | None:
    """Some x with x M = t over F_p, or None."""
    A = reduce_mod(M, p)
    return solve_right(np.ascontiguousarray(A.T), t, p)


def matmul_mod(A, B, p: int) -> np.ndarray:
    """A @ B reduced mod p, exact for any operand sizes used here."""
    A = np.asarray(A)
    B = np.asarray(B)
    inner = A.shape[-1]
    if inner * (p - 1) ** 2 < 2**52:
        out = np.rint(A.astype(np.float64) @ B.astype(np.float64))
        return np.mod(out.astype(np.int64), p)
    return np.mod(A.astype(object) @ B.astype(object), p).astype(np.int64)
