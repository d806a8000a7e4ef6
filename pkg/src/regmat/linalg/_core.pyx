# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled row reduction over F_p and bit-packed F_2.

All routines reduce their argument in place to reduced row echelon form and
return the pivot columns. Entries must already lie in [0, p).
"""

import numpy as np

from libc.stdint cimport int64_t, uint8_t, uint64_t


def _inverse_table(int p):
    tab = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        tab[a] = pow(a, -1, p)
    return tab


def rref_modp_u8(uint8_t[:, ::1] M, int p):
    """Reduce a uint8 matrix over F_p, p < 256."""
    cdef Py_ssize_t rows = M.shape[0], cols = M.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, k, piv, nnz
    cdef int f, m, t, y
    cdef uint8_t tmp
    cdef uint8_t tab[256]
    cdef int64_t[::1] inv = _inverse_table(p)
    cdef Py_ssize_t[::1] nzcols = np.empty(max(cols, 1), dtype=np.intp)
    cdef Py_ssize_t[::1] out = np.empty(max(min(rows, cols), 1), dtype=np.intp)

    with nogil:
        for c in range(cols):
            if r == rows:
                break
            piv = -1
            for i in range(r, rows):
                if M[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(c, cols):
                    tmp = M[piv, j]
                    M[piv, j] = M[r, j]
                    M[r, j] = tmp
            f = M[r, c]
            if f != 1:
                m = <int>inv[f]
                for j in range(c, cols):
                    M[r, j] = <uint8_t>((M[r, j] * m) % p)
            nnz = 0
            for j in range(c, cols):
                if M[r, j] != 0:
                    nzcols[nnz] = j
                    nnz += 1
            for i in range(rows):
                if i == r or M[i, c] == 0:
                    continue
                m = p - M[i, c]
                for y in range(p):
                    tab[y] = <uint8_t>((m * y) % p)
                for k in range(nnz):
                    j = nzcols[k]
                    t = M[i, j] + tab[M[r, j]]
                    if t >= p:
                        t -= p
                    M[i, j] = <uint8_t>t
            out[r] = c
            r += 1
    return [out[i] for i in range(r)]


def rref_modp_i64(int64_t[:, ::1] M, int64_t p):
    """Reduce an int64 matrix over F_p, p < 2^31."""
    cdef Py_ssize_t rows = M.shape[0], cols = M.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, k, piv, nnz
    cdef int64_t m, tmp
    cdef Py_ssize_t[::1] nzcols = np.empty(max(cols, 1), dtype=np.intp)
    cdef Py_ssize_t[::1] out = np.empty(max(min(rows, cols), 1), dtype=np.intp)
    cdef int64_t a, b, s, q

    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if M[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, cols):
                tmp = M[piv, j]
                M[piv, j] = M[r, j]
                M[r, j] = tmp
        if M[r, c] != 1:
            m = pow(int(M[r, c]), -1, int(p))
            with nogil:
                for j in range(c, cols):
                    M[r, j] = (M[r, j] * m) % p
        with nogil:
            nnz = 0
            for j in range(c, cols):
                if M[r, j] != 0:
                    nzcols[nnz] = j
                    nnz += 1
            for i in range(rows):
                if i == r or M[i, c] == 0:
                    continue
                m = p - M[i, c]
                for k in range(nnz):
                    j = nzcols[k]
                    M[i, j] = (M[i, j] + m * M[r, j]) % p
        out[r] = c
        r += 1
    return [out[i] for i in range(r)]


def rref_gf2(uint64_t[:, ::1] W, Py_ssize_t ncols):
    """Reduce a bit-packed F_2 matrix (bit c of row i at word c // 64)."""
    cdef Py_ssize_t rows = W.shape[0], nwords = W.shape[1]
    cdef Py_ssize_t r = 0, c, i, k, piv, w
    cdef uint64_t bit, tmp
    cdef Py_ssize_t[::1] out = np.empty(max(min(rows, ncols), 1), dtype=np.intp)

    with nogil:
        for c in range(ncols):
            if r == rows:
                break
            w = c >> 6
            bit = (<uint64_t>1) << (c & 63)
            piv = -1
            for i in range(r, rows):
                if W[i, w] & bit:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for k in range(w, nwords):
                    tmp = W[piv, k]
                    W[piv, k] = W[r, k]
                    W[r, k] = tmp
            for i in range(rows):
                if i != r and (W[i, w] & bit):
                    for k in range(w, nwords):
                        W[i, k] ^= W[r, k]
            out[r] = c
            r += 1
    return [out[i] for i in range(r)]
