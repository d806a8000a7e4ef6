"""Exact linear algebra over prime fields and the integers."""

from ._backend import BACKEND, available_backends
from .dense import (
    KernelBasis,
    left_kernel,
    matmul_mod,
    pack_gf2,
    rank_ff,
    reduce_mod,
    right_kernel,
    rref_ff,
    solve_left,
    solve_right,
    unpack_gf2,
)
from .lattice import (
    LatticeBasis,
    NotFullRank,
    coset_reduce,
    coset_reduce_many,
    det_int,
    hnf,
    lattice_index,
    rank_q,
    solve_rational,
)

__all__ = [
    "BACKEND",
    "KernelBasis",
    "LatticeBasis",
    "NotFullRank",
    "available_backends",
    "coset_reduce",
    "coset_reduce_many",
    "det_int",
    "hnf",
    "lattice_index",
    "left_kernel",
    "matmul_mod",
    "pack_gf2",
    "rank_ff",
    "rank_q",
    "reduce_mod",
    "right_kernel",
    "rref_ff",
    "solve_left",
    "solve_rational",
    "solve_right",
    "unpack_gf2",
]
