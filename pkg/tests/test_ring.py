import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from regmat.ring import (
    ModulusTooLarge,
    NotLocal,
    NotPrime,
    PrimeField,
    ResidueRing,
    ZeroInverse,
    ell_valuation,
    ff_inv,
    format_rational,
    is_ell_integral,
    is_prime,
    parse_rational,
    parse_ring,
    primes_below,
    to_residue,
)


@pytest.mark.parametrize("a, ell, expected", [(1, 2, 1), (2, 3, 2), (5, 7, 3)])
def test_ff_inv_examples(a, ell, expected):
    assert ff_inv(a, PrimeField(ell)) == expected


def test_ff_inv_zero():
    with pytest.raises(ZeroInverse):
        ff_inv(0, PrimeField(5))


@pytest.mark.parametrize("q, ell, expected", [(0, 2, math.inf), (12, 2, 2), (Fraction(3, 8), 2, -3)])
def test_ell_valuation_examples(q, ell, expected):
    assert ell_valuation(q, ell) == expected


def test_ring_construction_errors():
    with pytest.raises(NotPrime):
        ResidueRing(4)
    with pytest.raises(ModulusTooLarge):
        ResidueRing(2, 31)
    assert ResidueRing(3, 2).modulus == 9
    assert parse_ring("F5") == ResidueRing(5)
    assert parse_ring("Z/8") == ResidueRing(2, 3)


def test_to_residue_rational():
    assert to_residue(Fraction(1, 3), 4) == 3  # 3 * 3 = 9 = 1 mod 4
    assert to_residue(-1, 8) == 7
    with pytest.raises(NotLocal):
        to_residue(Fraction(1, 2), 4)
    assert is_ell_integral(Fraction(5, 3), 2)
    assert not is_ell_integral(Fraction(5, 6), 2)


def test_rational_text_round_trip():
    for q in (Fraction(0), Fraction(-7), Fraction(3, 8)):
        assert parse_rational(format_rational(q)) == q


def test_primes():
    assert primes_below(12) == [2, 3, 5, 7, 11]
    assert primes_below(2) == []
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@given(st.sampled_from(primes_below(98)), st.integers(min_value=1, max_value=10**6))
def test_inverse_property(ell, a):
    F = PrimeField(ell)
    if a % ell:
        assert (a * ff_inv(a, F)) % ell == 1


nonzero_q = st.fractions().filter(lambda q: q != 0)


@given(nonzero_q, nonzero_q, st.sampled_from([2, 3, 5, 7]))
def test_valuation_additive(q1, q2, ell):
    assert ell_valuation(q1 * q2, ell) == ell_valuation(q1, ell) + ell_valuation(q2, ell)


@given(st.integers(), st.integers(min_value=1, max_value=6))
def test_residue_ring_valuation(a, r):
    R = ResidueRing(3, r)
    v = R.valuation(a)
    assert 0 <= v <= r
    assert (a % R.modulus == 0) == (v == r)
