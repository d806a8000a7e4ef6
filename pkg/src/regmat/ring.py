"""Coefficient rings: prime fields, residue rings Z/l^r and exact rationals.

Rationals are plain :class:`fractions.Fraction` values; the helpers here test
them for l-integrality and reduce them into Z/l^r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational

MAX_MODULUS = 2**31


class RingError(ValueError):
    pass


class ZeroInverse(RingError, ZeroDivisionError):
    pass


class NotPrime(RingError):
    pass


class ModulusTooLarge(RingError):
    pass


class NotLocal(RingError):
    """A rational is not l-integral, so it has no image in Z/l^r."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_below(bound: int) -> list[int]:
    return [p for p in range(2, bound) if is_prime(p)]


@dataclass(frozen=True)
class ResidueRing:
    """Z/l^r for a prime l; r = 1 is the prime field F_l."""

    ell: int
    r: int = 1

    def __post_init__(self):
        if not is_prime(self.ell):
            raise NotPrime(f"{self.ell} is not prime")
        if self.r < 1:
            raise RingError(f"exponent must be >= 1, got {self.r}")
        if self.ell**self.r >= MAX_MODULUS:
            raise ModulusTooLarge(f"{self.ell}^{self.r} does not fit below 2^31")

    @property
    def modulus(self) -> int:
        return self.ell**self.r

    @property
    def is_field(self) -> bool:
        return self.r == 1

    @property
    def tag(self) -> str:
        if self.r == 1:
            return f"F{self.ell}"
        return f"Z/{self.modulus}"

    def __call__(self, x) -> int:
        """Image of an integer or l-integral rational in [0, l^r)."""
        return to_residue(x, self.modulus)

    def inv(self, a: int) -> int:
        a %= self.modulus
        if a % self.ell == 0:
            raise ZeroInverse(f"{a} is not a unit in {self.tag}")
        return pow(a, -1, self.modulus)

    def valuation(self, a: int) -> float:
        """l-adic valuation of a residue; the zero class has valuation r."""
        a %= self.modulus
        if a == 0:
            return self.r
        v = 0
        while a % self.ell == 0:
            a //= self.ell
            v += 1
        return v

    def __str__(self):
        return self.tag


def PrimeField(ell: int) -> ResidueRing:
    """The prime field F_ell (a ``ResidueRing`` with exponent 1)."""
    return ResidueRing(ell, 1)


def parse_ring(tag: str) -> ResidueRing:
    """Inverse of ``ResidueRing.tag``: ``"F3"`` or ``"Z/9"``."""
    tag = tag.strip()
    if tag.startswith("F"):
        return PrimeField(int(tag[1:]))
    if tag.startswith("Z/"):
        m = int(tag[2:])
        for p in range(2, m + 1):
            if m % p == 0:
                r = 0
                while m % p == 0:
                    m //= p
                    r += 1
                if m != 1:
                    break
                return ResidueRing(p, r)
    raise RingError(f"unrecognised ring tag {tag!r}")


def ff_inv(a: int, field: ResidueRing) -> int:
    if a % field.ell == 0:
        raise ZeroInverse(f"{a} has no inverse mod {field.ell}")
    return pow(a % field.ell, -1, field.ell)


def ell_valuation(q, ell: int) -> float:
    """Exponent v with q = ell^v * (unit of Z_(ell)); ``math.inf`` for zero."""
    q = Fraction(q)
    if q == 0:
        return math.inf
    v = 0
    num, den = q.numerator, q.denominator
    while num % ell == 0:
        num //= ell
        v += 1
    while den % ell == 0:
        den //= ell
        v -= 1
    return v


def is_ell_integral(q, ell: int) -> bool:
    return ell_valuation(q, ell) >= 0


def to_residue(x, modulus: int) -> int:
    if isinstance(x, Integral):
        return int(x) % modulus
    if not isinstance(x, Rational):
        x = Fraction(x)
    den = x.denominator
    if math.gcd(den, modulus) != 1:
        raise NotLocal(f"{x} has no image in Z/{modulus}")
    return x.numerator * pow(den, -1, modulus) % modulus


def parse_rational(x) -> Fraction:
    """JSON coefficient: int, or string ``"p/q"``."""
    if isinstance(x, bool):
        raise TypeError("boolean is not a coefficient")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as a rational")


def format_rational(q: Fraction) -> int | str:
    q = Fraction(q)
    if q.denominator == 1:
        return q.numerator
    return f"{q.numerator}/{q.denominator}"
