"""Rational numbers by factorization, Legendre and Hilbert symbols."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from sympy import factorint, isprime

INFINITY = "inf"

Rational = Union[int, Fraction, "RationalNonzero"]


@dataclass(frozen=True)
class RationalNonzero:
    """sign * prod p^e with nonzero exponents, primes ascending."""

    sign: int
    factorization: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        primes = [p for p, _ in self.factorization]
        if primes != sorted(set(primes)) or any(e == 0 for _, e in self.factorization):
            raise ValueError("factorization must list distinct primes with nonzero exponents")

    @classmethod
    def of(cls, x: Rational) -> "RationalNonzero":
        if isinstance(x, RationalNonzero):
            return x
        x = Fraction(x)
        if x == 0:
            raise ValueError("zero is not a nonzero rational")
        fac = dict(factorint(abs(x.numerator)))
        for p, e in factorint(x.denominator).items():
            fac[p] = fac.get(p, 0) - e
        return cls(1 if x > 0 else -1, tuple(sorted((p, e) for p, e in fac.items() if e)))

    @property
    def value(self) -> Fraction:
        out = Fraction(self.sign)
        for p, e in self.factorization:
            out *= Fraction(p) ** e
        return out

    def valuation(self, p: int) -> int:
        for q, e in self.factorization:
            if q == p:
                return e
        return 0

    def support(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factorization)

    def unit_part(self, p: int) -> Fraction:
        return self.value / Fraction(p) ** self.valuation(p)

    def __str__(self) -> str:
        return str(self.value)


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, by Euler's criterion."""
    if p == 2 or not isprime(p):
        raise ValueError(f"{p} is not an odd prime")
    t = pow(a % p, (p - 1) // 2, p)
    return -1 if t == p - 1 else t


def _mod_rational(x: Fraction, n: int) -> int:
    """x mod n for x with denominator prime to n."""
    return x.numerator * pow(x.denominator, -1, n) % n


def hilbert_symbol(a: Rational, b: Rational, place) -> int:
    """(a, b)_v for nonzero rationals; place is a prime or INFINITY."""
    a = RationalNonzero.of(a)
    b = RationalNonzero.of(b)
    if place == INFINITY:
        return -1 if a.sign < 0 and b.sign < 0 else 1
    p = int(place)
    alpha, beta = a.valuation(p), b.valuation(p)
    u, v = a.unit_part(p), b.unit_part(p)
    if p == 2:
        u8, v8 = _mod_rational(u, 8), _mod_rational(v, 8)
        eps_u, eps_v = (u8 - 1) // 2 % 2, (v8 - 1) // 2 % 2
        om_u, om_v = (u8 * u8 - 1) // 8 % 2, (v8 * v8 - 1) // 8 % 2
        e = eps_u * eps_v + alpha * om_v + beta * om_u
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    up, vp = _mod_rational(u, p), _mod_rational(v, p)
    return sign * legendre(up, p) ** (beta % 2) * legendre(vp, p) ** (alpha % 2)


def hilbert_places(a: Rational, b: Rational) -> list:
    """Places where (a, b)_v can be nontrivial."""
    a = RationalNonzero.of(a)
    b = RationalNonzero.of(b)
    return sorted({2, *a.support(), *b.support()}) + [INFINITY]


def is_sum_of_two_squares(n: int) -> bool:
    if n < 0:
        return False
    if n == 0:
        return True
    return all(e % 2 == 0 for p, e in factorint(n).items() if p % 4 == 3)


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    """The residue mod m1*m2 (coprime moduli) congruent to r1 and r2."""
    return (r1 + m1 * ((r2 - r1) * pow(m1, -1, m2) % m2)) % (m1 * m2) if m2 > 1 else r1 % m1
