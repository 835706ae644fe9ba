"""Exact integer helpers: gcd/lcm, Bezout pairs and modular inverses.

Rotation angles everywhere in the package are stored as ``Rational``
multiples of a full turn, so identities between them are checked with
``==`` rather than a tolerance.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .errors import NotInvertible

Rational = Fraction


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)


def lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y == g == gcd(|a|, |b|) >= 0``.

    The coefficients are the canonical output of the iterative extended
    Euclid algorithm run on the absolute values; signs are folded back in
    afterwards so negative inputs are allowed.
    """
    r0, r1 = abs(a), abs(b)
    s0, s1 = 1, 0
    t0, t1 = 0, 1
    while r1:
        k = r0 // r1
        r0, r1 = r1, r0 - k * r1
        s0, s1 = s1, s0 - k * s1
        t0, t1 = t1, t0 - k * t1
    if a < 0:
        s0 = -s0
    if b < 0:
        t0 = -t0
    return r0, s0, t0


def solve_congruence(a: int, m: int) -> int:
    """Unique ``s`` in ``[0, m)`` with ``a*s = 1 (mod m)``.

    ``a`` may be negative; it is reduced into ``[0, m)`` first.
    """
    if m < 1:
        raise ValueError(f"modulus must be positive, got {m}")
    if m == 1:
        return 0
    a %= m
    g, x, _ = egcd(a, m)
    if g != 1:
        raise NotInvertible(f"{a} is not invertible modulo {m}")
    return x % m


def frac_mod1(x: Fraction) -> Fraction:
    """Reduce a rational number of turns into ``[0, 1)``."""
    return x - math.floor(x)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` in increasing order."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def valuation(n: int, p: int) -> int:
    """Exponent of the prime ``p`` in ``n`` (``n >= 1``)."""
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def prime_powers(n: int) -> list[int]:
    """All prime powers ``P > 1`` dividing ``n``."""
    out = []
    for p in prime_factors(n):
        P = p
        while n % P == 0:
            out.append(P)
            P *= p
    return sorted(out)
