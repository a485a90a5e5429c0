"""Exact integer arithmetic: symbols, modular square roots, small primes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def primes(start: int = 2) -> Iterator[int]:
    n = max(2, start)
    while True:
        if is_prime(n):
            yield n
        n += 1


def factor(n: int) -> dict[int, int]:
    """Trial-division factorisation of |n|."""
    n = abs(n)
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factor(n).values())


def is_fundamental(D: int) -> bool:
    """True for discriminants of quadratic fields (either sign, D != 1)."""
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def fundamental_discriminants(dmin: int, dmax: int) -> list[int]:
    """Negative fundamental discriminants D with dmin <= D < dmax, by increasing |D|."""
    hi = min(dmax, 0)
    return sorted((D for D in range(dmin, hi) if is_fundamental(D)), key=abs)


def radicand_to_disc(m: int) -> int:
    """Discriminant of Q(sqrt(m)) for squarefree m."""
    if not is_squarefree(m) or m in (0, 1):
        raise ValueError(f"{m} is not a squarefree radicand")
    return m if m % 4 == 1 else 4 * m


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n); total on integers."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a|n) for odd n > 0
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _sqrt_mod_prime(a: int, p: int) -> Optional[int]:
    """Tonelli-Shanks; a must be a unit mod p."""
    a %= p
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def sqrt_mod_prime_power(a: int, p: int, n: int) -> Optional[int]:
    """Least x in [0, p^n) with x^2 = a mod p^n, for a a unit mod the odd prime p.

    Returns None when a is not a unit mod p or not a square.
    """
    if p == 2 or not is_prime(p) or n < 1:
        raise ValueError("need an odd prime p and n >= 1")
    if a % p == 0:
        return None
    x = _sqrt_mod_prime(a, p)
    if x is None:
        return None
    mod = p
    for _ in range(1, n):
        mod *= p
        # Hensel: x <- x - (x^2 - a) / (2x)
        x = (x - (x * x - a) * pow(2 * x, -1, mod)) % mod
    mod = p**n
    x %= mod
    return min(x, mod - x)


@dataclass(frozen=True)
class ModRing:
    """Z/mZ with least non-negative representatives."""

    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be >= 2")

    def __call__(self, x: int) -> int:
        return x % self.modulus

    def inv(self, x: int) -> int:
        return pow(x, -1, self.modulus)

    def is_unit(self, x: int) -> bool:
        return math.gcd(x, self.modulus) == 1
