"""Positive definite binary quadratic forms and form class groups."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt
from typing import NamedTuple, Sequence

from .abgroup import FinAbGroup, from_presentation, trivial_group
from .arith import is_fundamental


class DiscriminantError(ValueError):
    pass


class NonFundamentalDiscriminant(DiscriminantError):
    pass


class QuadForm(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def conj(self) -> "QuadForm":
        """Image under complex conjugation; also the inverse class."""
        return QuadForm(self.a, -self.b, self.c)

    def is_reduced(self) -> bool:
        a, b, c = self
        return abs(b) <= a <= c and not (b < 0 and (abs(b) == a or a == c))

    def __str__(self):
        return f"({self.a},{self.b},{self.c})"


def check_discriminant(D: int) -> None:
    if D >= 0:
        raise DiscriminantError(f"discriminant {D} is not negative")
    if D % 4 not in (0, 1):
        raise DiscriminantError(f"{D} is not a discriminant (must be 0 or 1 mod 4)")


def principal_form(D: int) -> QuadForm:
    check_discriminant(D)
    b = D % 2
    return QuadForm(1, b, (b - D) // 4)


def reduce(f: Sequence[int]) -> QuadForm:
    """Unique reduced form equivalent to the positive definite form f."""
    a, b, c = f
    if b * b - 4 * a * c >= 0:
        raise DiscriminantError("reduction needs a negative discriminant")
    if a <= 0:
        raise DiscriminantError("form is not positive definite")
    while True:
        if not (-a < b <= a):
            q, r = divmod(b, 2 * a)
            if r > a:
                r -= 2 * a
                q += 1
            c -= (b + r) * q // 2
            b = r
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return QuadForm(a, b, c)


def compose(f: Sequence[int], g: Sequence[int]) -> QuadForm:
    """Reduced Gauss/Dirichlet composition of two primitive forms."""
    f, g = QuadForm(*f), QuadForm(*g)
    D = f.disc
    if g.disc != D:
        raise DiscriminantError(f"discriminant mismatch: {D} vs {g.disc}")
    if f.a > g.a:
        f, g = g, f
    a1, b1, _ = f
    a2, b2, c2 = g
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, y1, _ = _xgcd(a2, a1)
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, v = _xgcd(s, d)
        y2 = -v
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - D) // (4 * a3)
    return reduce((a3, b3, c3))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(d, u, v) with u*a + v*b = d = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def power(f: Sequence[int], e: int) -> QuadForm:
    f = reduce(f)
    if e < 0:
        f, e = f.conj(), -e
    result = principal_form(f.disc)
    base = f
    while e:
        if e & 1:
            result = compose(result, base)
        base = compose(base, base)
        e >>= 1
    return result


def is_principal(f: Sequence[int]) -> bool:
    f = reduce(f)
    return f == principal_form(f.disc)


def reduced_forms(D: int) -> list[QuadForm]:
    """All reduced primitive forms of discriminant D < 0."""
    check_discriminant(D)
    out = []
    amax = isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append(QuadForm(a, b, c))
    return out


def class_number(D: int) -> int:
    """Number of reduced primitive forms; independent of the group-structure path."""
    return len(reduced_forms(D))


@dataclass(frozen=True)
class ClassGroup:
    """Form class group with discrete logarithms for every class."""

    D: int
    group: FinAbGroup
    forms: tuple[QuadForm, ...]
    gens: tuple[QuadForm, ...]  # presentation generators (= group.labels)
    logs: dict  # reduced form -> presentation exponent vector

    @property
    def h(self) -> int:
        return len(self.forms)

    @property
    def invariants(self) -> tuple[int, ...]:
        return self.group.invariants

    def dlog(self, f: Sequence[int]) -> tuple[int, ...]:
        """SNF coordinates of the class of f."""
        return self.group.coords(self.logs[reduce(f)])

    def form_of(self, x: Sequence[int]) -> QuadForm:
        """Reduced form with presentation exponent vector x."""
        out = principal_form(self.D)
        for g, e in zip(self.gens, x):
            if e:
                out = compose(out, power(g, e))
        return out

    def snf_form(self, y: Sequence[int]) -> QuadForm:
        return self.form_of(self.group.lift(y))

    def snf_generators(self) -> list[QuadForm]:
        return [self.snf_form([int(i == j) for i in range(self.group.rank)]) for j in range(self.group.rank)]


def form_class_group(D: int) -> ClassGroup:
    """Class group of primitive forms of any negative discriminant D."""
    forms = reduced_forms(D)
    one = principal_form(D)
    logs: dict[QuadForm, tuple[int, ...]] = {one: ()}
    gens: list[QuadForm] = []
    rels: list[list[int]] = []
    for f in forms:
        if f in logs:
            continue
        k = len(gens)
        gens.append(f)
        logs = {g: v + (0,) for g, v in logs.items()}
        # smallest m with f^m in the current subgroup
        m, fm = 1, f
        while fm not in logs:
            fm = compose(fm, f)
            m += 1
        rel = [-x for x in logs[fm]]
        rel[k] += m
        rels.append(rel)
        new = dict(logs)
        for g, v in logs.items():
            h = g
            for j in range(1, m):
                h = compose(h, f)
                new[h] = v[:k] + (v[k] + j,)
        logs = new
    n = len(gens)
    rels = [r + [0] * (n - len(r)) for r in rels]
    G = from_presentation(n, rels, labels=tuple(gens)) if n else trivial_group()
    if G.order() != len(forms):
        raise AssertionError("group order disagrees with the reduced-form count")
    # sigma = form conjugation
    sig = [list(logs[reduce(g.conj())]) for g in gens]
    if n:
        G = G.with_involution(sig)
    return ClassGroup(D, G, tuple(forms), tuple(gens), logs)


def class_group(D: int) -> ClassGroup:
    """Ideal class group of the imaginary quadratic field of discriminant D."""
    check_discriminant(D)
    if not is_fundamental(D):
        raise NonFundamentalDiscriminant(f"{D} is not a fundamental discriminant")
    return form_class_group(D)
