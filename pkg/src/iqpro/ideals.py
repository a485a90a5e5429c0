"""Ideals of the maximal order of Q(sqrt(D)), D < 0 fundamental.

Elements are written (x + y*sqrt(D))/2 (``AlgInt``); ideals as lattices
Z*a + Z*(b + sqrt(D))/2.  Internally lattices use the Z-basis 1, w with
w = (D + sqrt(D))/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterator, NamedTuple, Optional

from .abgroup import hnf
from .arith import is_prime, kronecker, primes, sqrt_mod_prime_power
from .quadforms import DiscriminantError, QuadForm, principal_form, reduce


class RepresentativeNotFound(RuntimeError):
    pass


class AlgInt(NamedTuple):
    """(x + y*sqrt(D))/2 with x = y*D mod 2; D is carried by the caller."""

    x: int
    y: int

    @classmethod
    def from_int(cls, n: int) -> "AlgInt":
        return cls(2 * n, 0)

    @classmethod
    def from_w(cls, D: int, u: int, v: int) -> "AlgInt":
        """u + v*w."""
        return cls(2 * u + v * D, v)

    def to_w(self, D: int) -> tuple[int, int]:
        return (self.x - self.y * D) // 2, self.y

    def norm(self, D: int) -> int:
        return (self.x * self.x - D * self.y * self.y) // 4

    def conj(self) -> "AlgInt":
        return AlgInt(self.x, -self.y)

    def mul(self, other: "AlgInt", D: int) -> "AlgInt":
        x1, y1 = self
        x2, y2 = other
        return AlgInt((x1 * x2 + D * y1 * y2) // 2, (x1 * y2 + x2 * y1) // 2)

    def pow(self, e: int, D: int) -> "AlgInt":
        out, base = AlgInt(2, 0), self
        while e:
            if e & 1:
                out = out.mul(base, D)
            base = base.mul(base, D)
            e >>= 1
        return out

    def scale(self, k: int) -> "AlgInt":
        return AlgInt(k * self.x, k * self.y)

    def fmt(self, D: int) -> str:
        return f"({self.x}{self.y:+d}*sqrt({D}))/2"


def w_mul(D: int, s: tuple[int, int], t: tuple[int, int]) -> tuple[int, int]:
    """Product in the basis 1, w (w^2 = D*w - (D^2 - D)/4)."""
    u1, v1 = s
    u2, v2 = t
    vv = v1 * v2
    return u1 * u2 - vv * (D * D - D) // 4, u1 * v2 + u2 * v1 + vv * D


@dataclass(frozen=True)
class IdealRep:
    """Primitive ideal Z*a + Z*(b + sqrt(D))/2 with b canonical in [0, 2a)."""

    D: int
    a: int
    b: int

    def __post_init__(self):
        if self.a < 1:
            raise ValueError("a must be positive")
        b = self.b % (2 * self.a)
        object.__setattr__(self, "b", b)
        if (b - self.D) % 2 or (b * b - self.D) % (4 * self.a):
            raise ValueError(f"[{self.a}, ({self.b}+sqrt({self.D}))/2] is not an ideal")

    @property
    def norm(self) -> int:
        return self.a

    def basis_w(self) -> list[list[int]]:
        """HNF rows in the basis 1, w."""
        return [[self.a, 0], [(self.b - self.D) // 2, 1]]

    def contains(self, z: AlgInt) -> bool:
        u, v = z.to_w(self.D)
        return (u - v * (self.b - self.D) // 2) % self.a == 0

    def conj(self) -> "IdealRep":
        return IdealRep(self.D, self.a, -self.b)

    def __str__(self):
        return f"[{self.a}, ({self.b}+sqrt({self.D}))/2]"


def unit_ideal(D: int) -> IdealRep:
    return IdealRep(D, 1, D % 2)


def ideal_from_lattice(D: int, rows) -> tuple[int, IdealRep]:
    """(content, primitive part) of the ideal spanned by ``rows`` (1, w coords)."""
    # pivot on the w-coordinate first: rows (E, C), (0, A)
    H = hnf([[v, u] for u, v in rows])
    if len(H) != 2:
        raise ValueError("not a full-rank lattice")
    (E, C), (_, A) = H
    content = E
    a = A // content
    b = 2 * (C // content) + D
    return content, IdealRep(D, a, b)


def ideal_mul(I: IdealRep, J: IdealRep) -> tuple[int, IdealRep]:
    if I.D != J.D:
        raise DiscriminantError("discriminant mismatch")
    D = I.D
    gens = [w_mul(D, tuple(s), tuple(t)) for s in I.basis_w() for t in J.basis_w()]
    return ideal_from_lattice(D, gens)


def ideal_pow(I: IdealRep, e: int) -> tuple[int, IdealRep]:
    """I^e = content * primitive ideal."""
    if e < 0:
        raise ValueError("negative exponent")
    content, out = 1, unit_ideal(I.D)
    base, bc = I, 1
    while e:
        if e & 1:
            c, out = ideal_mul(out, base)
            content *= c * bc
        e >>= 1
        if e:
            c, base = ideal_mul(base, base)
            bc = bc * bc * c
    return content, out


def ideal_pow_reduce(I: IdealRep, e: int) -> IdealRep:
    """Primitive part of I^e."""
    return ideal_pow(I, e)[1]


def principal_ideal(D: int, z: AlgInt) -> tuple[int, IdealRep]:
    u, v = z.to_w(D)
    zw = w_mul(D, (u, v), (0, 1))
    return ideal_from_lattice(D, [[u, v], list(zw)])


def form_ideal(f: QuadForm) -> IdealRep:
    """(a, b, c) -> Z*a + Z*(-b + sqrt(D))/2."""
    return IdealRep(f.disc, f.a, -f.b)


def ideal_form(I: IdealRep) -> QuadForm:
    """Norm form N(x*a - y*(b + sqrt D)/2)/N(I) of the primitive ideal I."""
    b = -I.b
    return QuadForm(I.a, b, (b * b - I.D) // (4 * I.a))


def principal_generator(I: IdealRep) -> Optional[AlgInt]:
    """A generator of I when I is principal, via Lagrange reduction of its lattice."""
    D = I.D
    f = ideal_form(I)
    a, b, c = f
    # reduce the form tracking the basis change (x, y) of the first vector
    M = [[1, 0], [0, 1]]  # columns give old coordinates of new basis vectors
    while True:
        if not (-a < b <= a):
            q, r = divmod(b, 2 * a)
            if r > a:
                r -= 2 * a
                q += 1
            c -= (b + r) * q // 2
            b = r
            # x -> x - q y
            M = [[M[0][0], M[0][1] - q * M[0][0]], [M[1][0], M[1][1] - q * M[1][0]]]
        if a > c:
            a, b, c = c, -b, a
            M = [[M[0][1], -M[0][0]], [M[1][1], -M[1][0]]]
            continue
        break
    if a != 1:
        return None
    # f(x, y) = N(x*a - y*beta)/a with beta = (b + sqrt D)/2
    x, y = M[0][0], M[1][0]
    z = AlgInt(2 * I.a * x - y * I.b, -y)
    if not generates(I, z):
        raise AssertionError(f"generator recovery failed for {I}")
    return z


def generates(I: IdealRep, z: AlgInt, content: int = 1) -> bool:
    """Whether (z) = content * I."""
    c, J = principal_ideal(I.D, z)
    return c == content and J == I


@dataclass(frozen=True)
class Splitting:
    kind: str  # "split" | "inert" | "ramified"
    p: int
    primes: tuple[IdealRep, ...]  # prime ideals above p (empty when inert)

    @property
    def e(self) -> int:
        return 2 if self.kind == "ramified" else 1

    @property
    def f(self) -> int:
        return 2 if self.kind == "inert" else 1

    @property
    def g(self) -> int:
        return 2 if self.kind == "split" else 1


def splitting_type(D: int, p: int) -> Splitting:
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    k = kronecker(D, p)
    if k == 0:
        b = 0 if D % 2 == 0 else p
        return Splitting("ramified", p, (IdealRep(D, p, b),))
    if k == -1:
        return Splitting("inert", p, ())
    s = sqrt_mod_prime_power(D % p, p, 1)
    b = s if (s - D) % 2 == 0 else s + p
    P = IdealRep(D, p, b)
    return Splitting("split", p, (P, P.conj()))


def prime_ideals_above(D: int, q: int) -> list[IdealRep]:
    """Primitive prime ideals of norm q (empty if q is inert)."""
    k = kronecker(D, q)
    if k == -1:
        return []
    out = []
    for b in range(0, 2 * q):
        if (b - D) % 2 == 0 and (b * b - D) % (4 * q) == 0:
            I = IdealRep(D, q, b)
            if I not in out:
                out.append(I)
    return out


def class_reps_coprime_to(f: QuadForm, p: int, bound: Optional[int] = None) -> Iterator[IdealRep]:
    """Ideals in the class of f with norm prime to p: the unit ideal if f is
    principal, then prime ideals of increasing norm up to ``bound``."""
    D = f.disc
    target = reduce(f)
    if bound is None:
        bound = 6 * abs(D)
    if target == principal_form(D):
        yield unit_ideal(D)
    for q in primes():
        if q > bound:
            return
        if q == p or kronecker(D, q) < 0:
            continue
        for I in prime_ideals_above(D, q):
            if reduce(ideal_form(I)) == target:
                yield I


def class_rep_coprime_to(f: QuadForm, p: int, bound: Optional[int] = None) -> IdealRep:
    for I in class_reps_coprime_to(f, p, bound):
        return I
    raise RepresentativeNotFound(f"no prime ideal of norm <= {bound} prime to {p} in class {f}")
