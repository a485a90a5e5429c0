"""Local units at p: the p-part of (O_k/p^n)^x with discrete logarithms,
the F_p-space prod_{P|p} U_P/U_P^p with its sigma-eigenspaces, and the
connecting map from A_k[p] whose image dimension is delta_k.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .abgroup import (
    AbMap,
    FinAbGroup,
    cyclic_product,
    from_presentation,
    image_dim_mod_p,
    nullspace_mod_p,
    p_part,
    rank_mod_p,
    solve_mod_p,
    vecmat,
)
from .arith import sqrt_mod_prime_power
from .ideals import AlgInt, IdealRep, Splitting, class_reps_coprime_to, ideal_pow, principal_generator, splitting_type, w_mul
from .quadforms import ClassGroup, class_group, power

log = logging.getLogger(__name__)

Residue = tuple[int, int]  # u + v*w modulo p^n


class PrecisionError(RuntimeError):
    pass


class InternalConsistencyError(AssertionError):
    pass


def is_case2(D: int, p: int) -> bool:
    """p = 3 and D = -3 mod 9 (mu_3 lies in the completion at the prime above 3)."""
    return p == 3 and D % 9 == 6


def roots_of_unity_generator(D: int) -> AlgInt:
    if D == -3:
        return AlgInt(1, 1)
    if D == -4:
        return AlgInt(0, 1)
    return AlgInt(-2, 0)


class PrincipalUnits:
    """p-Sylow subgroup of (O_k / p^n O_k)^x.

    On U^(i0) (i0 = 2 for ramified p = 3, else 1) the p-adic logarithm is an
    isomorphism onto J^i0 / p^n O, J the product of the primes above p; for
    ramified p = 3 one more generator 1 + pi covers U^(1)/U^(2) = F_3.
    """

    def __init__(self, D: int, p: int, n: int):
        if n < 1:
            raise ValueError("level must be >= 1")
        self.D, self.p, self.n = D, p, n
        self.mod = p**n
        self.splitting: Splitting = splitting_type(D, p)
        kind = self.splitting.kind
        self.e = self.splitting.e
        self.i0 = 2 if (kind == "ramified" and p == 3) else 1
        if kind == "ramified" and self.i0 == 1:
            L = self.splitting.primes[0].basis_w()
        else:
            L = [[p, 0], [0, p]]
        self.L = L
        det = L[0][0] * L[1][1] - L[0][1] * L[1][0]
        self.Linv = [[Fraction(L[1][1], det), Fraction(-L[0][1], det)],
                     [Fraction(-L[1][0], det), Fraction(L[0][0], det)]]
        teich = {"split": (p - 1) ** 2, "inert": p * p - 1, "ramified": p - 1}[kind]
        self.idem = teich * pow(teich, -1, p ** (2 * n))
        self.pi: Optional[Residue] = None
        if self.i0 == 2:
            P = self.splitting.primes[0]
            self.pi = tuple(P.basis_w()[1])
        self._log_terms = self._plan_log()
        self.group = self._build_group()

    # -- ring arithmetic mod p^n
    def red(self, z: Sequence[int]) -> Residue:
        return z[0] % self.mod, z[1] % self.mod

    def mul(self, s: Residue, t: Residue) -> Residue:
        return self.red(w_mul(self.D, s, t))

    def rpow(self, z: Residue, e: int) -> Residue:
        out, base = (1, 0), self.red(z)
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def conj(self, z: Residue) -> Residue:
        return self.red((z[0] + z[1] * self.D, -z[1]))

    def inv(self, z: Residue) -> Residue:
        nz = self.mul(z, self.conj(z))
        if nz[1] % self.mod:
            raise AssertionError("norm is not rational")
        k = pow(nz[0], -1, self.mod)
        c = self.conj(z)
        return self.red((c[0] * k, c[1] * k))

    def residue(self, x: AlgInt) -> Residue:
        return self.red(x.to_w(self.D))

    # -- logarithm
    def _plan_log(self) -> tuple[int, int]:
        p, n, e, i0 = self.p, self.n, self.e, self.i0
        k = 1
        while True:
            depth = (i0 * k) // e
            if depth - _ilog(k, p) >= n and k > 1:
                break
            k += 1
        return k, _ilog(k, p)

    def _in_lattice_coords(self, a: Residue) -> list[int]:
        c = [a[0] * self.Linv[0][j] + a[1] * self.Linv[1][j] for j in range(2)]
        if any(x.denominator != 1 for x in c):
            raise ValueError("element is not in the log lattice")
        return [int(x) for x in c]

    def log_coords(self, x: Residue) -> list[int]:
        """Coordinates of log(x) in the lattice basis, for x in U^(i0)."""
        kmax, extra = self._log_terms
        M = self.p ** (self.n + extra)
        a = ((x[0] - 1) % M, x[1] % M)
        self._in_lattice_coords(self.red(a))
        total = [0, 0]
        ak = (1, 0)
        for k in range(1, kmax + 1):
            ak = w_mul(self.D, ak, a)
            ak = (ak[0] % M, ak[1] % M)
            v = _vp0(k, self.p)
            q = self.p**v
            if ak[0] % q or ak[1] % q:
                raise AssertionError("logarithm term not divisible")
            unit = pow(k // q, -1, M)
            sign = 1 if k % 2 else -1
            total[0] += sign * (ak[0] // q) * unit
            total[1] += sign * (ak[1] // q) * unit
        return self._in_lattice_coords(self.red(total))

    # -- presentation
    def _build_group(self) -> FinAbGroup:
        pn = self.mod
        lrels = [self._in_lattice_coords((pn * (i == 0), pn * (i == 1))) for i in range(2)]
        if self.i0 == 1:
            labels = ("log1", "log2")
            rels = lrels
            sig = [self._in_lattice_coords(self.conj(tuple(self.L[i]))) for i in range(2)]
        else:
            labels = ("1+pi", "log1", "log2")
            g3 = self.rpow(self.g0, 3)
            rels = [[0] + r for r in lrels] + [[3] + [-c for c in self.log_coords(g3)]]
            sig = [self.dlog_u1(self.conj(self.g0))]
            sig += [[0] + self._in_lattice_coords(self.conj(tuple(self.L[i]))) for i in range(2)]
        G = from_presentation(len(labels), rels, labels=labels)
        if G.rank:
            G = G.with_involution(sig)
        return G

    @property
    def g0(self) -> Residue:
        return self.red((1 + self.pi[0], self.pi[1]))

    def dlog_u1(self, x: Residue) -> list[int]:
        """Presentation coordinates of x = 1 mod J."""
        x = self.red(x)
        if self.i0 == 1:
            return self.log_coords(x)
        ginv = self.inv(self.g0)
        y = x
        for c in range(3):
            if (y[0] - 1) % self.p == 0 and y[1] % self.p == 0:
                return [c] + self.log_coords(y)
            y = self.mul(y, ginv)
        raise ValueError("element is not a principal unit")

    def dlog(self, z: Residue) -> tuple[int, ...]:
        """SNF coordinates of the p-component of the unit z."""
        x = self.rpow(z, self.idem)
        return self.group.coords(self.dlog_u1(x))

    def dlog_alg(self, z: AlgInt) -> tuple[int, ...]:
        if z.norm(self.D) % self.p == 0:
            raise ValueError("element is not prime to p")
        return self.dlog(self.residue(z))


def _ilog(k: int, p: int) -> int:
    v = 0
    while p ** (v + 1) <= k:
        v += 1
    return v


def _vp0(k: int, p: int) -> int:
    v = 0
    while k % p == 0:
        k //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# prod U_P / U_P^p


@dataclass(frozen=True)
class LocalUnitSpace:
    D: int
    p: int
    c: int
    splitting: Splitting
    units: PrincipalUnits = field(repr=False)
    sigma: tuple[tuple[int, ...], ...]
    tags: tuple[str, ...]
    basis: tuple[tuple[int, ...], ...]  # rows in raw F_p coordinates
    plus_dim: int
    minus_dim: int
    mu_image: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def raw(self, z: AlgInt) -> tuple[int, ...]:
        return tuple(a % self.p for a in self.units.dlog_alg(z))

    def coordinates(self, v: Sequence[int]) -> tuple[int, ...]:
        sol = solve_mod_p(self.basis, v, self.p)
        if sol is None:
            raise AssertionError("basis does not span")
        return tuple(sol)

    def mu_coordinates(self) -> list[tuple[int, ...]]:
        return [self.coordinates(v) for v in self.mu_image]


def expected_dims(D: int, p: int) -> tuple[int, int, int]:
    """(dim, plus, minus) of prod U_P/U_P^p."""
    minus = 2 if is_case2(D, p) else 1
    return 1 + minus, 1, minus


def _space_at(D: int, p: int, c: int) -> tuple[PrincipalUnits, list[list[int]], int, int, int]:
    U = PrincipalUnits(D, p, c)
    G = U.group
    k = G.rank
    S = [[a % p for a in row] for row in G.involution] if k else []
    I = [[int(i == j) for j in range(k)] for i in range(k)]
    plus = k - rank_mod_p([[S[i][j] - I[i][j] for j in range(k)] for i in range(k)], p) if k else 0
    minus = k - rank_mod_p([[S[i][j] + I[i][j] for j in range(k)] for i in range(k)], p) if k else 0
    return U, S, k, plus, minus


def local_unit_quotient(D: int, p: int, c: Optional[int] = None, max_c: int = 12) -> LocalUnitSpace:
    """prod_{P|p} U_P/U_P^p computed from (O_k/p^c)^x, raising c until the
    dimensions match the local-field formula and are stable in c."""
    spl = splitting_type(D, p)
    floor = 5 if (spl.kind == "ramified" and p == 3) else 2
    c = floor if c is None else c
    want = expected_dims(D, p)
    while True:
        if c > max_c:
            raise PrecisionError(f"unit quotient for D={D}, p={p} did not stabilise by c={max_c}")
        U, S, k, plus, minus = _space_at(D, p, c)
        if (k, plus, minus) == want:
            nxt = _space_at(D, p, c + 1)
            if nxt[2:] == (k, plus, minus):
                break
        log.debug("escalating unit precision for D=%s p=%s past c=%s", D, p, c)
        c += 1
    space = _tagged(D, p, c, spl, U, S)
    return space


def _tagged(D, p, c, spl, U: PrincipalUnits, S) -> LocalUnitSpace:
    k = U.group.rank

    def raw(z: Residue) -> tuple[int, ...]:
        return tuple(a % p for a in U.dlog(z))

    def sig(v):
        return tuple(a % p for a in vecmat(v, S, k))

    minus_basis = nullspace_mod_p([[S[j][i] + (i == j) for j in range(k)] for i in range(k)], p, k)
    minus_basis = [tuple(v) for v in minus_basis]
    mod = p**c
    if spl.kind == "split":
        b = spl.primes[0].b
        t = sqrt_mod_prime_power(D, p, c)
        if (t + b) % p:
            t = mod - t
        tinv = pow(2 * t, -1, mod)
        e_P = ((t - D) * tinv % mod, 2 * tinv % mod)
        x = U.red((1 + p * e_P[0], p * e_P[1]))
        aP = raw(x)
        tags = ("alpha_P", "alpha_P^sigma")
        basis = [aP, sig(aP)]
    else:
        aP = raw(U.red((1 + p, 0)))
        if sig(aP) != aP or not any(aP):
            raise InternalConsistencyError("1+p does not give a plus vector")
        if is_case2(D, p):
            m = -D // 3
            s = sqrt_mod_prime_power(m, 3, c)
            sinv = pow(s, -1, mod)
            inv2 = pow(2, -1, mod)
            zeta = U.red(((-1 - D * sinv) * inv2, sinv))
            if U.rpow(zeta, 3) != (1, 0) or zeta == (1, 0):
                raise InternalConsistencyError("local cube root of unity not found")
            b1 = raw(zeta)
            b2 = next(v for v in minus_basis if rank_mod_p([b1, v], p) == 2)
            tags = ("alpha_P", "beta_1P", "beta_2P")
            basis = [aP, b1, b2]
        else:
            tags = ("alpha_P", "beta_1P")
            basis = [aP, minus_basis[0]]
    if rank_mod_p(basis, p) != k:
        raise InternalConsistencyError("tagged vectors are not a basis")
    mu = raw(U.residue(roots_of_unity_generator(D)))
    mu_image = (mu,) if any(mu) else ()
    want = expected_dims(D, p)
    return LocalUnitSpace(D, p, c, spl, U, tuple(tuple(r) for r in S), tags,
                          tuple(tuple(v) for v in basis), want[1], want[2], mu_image)


def unit_image(x: AlgInt, space: LocalUnitSpace) -> tuple[int, ...]:
    """Coordinates of x (prime to p) in prod U_P/U_P^p w.r.t. the tagged basis."""
    if x.norm(space.D) % space.p == 0:
        raise ValueError("element is not prime to p")
    return space.coordinates(space.raw(x))


@dataclass(frozen=True)
class UnitResidue:
    """Residues of a global element at each prime above p, modulo P^(c*e_P)."""

    primes: tuple[str, ...]
    residues: tuple[tuple[int, ...], ...]  # an integer mod p^c when O/P^c = Z/p^c, else (u, v) in 1, w


def unit_residue(x: AlgInt, space: LocalUnitSpace) -> UnitResidue:
    D, p, c = space.D, space.p, space.c
    if x.norm(D) % p == 0:
        raise ValueError("element is not prime to p")
    q = p**c
    u, v = x.to_w(D)
    spl = space.splitting
    if spl.kind == "split":
        # w -> (D + t)/2 with t^2 = D mod p^c, t matched to P
        t = sqrt_mod_prime_power(D, p, c)
        if (t + spl.primes[0].b) % p:
            t = q - t
        out = []
        for s in (t, q - t):
            wv = (D + s) * pow(2, -1, q) % q
            out.append(((u + v * wv) % q,))
        return UnitResidue(tuple(str(P) for P in spl.primes), tuple(out))
    name = str(spl.primes[0]) if spl.primes else f"({p})"
    return UnitResidue((name,), ((u % q, v % q),))


# ---------------------------------------------------------------------------
# connecting map  A_k[p] -> prod U_P/U_P^p


@dataclass(frozen=True)
class ConnectingMap:
    D: int
    p: int
    r: int
    delta: int
    classes: tuple  # forms spanning A_k[p]
    reps: tuple  # chosen ideals, prime to p
    generators: tuple  # generators of rep^p
    images: tuple  # tagged coordinates
    map: AbMap
    space: LocalUnitSpace


def sylow_basis(cg: ClassGroup, p: int) -> tuple[list, list[int]]:
    """SNF generator forms of A_k and their orders."""
    Ak, r = p_part(cg.group, p)
    forms = [cg.form_of(Ak.lift([int(i == j) for i in range(Ak.rank)])) for j in range(Ak.rank)]
    return forms, list(Ak.invariants)


def _generator_of_power(I: IdealRep, e: int) -> AlgInt:
    content, J = ideal_pow(I, e)
    g = principal_generator(J)
    if g is None:
        raise InternalConsistencyError(f"{I}^{e} is not principal")
    return g.scale(content)


def connecting_map(D: int, p: int, space: Optional[LocalUnitSpace] = None, rep_index: int = 0,
                   bound: Optional[int] = None) -> ConnectingMap:
    """phi_k: A_k[p] -> prod U_P/U_P^p modulo global units; rep_index picks
    which class representative (in scan order) is used for each class."""
    cg = class_group(D)
    space = space or local_unit_quotient(D, p)
    forms, orders = sylow_basis(cg, p)
    classes = [power(f, o // p) for f, o in zip(forms, orders)]
    reps, gens, images = [], [], []
    for A in classes:
        it = class_reps_coprime_to(A, p, bound)
        I = None
        for _ in range(rep_index + 1):
            I = next(it, None)
        if I is None:
            from .ideals import RepresentativeNotFound
            raise RepresentativeNotFound(f"representative #{rep_index} of class {A} not found")
        a = _generator_of_power(I, p)
        reps.append(I)
        gens.append(a)
        images.append(unit_image(a, space))
    r = len(classes)
    dom = cyclic_product([p] * r)
    cod = cyclic_product([p] * space.dim)
    mu = space.mu_coordinates()
    if mu:
        cod = cod.quotient([cod.coords(v) for v in mu])
    rows = tuple(cod.coords(vecmat(dom.lift(e), images, space.dim)) for e in _eye(dom.rank))
    phi = AbMap(dom, cod, rows)
    delta = image_dim_mod_p(phi, p)
    if delta > 1 and not (is_case2(D, p) and D != -3):
        raise InternalConsistencyError(f"delta_k = {delta} > 1 outside the ramified p=3 case")
    return ConnectingMap(D, p, r, delta, tuple(classes), tuple(reps), tuple(gens), tuple(images), phi, space)


def _eye(n):
    return [[int(i == j) for i in range(n)] for j in range(n)]


def delta_k(D: int, p: int) -> int:
    return connecting_map(D, p).delta
