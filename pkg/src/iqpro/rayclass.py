"""Ray class groups mod p^n and ring class groups of p-power conductor,
restricted to their p-parts, as an independent check on the structure of
the maximal abelian pro-p extension unramified outside p.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .abgroup import AbMap, FinAbGroup, cyclic_product, from_presentation, identity, p_part, vecmat
from .ideals import AlgInt, IdealRep, class_rep_coprime_to
from .localunits import PrincipalUnits, _generator_of_power, roots_of_unity_generator, sylow_basis
from .quadforms import class_group

DEFAULT_DEPTH = 6


class NotStabilized(RuntimeError):
    pass


@dataclass(frozen=True)
class RayClassGroup:
    """p-part of Cl_{p^n}(k) with its sigma-action.

    Presentation generators: the SNF generators of the p-part of
    (O_k/p^n)^x, then one ideal class c_j per cyclic factor of A_k.
    """

    D: int
    p: int
    n: int
    group: FinAbGroup
    unit_part: FinAbGroup
    unit_vectors: tuple[tuple[int, ...], ...]
    class_part: FinAbGroup
    reps: tuple[IdealRep, ...]
    units: PrincipalUnits

    @property
    def n_units(self) -> int:
        return len(self.unit_vectors)

    def order(self) -> int:
        return self.group.order()

    def unit_class(self, z: AlgInt) -> tuple[int, ...]:
        """Ray class of the principal ideal (z), z prime to p."""
        u = self.units.dlog_alg(z)
        return self.group.coords(list(u) + [0] * self.class_part.rank)

    @property
    def ideal_vectors(self) -> tuple[tuple[int, ...], ...]:
        """Ray classes of the chosen ideals, one per cyclic factor of A_k."""
        k, s = self.n_units, self.class_part.rank
        return tuple(self.group.coords([0] * k + [int(i == j) for i in range(s)]) for j in range(s))

    def quotient_by_units(self) -> FinAbGroup:
        return self.group.quotient(self.unit_vectors)

    def to_class_group(self) -> AbMap:
        """The surjection onto A_k forgetting the modulus."""
        k = self.n_units
        rows = tuple(self.class_part.reduce(self.group.lift(e)[k:]) for e in identity(self.group.rank))
        return AbMap(self.group, self.class_part, rows)


@lru_cache(maxsize=None)
def _class_data(D: int, p: int):
    cg = class_group(D)
    Ak, _ = p_part(cg.group, p)
    forms, orders = sylow_basis(cg, p)
    reps = tuple(class_rep_coprime_to(f, p) for f in forms)
    gammas = tuple(_generator_of_power(I, o) for I, o in zip(reps, orders))
    return Ak, tuple(orders), reps, gammas


@lru_cache(maxsize=None)
def ray_class_group(D: int, p: int, n: int) -> RayClassGroup:
    if n < 1:
        raise ValueError("level must be >= 1")
    Ak, orders, reps, gammas = _class_data(D, p)
    U = PrincipalUnits(D, p, n)
    k, s = U.group.rank, len(orders)
    rels = []
    for i, d in enumerate(U.group.invariants):
        rels.append([d * int(i == j) for j in range(k)] + [0] * s)
    mu = U.dlog_alg(roots_of_unity_generator(D))
    rels.append(list(mu) + [0] * s)
    for j, (o, g) in enumerate(zip(orders, gammas)):
        rels.append([-a for a in U.dlog_alg(g)] + [o * int(i == j) for i in range(s)])
    labels = tuple(f"u{i}" for i in range(k)) + tuple(f"c{j}" for j in range(s))
    G = from_presentation(k + s, rels, labels=labels)
    sig = []
    for i in range(k):
        sig.append(list(U.group.involution[i]) + [0] * s)
    for j, I in enumerate(reps):
        nrm = U.dlog_alg(AlgInt.from_int(I.norm))
        sig.append(list(nrm) + [-int(i == j) for i in range(s)])
    if G.rank:
        G = G.with_involution(sig)
    uvecs = tuple(G.coords([int(i == j) for i in range(k + s)]) for j in range(k))
    unit_part = G.subgroup(uvecs) if G.rank else G
    R = RayClassGroup(D, p, n, G, unit_part, uvecs, Ak, reps, U)
    Q = R.quotient_by_units()
    if Q.invariants != Ak.invariants:
        raise AssertionError(f"ray class group mod units is {Q}, expected {Ak}")
    return R


def inertia_image_dim(D: int, p: int, n: int) -> int:
    """dim_{F_p} of the unit (inertia) part of the ray class p-part."""
    R = ray_class_group(D, p, n)
    return R.unit_part.p_rank(p)


@lru_cache(maxsize=None)
def ring_class_group(D: int, p: int, n: int) -> FinAbGroup:
    """p-part of Cl(O_{p^n}): the ray class p-part modulo the classes of
    principal ideals generated by rational integers prime to p."""
    R = ray_class_group(D, p, n)
    return R.group.quotient([R.unit_class(AlgInt.from_int(1 + p))])


# ---------------------------------------------------------------------------
# stabilization


@dataclass(frozen=True)
class GabApprox:
    D: int
    p: int
    free_rank: int
    torsion: FinAbGroup
    levels_used: tuple[int, ...]
    stabilized: bool
    invariants_by_level: tuple[tuple[int, ...], ...]  # level 1, 2, ...


def _split_growing(chain: list[tuple[int, ...]], free: int) -> tuple[bool, tuple[int, ...], int]:
    """Given invariant factors on consecutive levels, decide whether the top
    ``free`` factors grow strictly and the rest agree on every level."""
    stable = True
    for inv in chain:
        if len(inv) < free:
            stable = False
    if stable:
        tors = [inv[: len(inv) - free] for inv in chain]
        tops = [inv[len(inv) - free :] for inv in chain]
        stable = all(t == tors[0] for t in tors)
        for a, b in zip(tops, tops[1:]):
            if not all(y > x for x, y in zip(a, b)):
                stable = False
        if stable and tors[0] and tops[0][0] <= tors[0][-1]:
            stable = False
    last = chain[-1]
    if stable:
        return True, last[: len(last) - free], free
    # not stable: count factors that grew on the last step
    prev = chain[-2] if len(chain) > 1 else ()
    grown = sum(1 for x, y in zip(reversed(prev), reversed(last)) if y > x)
    grown += max(0, len(last) - len(prev))
    grown = min(grown, len(last))
    return False, last[: len(last) - grown], grown


@lru_cache(maxsize=None)
def stabilized_gab(D: int, p: int, n_max: int = DEFAULT_DEPTH) -> GabApprox:
    """Torsion of G^ab read off the ray class p-parts at levels 1..n_max."""
    if n_max < 3:
        raise ValueError("need at least three levels")
    invs = tuple(ray_class_group(D, p, n).group.invariants for n in range(1, n_max + 1))
    window = list(invs[-3:])
    ok, tors, free = _split_growing(window, 2)
    return GabApprox(D, p, free, cyclic_product(list(tors)), tuple(range(n_max - 2, n_max + 1)), ok, invs)


def gab_dim_mod_p(D: int, p: int, n_max: int = DEFAULT_DEPTH) -> int:
    """2 + dim_{F_p}(G^ab_tors / p), the oracle value of d_k."""
    g = stabilized_gab(D, p, n_max)
    if not g.stabilized:
        raise NotStabilized(f"ray class tower for D={D}, p={p} not stable by level {n_max}")
    return 2 + g.torsion.p_rank(p)


@dataclass(frozen=True)
class AntiUnramified:
    t: int
    confident: bool
    stable_torsion: FinAbGroup
    invariants_by_level: tuple[tuple[int, ...], ...]


@lru_cache(maxsize=None)
def anti_unramified_analysis(D: int, p: int, n_max: int = DEFAULT_DEPTH) -> AntiUnramified:
    if n_max < 3:
        raise ValueError("need at least three levels")
    Ak, *_ = _class_data(D, p)
    invs = tuple(ring_class_group(D, p, n).invariants for n in range(1, n_max + 1))
    if Ak.is_trivial():
        ok, tors, _ = _split_growing(list(invs[-3:]), 1)
        return AntiUnramified(0, True, cyclic_product(list(tors)), invs)
    ok, tors, free = _split_growing(list(invs[-3:]), 1)
    e_exp = max(tors) if tors else 1
    R = ray_class_group(D, p, n_max)
    Rn = ring_class_group(D, p, n_max)
    top = invs[-1][-1] if invs[-1] else 1
    gens = []
    for i, d in enumerate(Rn.invariants):
        m = d // min(d, e_exp) if e_exp > 1 else d
        v = [m * int(j == i) for j in range(Rn.rank)]
        pres = vecmat(v, Rn.from_snf, Rn.ngens)
        gens.append(Ak.reduce(pres[R.n_units:]))
    img = Ak.subgroup([g for g in gens if any(g)]) if any(any(g) for g in gens) else None
    size = img.order() if img is not None else 1
    t = _vp(Ak.order() // size, p)
    confident = ok and top >= e_exp * Ak.exponent()
    return AntiUnramified(t, confident, cyclic_product(list(tors)), invs)


def anti_unramified_degree(D: int, p: int, n_max: int = DEFAULT_DEPTH) -> tuple[int, bool]:
    """(t, confident) with p^t the degree of the maximal unramified
    subextension of the anticyclotomic Z_p-extension."""
    a = anti_unramified_analysis(D, p, n_max)
    return a.t, a.confident


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0 and n:
        n //= p
        v += 1
    return v
