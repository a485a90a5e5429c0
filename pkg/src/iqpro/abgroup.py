"""Finite abelian groups from integer presentations.

Elements are row vectors.  A group carries its presentation generators
(``labels``) and two matrices relating presentation coordinates to the
Smith normal form basis:

    snf_coords = pres_coords @ to_snf        (mod invariants)
    pres_coords = snf_coords @ from_snf
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, prod
from typing import Optional, Sequence

Matrix = list[list[int]]


class InfiniteCokernelError(ValueError):
    """The relation lattice does not have full rank."""

    def __init__(self, free_rank: int):
        super().__init__(f"cokernel has free rank {free_rank}")
        self.free_rank = free_rank


# ---------------------------------------------------------------------------
# integer matrices


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    if not A:
        return []
    cols = len(B[0]) if B else 0
    return [[sum(a * B[k][j] for k, a in enumerate(row) if a) for j in range(cols)] for row in A]


def vecmat(v: Sequence[int], M: Sequence[Sequence[int]], ncols: Optional[int] = None) -> list[int]:
    n = ncols if ncols is not None else (len(M[0]) if M else 0)
    out = [0] * n
    for k, a in enumerate(v):
        if a:
            row = M[k]
            for j in range(n):
                out[j] += a * row[j]
    return out


def smith_normal_form(A: Sequence[Sequence[int]]):
    """Return (diag, U, V, Vinv) with U @ A @ V diagonal and diag[i] | diag[i+1].

    ``diag`` has length min(rows, cols); zero entries mean free rank.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    M = [list(r) for r in A]
    U = identity(m)
    V = identity(n)
    Vi = identity(n)

    def swap_rows(i, j):
        M[i], M[j] = M[j], M[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in M:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        M[dst] = [a + k * b for a, b in zip(M[dst], M[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):  # col_dst += k * col_src
        for r in M:
            r[dst] += k * r[src]
        for r in V:
            r[dst] += k * r[src]
        Vi[src] = [a - k * b for a, b in zip(Vi[src], Vi[dst])]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if M[i][j] and (best is None or abs(M[i][j]) < abs(M[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            if best[0] != t:
                swap_rows(t, best[0])
            if best[1] != t:
                swap_cols(t, best[1])
            piv = M[t][t]
            dirty = False
            for i in range(t + 1, m):
                if M[i][t]:
                    add_row(i, t, -(M[i][t] // piv))
                    dirty |= M[i][t] != 0
            for j in range(t + 1, n):
                if M[t][j]:
                    add_col(j, t, -(M[t][j] // piv))
                    dirty |= M[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if M[i][j] % piv),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if t < m and t < n and M[t][t] < 0:
            M[t] = [-a for a in M[t]]
            U[t] = [-a for a in U[t]]
    diag = [M[i][i] for i in range(min(m, n))]
    return diag, U, V, Vi


def echelon(rows: Sequence[Sequence[int]], ncols: int) -> tuple[Matrix, Matrix]:
    """Integer row echelon form on the first ``ncols`` columns.

    Returns (pivot_rows, rest) where ``rest`` are the remaining rows, all of
    which vanish on the first ``ncols`` columns.
    """
    R = [list(r) for r in rows if any(r)]
    piv: Matrix = []
    for c in range(ncols):
        while True:
            nz = [r for r in R if r[c]]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[c]))
            top = nz[0]
            for r in nz[1:]:
                q = r[c] // top[c]
                for k in range(len(r)):
                    r[k] -= q * top[k]
            R = [r for r in R if any(r)]
        nz = [r for r in R if r[c]]
        if nz:
            r = nz[0]
            if r[c] < 0:
                r[:] = [-a for a in r]
            R.remove(r)
            piv.append(r)
    return piv, R


def hnf(rows: Sequence[Sequence[int]]) -> Matrix:
    """Row-style Hermite basis of the lattice spanned by ``rows``."""
    if not rows:
        return []
    n = len(rows[0])
    piv, _ = echelon(rows, n)
    # reduce entries above pivots
    for i, r in enumerate(piv):
        c = next(k for k, a in enumerate(r) if a)
        for s in piv[:i]:
            q = s[c] // r[c]
            if q:
                for k in range(n):
                    s[k] -= q * r[k]
    return piv


def _lattice_kernel(vectors: Sequence[Sequence[int]], moduli: Sequence[int]) -> Matrix:
    """Basis rows of {c in Z^s : sum c_j v_j = 0 in (+) Z/moduli}."""
    s = len(vectors)
    k = len(moduli)
    rows = [list(v) + [int(i == j) for i in range(s)] for j, v in enumerate(vectors)]
    rows += [[d * int(i == j) for i in range(k)] + [0] * s for j, d in enumerate(moduli)]
    _, rest = echelon(rows, k)
    return hnf([r[k:] for r in rest])


# ---------------------------------------------------------------------------
# linear algebra over F_p


def rref_mod_p(rows: Sequence[Sequence[int]], p: int) -> tuple[Matrix, list[int]]:
    R = [[a % p for a in r] for r in rows]
    ncols = len(R[0]) if R else 0
    pivots: list[int] = []
    i = 0
    for c in range(ncols):
        j = next((j for j in range(i, len(R)) if R[j][c]), None)
        if j is None:
            continue
        R[i], R[j] = R[j], R[i]
        inv = pow(R[i][c], -1, p)
        R[i] = [a * inv % p for a in R[i]]
        for j in range(len(R)):
            if j != i and R[j][c]:
                f = R[j][c]
                R[j] = [(a - f * b) % p for a, b in zip(R[j], R[i])]
        pivots.append(c)
        i += 1
    return R[:i], pivots


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    return len(rref_mod_p(rows, p)[0]) if rows else 0


def nullspace_mod_p(A: Sequence[Sequence[int]], p: int, n: int) -> Matrix:
    """Basis of {x in F_p^n : A x^T = 0} (A given by rows of length n)."""
    R, piv = rref_mod_p(A, p) if A else ([], [])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        x = [0] * n
        x[f] = 1
        for r, c in zip(R, piv):
            x[c] = -r[f] % p
        basis.append(x)
    return basis


def solve_mod_p(basis: Sequence[Sequence[int]], v: Sequence[int], p: int) -> Optional[list[int]]:
    """Coefficients c with sum c_i basis_i = v over F_p, or None."""
    k = len(basis)
    n = len(v)
    # columns = basis vectors, augmented by v
    A = [[basis[i][j] for i in range(k)] + [v[j]] for j in range(n)]
    R, piv = rref_mod_p(A, p)
    if k in piv:
        return None
    c = [0] * k
    for r, col in zip(R, piv):
        c[col] = r[k]
    return c


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class FinAbGroup:
    """Finite abelian group  (+)_i Z/invariants[i]  with d_i | d_{i+1}."""

    invariants: tuple[int, ...]
    labels: tuple = ()
    to_snf: tuple[tuple[int, ...], ...] = ()
    from_snf: tuple[tuple[int, ...], ...] = ()
    involution: Optional[tuple[tuple[int, ...], ...]] = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        for a, b in zip(self.invariants, self.invariants[1:]):
            if b % a:
                raise ValueError(f"invariants {self.invariants} are not a divisibility chain")
        if any(d < 2 for d in self.invariants):
            raise ValueError("invariant factors must be >= 2")

    # -- basic data
    @property
    def rank(self) -> int:
        return len(self.invariants)

    @property
    def ngens(self) -> int:
        return len(self.to_snf)

    def order(self) -> int:
        return prod(self.invariants)

    def exponent(self) -> int:
        return self.invariants[-1] if self.invariants else 1

    def is_trivial(self) -> bool:
        return not self.invariants

    def p_rank(self, p: int) -> int:
        return sum(1 for d in self.invariants if d % p == 0)

    def reduce(self, y: Sequence[int]) -> tuple[int, ...]:
        return tuple(a % d for a, d in zip(y, self.invariants))

    def coords(self, x: Sequence[int]) -> tuple[int, ...]:
        """SNF coordinates of a vector in presentation coordinates."""
        return self.reduce(vecmat(x, self.to_snf, self.rank))

    def lift(self, y: Sequence[int]) -> list[int]:
        return vecmat(y, self.from_snf, self.ngens)

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def add(self, y: Sequence[int], z: Sequence[int]) -> tuple[int, ...]:
        return self.reduce([a + b for a, b in zip(y, z)])

    def scale(self, k: int, y: Sequence[int]) -> tuple[int, ...]:
        return self.reduce([k * a for a in y])

    def element_order(self, y: Sequence[int]) -> int:
        o = 1
        for a, d in zip(self.reduce(y), self.invariants):
            q = d // gcd(a, d)
            o = o * q // gcd(o, q)
        return o

    def sigma(self, y: Sequence[int]) -> tuple[int, ...]:
        if not self.rank:
            return ()
        if self.involution is None:
            raise ValueError("group has no involution")
        return self.reduce(vecmat(y, self.involution, self.rank))

    def describe(self) -> str:
        if not self.invariants:
            return "0"
        return " x ".join(f"Z/{d}" for d in self.invariants)

    def __str__(self):
        return self.describe()

    # -- constructions
    def with_involution(self, pres_matrix: Sequence[Sequence[int]]) -> "FinAbGroup":
        """Attach sigma given on presentation generators (rows = images)."""
        S = [self.coords(vecmat(self.lift(e), pres_matrix, self.ngens)) for e in identity(self.rank)]
        return self.with_snf_involution(S)

    def with_snf_involution(self, S: Sequence[Sequence[int]]) -> "FinAbGroup":
        S = tuple(self.reduce(r) for r in S)
        for i, d in enumerate(self.invariants):
            if any(self.reduce([d * a for a in S[i]])):
                raise ValueError("involution does not respect relations")
        for e in identity(self.rank):
            if self.reduce(vecmat(vecmat(e, S, self.rank), S, self.rank)) != self.reduce(e):
                raise ValueError("sigma does not square to the identity")
        return FinAbGroup(self.invariants, self.labels, self.to_snf, self.from_snf, S, self.name)

    def subgroup(self, vectors: Sequence[Sequence[int]], labels: Optional[Sequence] = None) -> "FinAbGroup":
        """Subgroup generated by ``vectors`` (SNF coordinates).

        The result is presented on the given vectors; its ``labels`` are the
        vectors themselves unless other labels are supplied.
        """
        vectors = [self.reduce(v) for v in vectors]
        if not vectors:
            return trivial_group()
        ker = _lattice_kernel(vectors, self.invariants)
        H = from_presentation(len(vectors), ker, labels=tuple(labels) if labels else tuple(vectors))
        if self.involution is not None and labels is None:
            S = [self.coords_in_subgroup(H, self.sigma(H.embed(e))) for e in identity(H.rank)]
            H = H.with_snf_involution(S)
        return H

    def coords_in_subgroup(self, H: "FinAbGroup", y: Sequence[int]) -> tuple[int, ...]:
        """Coordinates in H (a subgroup produced by ``subgroup``) of an element of self."""
        basis = [H.embed(e) for e in identity(H.rank)]
        sol = _solve_in_group(self, basis, self.reduce(y))
        if sol is None:
            raise ValueError("element is not in the subgroup")
        return H.reduce(sol)

    def embed(self, y: Sequence[int]) -> tuple:
        """For a subgroup built by ``subgroup``: ambient coordinates of y."""
        x = self.lift(y)
        n = len(self.labels[0])
        out = [0] * n
        for a, v in zip(x, self.labels):
            for j in range(n):
                out[j] += a * v[j]
        return tuple(out)

    def quotient(self, vectors: Sequence[Sequence[int]]) -> "FinAbGroup":
        """self / <vectors>; presentation coordinates are kept."""
        k = self.rank
        rels = [[d * int(i == j) for i in range(k)] for j, d in enumerate(self.invariants)]
        rels += [list(self.reduce(v)) for v in vectors]
        Q = from_presentation(k, rels) if k else trivial_group()
        to = tuple(tuple(r) for r in matmul(self.to_snf, Q.to_snf)) if self.to_snf and Q.rank else ()
        fr = tuple(tuple(r) for r in matmul(Q.from_snf, self.from_snf)) if Q.rank else ()
        if not Q.rank:
            to = tuple(() for _ in self.to_snf)
        return FinAbGroup(Q.invariants, self.labels, to, fr, None, self.name)


def _solve_in_group(G: FinAbGroup, basis: Sequence[Sequence[int]], y: Sequence[int]) -> Optional[list[int]]:
    """Integers c with sum c_i basis_i = y in G, or None."""
    k = G.rank
    s = len(basis)
    rows = [list(G.reduce(b)) + [int(i == j) for i in range(s)] + [0] for j, b in enumerate(basis)]
    rows += [[d * int(i == j) for i in range(k)] + [0] * (s + 1) for j, d in enumerate(G.invariants)]
    rows.append([-a for a in y] + [0] * s + [1])
    _, rest = echelon(rows, k)
    # want a kernel vector with last coordinate 1
    piv, _ = echelon([r[k + s :] + r[k : k + s] for r in rest], 1)
    if not piv or piv[0][0] != 1:
        return None
    return piv[0][1:]


def trivial_group(ngens: int = 0, labels: tuple = ()) -> FinAbGroup:
    return FinAbGroup((), labels, tuple(() for _ in range(ngens)), ())


def from_presentation(n_generators: int, relations: Sequence[Sequence[int]], labels: tuple = ()) -> FinAbGroup:
    """Group on n generators modulo the row lattice of ``relations``."""
    if n_generators == 0:
        return trivial_group(0, labels)
    rels = [list(r) for r in relations if any(r)]
    if len(rels) < n_generators:
        rels += [[0] * n_generators] * (n_generators - len(rels))
    diag, _, V, Vi = smith_normal_form(rels)
    zeros = sum(1 for d in diag if d == 0)
    if zeros:
        raise InfiniteCokernelError(zeros)
    keep = [i for i, d in enumerate(diag) if d > 1]
    to = tuple(tuple(V[r][i] for i in keep) for r in range(n_generators))
    fr = tuple(tuple(Vi[i]) for i in keep)
    return FinAbGroup(tuple(diag[i] for i in keep), tuple(labels), to, fr)


def cyclic_product(invariants: Sequence[int]) -> FinAbGroup:
    """(+) Z/n_i given by its (not necessarily SNF) cyclic factors."""
    n = len(invariants)
    return from_presentation(n, [[d * int(i == j) for i in range(n)] for j, d in enumerate(invariants)])


def p_part(G: FinAbGroup, p: int) -> tuple[FinAbGroup, int]:
    """p-Sylow subgroup of G and r = dim_{F_p} G[p]."""
    idx = [i for i, d in enumerate(G.invariants) if d % p == 0]
    pk, m = [], []
    for i in idx:
        d = G.invariants[i]
        q = p ** _vp(d, p)
        pk.append(q)
        m.append(d // q)
    k = G.rank
    # projection y -> y_i * m_i^{-1} mod p^a_i ; inclusion generator m_i * g_i
    P = [[0] * len(idx) for _ in range(k)]
    E = [[0] * k for _ in idx]
    for t, i in enumerate(idx):
        P[i][t] = pow(m[t], -1, pk[t]) if pk[t] > 1 else 0
        E[t][i] = m[t]
    to = tuple(tuple(r) for r in matmul(G.to_snf, P)) if G.to_snf else ()
    fr = tuple(tuple(r) for r in matmul(E, G.from_snf)) if idx else ()
    inv = None
    if G.involution is not None:
        inv = tuple(
            tuple(a % pk[j] for j, a in enumerate(row))
            for row in matmul(matmul(E, G.involution), P)
        )
    S = FinAbGroup(tuple(pk), G.labels, to, fr, inv, G.name)
    return S, len(idx)


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def sigma_split(G: FinAbGroup, p: int) -> tuple[FinAbGroup, FinAbGroup]:
    """(G^+, G^-) for an odd p-group G with involution, via (1 +- sigma)/2."""
    if p == 2:
        raise ValueError("eigenspace split needs 2 invertible")
    if G.involution is None:
        raise ValueError("group has no involution")
    if G.order() != p ** _vp(G.order(), p):
        raise ValueError(f"not a {p}-group")
    half = (G.exponent() + 1) // 2
    k = G.rank
    S = G.involution
    plus = [G.reduce([half * (int(i == j) + S[i][j]) for j in range(k)]) for i in range(k)]
    minus = [G.reduce([half * (int(i == j) - S[i][j]) for j in range(k)]) for i in range(k)]
    Gp = G.subgroup([v for v in plus if any(v)])
    Gm = G.subgroup([v for v in minus if any(v)])
    if Gp.rank:
        Gp = Gp.with_snf_involution(identity(Gp.rank))
    if Gm.rank:
        Gm = Gm.with_snf_involution([[-int(i == j) for j in range(Gm.rank)] for i in range(Gm.rank)])
    return Gp, Gm


def embeds_into(H: FinAbGroup, G: FinAbGroup, p: int) -> bool:
    """Whether the p-group H is isomorphic to a subgroup of the p-group G."""
    h = sorted((_vp(d, p) for d in H.invariants), reverse=True)
    g = sorted((_vp(d, p) for d in G.invariants), reverse=True)
    return len(h) <= len(g) and all(a <= b for a, b in zip(h, g))


@dataclass(frozen=True)
class AbMap:
    """Homomorphism given by images of the domain's SNF generators."""

    domain: FinAbGroup
    codomain: FinAbGroup
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.matrix) != self.domain.rank:
            raise ValueError("one image row per domain generator")
        for d, row in zip(self.domain.invariants, self.matrix):
            if any(self.codomain.reduce([d * a for a in row])):
                raise ValueError("map is not well defined on the relations")

    def __call__(self, y: Sequence[int]) -> tuple[int, ...]:
        return self.codomain.reduce(vecmat(y, self.matrix, self.codomain.rank))

    def image(self) -> FinAbGroup:
        return self.codomain.subgroup([r for r in self.matrix if any(self.codomain.reduce(r))])

    def cokernel(self) -> FinAbGroup:
        return self.codomain.quotient(self.matrix)

    def kernel(self) -> FinAbGroup:
        G = self.domain
        k = G.rank
        if not k:
            return trivial_group()
        L = _lattice_kernel([self.codomain.reduce(r) for r in self.matrix], self.codomain.invariants)
        # L contains diag(d); kernel = L / diag(d) Z^k
        Binv = _inverse(L)
        rels = [[int(x) for x in row] for row in
                [[sum(Fraction(d * int(i == j)) * Binv[j][c] for j in range(k)) for c in range(k)]
                 for i, d in enumerate(G.invariants)]]
        return from_presentation(k, rels, labels=tuple(tuple(r) for r in L))


def _inverse(B: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    n = len(B)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(B)]
    for c in range(n):
        r = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[r] = A[r], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def image_dim_mod_p(f: AbMap, p: int) -> int:
    """dim_{F_p} of the image of f (x) F_p."""
    rows = [i for i, d in enumerate(f.domain.invariants) if d % p == 0]
    cols = [j for j, d in enumerate(f.codomain.invariants) if d % p == 0]
    M = [[f.matrix[i][j] for j in cols] for i in rows]
    return rank_mod_p(M, p) if M and cols else 0
