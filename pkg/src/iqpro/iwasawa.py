"""Truncated arithmetic in Z_p[[S]] and Z_p[[S, T]].

Coefficients are kept modulo p^N and monomials of total degree >= M are
dropped; a series remembers whether any nonzero term was dropped, so that
answers can be certified or reported as undetermined at this precision.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from typing import Mapping

DEFAULT_N = 8
DEFAULT_M = 16

Poly = dict[tuple[int, int], int]  # (deg_S, deg_T) -> coefficient


class PrecisionInsufficient(ArithmeticError):
    pass


class SeriesParseError(ValueError):
    pass


@dataclass(frozen=True)
class TruncSeries:
    p: int
    coeffs: Mapping[tuple[int, int], int]
    N: int = DEFAULT_N
    M: int = DEFAULT_M
    exact: bool = True  # no nonzero term was cut off by the degree bound

    def __post_init__(self):
        q = self.p**self.N
        clean, exact = {}, self.exact
        for (i, j), c in self.coeffs.items():
            c %= q
            if not c:
                continue
            if i + j >= self.M:
                exact = False
                continue
            clean[(i, j)] = c
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "exact", exact)

    @classmethod
    def from_poly(cls, poly: Mapping[tuple[int, int], int], p: int, N: int = DEFAULT_N, M: int = DEFAULT_M):
        return cls(p, dict(poly), N, M)

    @classmethod
    def parse(cls, text: str, p: int, N: int = DEFAULT_N, M: int = DEFAULT_M) -> "TruncSeries":
        return cls.from_poly(parse_poly(text), p, N, M)

    def _like(self, coeffs, exact=True) -> "TruncSeries":
        return TruncSeries(self.p, coeffs, self.N, self.M, exact)

    def _check(self, other: "TruncSeries"):
        if (self.p, self.N, self.M) != (other.p, other.N, other.M):
            raise ValueError("series live at different precisions")

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return self._like(out, self.exact and other.exact)

    def __neg__(self) -> "TruncSeries":
        return self._like({k: -c for k, c in self.coeffs.items()}, self.exact)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        out: Poly = {}
        for (i, j), a in self.coeffs.items():
            for (k, l), b in other.coeffs.items():
                key = (i + k, j + l)
                out[key] = out.get(key, 0) + a * b
        # a dropped term times a nonzero term may matter
        exact = (self.exact or not other.coeffs) and (other.exact or not self.coeffs)
        return self._like(out, exact)

    def __pow__(self, e: int) -> "TruncSeries":
        out = self._like({(0, 0): 1})
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def coeff(self, i: int, j: int = 0) -> int:
        return self.coeffs.get((i, j), 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_unit(self) -> bool:
        return self.coeff(0, 0) % self.p != 0

    def at_T0(self) -> "TruncSeries":
        return self._like({(i, j): c for (i, j), c in self.coeffs.items() if j == 0}, self.exact)

    def is_univariate(self) -> bool:
        return all(j == 0 for _, j in self.coeffs)

    def with_precision(self, N: int, M: int) -> "TruncSeries":
        return TruncSeries(self.p, dict(self.coeffs), N, M, self.exact)


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def weierstrass_data(g: TruncSeries) -> tuple[int, int, bool]:
    """(mu, lambda, certified) of a series in S."""
    if not g.is_univariate():
        raise ValueError("series must not involve T")
    if g.is_zero():
        raise ValueError("series is zero at the working precision")
    vals = {i: _vp(c, g.p) for (i, _), c in g.coeffs.items()}
    mu = min(vals.values())
    lam = min(i for i, v in vals.items() if v == mu)
    return mu, lam, (mu == 0 or g.exact)


def quotient_is_Zp(f: TruncSeries) -> bool:
    """Whether Lambda/(f, T) = Z_p[[S]]/(f(S, 0)) is isomorphic to Z_p."""
    if f.is_unit():
        raise ValueError("f must be a nonunit")
    if f.M < 2:
        raise PrecisionInsufficient("degree bound too small to see the linear term")
    g = f.at_T0()
    if g.is_zero():
        # mu >= N >= 1 for the kept part, and anything dropped has degree >= M >= 2
        return False
    mu, lam, _ = weierstrass_data(g)
    # a dropped term cannot lower mu below 0 or create lambda = 1 once M >= 2
    return mu == 0 and lam == 1


@dataclass(frozen=True)
class ElemModule:
    """Lambda^e + sum Lambda/(f_i)."""

    free_rank: int
    divisors: tuple[TruncSeries, ...] = field(default=())

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        for f in self.divisors:
            if f.is_unit():
                raise ValueError("torsion divisors must be nonunits")

    def describe(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Lambda" if self.free_rank == 1 else f"Lambda^{self.free_rank}")
        parts += [f"Lambda/({poly_str(f)})" for f in self.divisors]
        return " + ".join(parts) or "0"


def elem_rank(M: ElemModule) -> int:
    return M.free_rank


# ---------------------------------------------------------------------------
# parsing


def parse_poly(text: str) -> Poly:
    """Exact integer polynomial in S, T from '+ - * ^' syntax."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise SeriesParseError(f"cannot parse {text!r}") from exc
    return _eval(tree.body, text)


def _pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for (i, j), x in a.items():
        for (k, l), y in b.items():
            key = (i + k, j + l)
            out[key] = out.get(key, 0) + x * y
    return {k: c for k, c in out.items() if c}


def _padd(a: Poly, b: Poly, sign: int = 1) -> Poly:
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, 0) + sign * c
    return {k: c for k, c in out.items() if c}


def _eval(node, text) -> Poly:
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return {(0, 0): node.value} if node.value else {}
    if isinstance(node, ast.Name) and node.id in ("S", "T"):
        return {(1, 0): 1} if node.id == "S" else {(0, 1): 1}
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, text)
        return {k: -c for k, c in v.items()} if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            e = node.right
            if not (isinstance(e, ast.Constant) and isinstance(e.value, int) and e.value >= 0):
                raise SeriesParseError(f"exponents must be non-negative integers in {text!r}")
            if e.value > 512:
                raise SeriesParseError("exponent too large")
            base, out = _eval(node.left, text), {(0, 0): 1}
            for _ in range(e.value):
                out = _pmul(out, base)
            return out
        a, b = _eval(node.left, text), _eval(node.right, text)
        if isinstance(node.op, ast.Add):
            return _padd(a, b)
        if isinstance(node.op, ast.Sub):
            return _padd(a, b, -1)
        if isinstance(node.op, ast.Mult):
            return _pmul(a, b)
    raise SeriesParseError(f"unsupported syntax in {text!r}")


def poly_str(f: TruncSeries) -> str:
    terms = []
    for (i, j), c in sorted(f.coeffs.items()):
        mono = "*".join(x for x in ((f"S^{i}" if i > 1 else "S" if i else ""), (f"T^{j}" if j > 1 else "T" if j else "")) if x)
        terms.append(f"{c}*{mono}" if mono and c != 1 else mono or str(c))
    return " + ".join(terms) or "0"
