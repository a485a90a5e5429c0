"""Case trichotomy, invariants and structure statements for the Galois group
of the maximal pro-p extension of k unramified outside p, with every
formula checked against the ray class oracle.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .abgroup import FinAbGroup, cyclic_product, embeds_into, p_part
from .arith import is_fundamental, is_prime, kronecker
from .iwasawa import ElemModule, elem_rank
from .localunits import ConnectingMap, LocalUnitSpace, connecting_map, expected_dims, local_unit_quotient
from .quadforms import DiscriminantError, NonFundamentalDiscriminant, check_discriminant, class_group
from .rayclass import DEFAULT_DEPTH, AntiUnramified, GabApprox, anti_unramified_analysis, stabilized_gab

CASE3_NOTE = (
    "Case 3 inertia families follow the main theorem ([a_P, s, ..., s] and [b_2P, s, ..., s]); "
    "the local decomposition-group computation lists [b_1P, s, ..., s] instead."
)


class CaseTag(str, enum.Enum):
    CASE1 = "Case1"
    CASE2A = "Case2a"
    CASE2B = "Case2b"
    CASE3 = "Case3"


def validate(D: int, p: int) -> None:
    check_discriminant(D)
    if not is_fundamental(D):
        raise NonFundamentalDiscriminant(f"{D} is not a fundamental discriminant")
    if p == 2 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")


def classify_case(D: int, p: int) -> CaseTag:
    validate(D, p)
    if kronecker(D, p) == 1:
        return CaseTag.CASE1
    if p == 3 and D % 9 == 6:
        return CaseTag.CASE2A if D == -3 else CaseTag.CASE2B
    return CaseTag.CASE3


def generator_rank(case: CaseTag, r: int, delta: int) -> int:
    """d_k = dim G/G^p[G,G]."""
    return r + (3 if case is CaseTag.CASE2B else 2) - delta


# ---------------------------------------------------------------------------
# symbolic presentation


@dataclass(frozen=True)
class Generator:
    symbol: str
    sigma: str  # how sigma acts on it

    def to_json(self) -> dict:
        return {"symbol": self.symbol, "sigma": self.sigma}


@dataclass(frozen=True)
class CommutatorFamily:
    """{[head, s, ..., s] : h >= 0}, h copies of the arm."""

    head: str
    arm: str = "s"
    quantifier: str = "h"

    def term(self, h: int) -> str:
        return "[" + ", ".join([self.head] + [self.arm] * h) + "]" if h else self.head

    def display(self, depth: int = 3) -> list[str]:
        return [self.term(h) for h in range(depth + 1)] + ["..."]

    def to_json(self, depth: int = 3) -> dict:
        return {"head": self.head, "arm": self.arm, "arm_count": f"{self.quantifier} >= 0",
                "terms": self.display(depth)}


@dataclass(frozen=True)
class PresentationSymbolic:
    case: CaseTag
    generators: tuple[Generator, ...]
    frobenius: Generator
    inertia: tuple[CommutatorFamily, ...]
    inertia_is_H: bool = False
    notes: tuple[str, ...] = ()

    def generator_symbols(self) -> list[str]:
        return [g.symbol for g in self.generators]

    def family_heads(self) -> list[str]:
        return [f.head for f in self.inertia]

    def inertia_json(self, depth: int = 3) -> list:
        if self.inertia_is_H:
            return [{"I_0": "H"}]
        return [f.to_json(depth) for f in self.inertia]


FIXED = "a^sigma = a"
INVERTED = "b^sigma = b^-1"


def presentation_xk(D: int, p: int, r: Optional[int] = None) -> PresentationSymbolic:
    case = classify_case(D, p)
    if r is None:
        r = p_part(class_group(D).group, p)[1]
    alphas = tuple(Generator(f"alpha_{i}", "lift of a generator of A_k") for i in range(1, r + 1))
    if case is CaseTag.CASE1:
        gens = (Generator("a_P", "sigma-conjugate is a_P^sigma"), Generator("a_P^sigma", "sigma-conjugate is a_P")) + alphas
        frob = Generator("s", "s_{P^sigma} = s^sigma")
        fam = (CommutatorFamily("a_P"),)
        return PresentationSymbolic(case, gens, frob, fam)
    frob = Generator("s", "s^sigma = s")
    if case is CaseTag.CASE2A:
        return PresentationSymbolic(case, (Generator("a_P", FIXED), Generator("b_2P", INVERTED)), frob, (), True)
    if case is CaseTag.CASE2B:
        gens = (Generator("a_P", FIXED), Generator("b_1P", INVERTED), Generator("b_2P", INVERTED)) + alphas
        fam = (CommutatorFamily("a_P", quantifier="h1"), CommutatorFamily("b_1P", quantifier="h2"),
               CommutatorFamily("b_2P", quantifier="h3"))
        return PresentationSymbolic(case, gens, frob, fam)
    gens = (Generator("a_P", FIXED), Generator("b_1P", INVERTED)) + alphas
    fam = (CommutatorFamily("a_P", quantifier="h1"), CommutatorFamily("b_2P", quantifier="h2"))
    return PresentationSymbolic(case, gens, frob, fam, notes=(CASE3_NOTE,))


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class Check:
    name: str
    passed: Optional[bool]  # None: skipped, with the reason in detail
    detail: str

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class LambdaStatement:
    kind: str
    text: str
    conditional: bool  # whether the hypothesis it relies on is unverified
    module: Optional[ElemModule] = None
    side_condition: Optional[str] = None

    def to_json(self) -> dict:
        out = {"kind": self.kind, "statement": self.text, "hypothesis_verified": not self.conditional}
        if self.module is not None:
            out["lambda_rank"] = elem_rank(self.module)
        if self.side_condition:
            out["side_condition"] = self.side_condition
        return out


@dataclass(frozen=True)
class ClassificationReport:
    D: int
    p: int
    case: CaseTag
    h: int
    class_group: tuple[int, ...]
    A_k: tuple[int, ...]
    r: int
    delta_k: int
    d_k: int
    relation_rank: int
    resolution_ranks: tuple[int, int]
    gab_tors_predicted: tuple[int, ...]
    gab_tors_predicted_exact: bool
    gab_tors_observed: Optional[tuple[int, ...]]
    stabilized: bool
    hypothesis_t: int
    hypothesis_confident: bool
    lambda_statement: LambdaStatement
    freeness: str
    presentation: PresentationSymbolic
    verification: tuple[Check, ...]
    notes: tuple[str, ...] = ()
    display_depth: int = 3

    def all_passed(self) -> bool:
        return all(c.passed is not False for c in self.verification)

    def to_json(self) -> dict:
        return {
            "disc": self.D,
            "prime": self.p,
            "case": self.case.value,
            "h": self.h,
            "class_group": list(self.class_group),
            "r": self.r,
            "delta_k": self.delta_k,
            "d_k": self.d_k,
            "relation_rank": self.relation_rank,
            "gab_tors_predicted": list(self.gab_tors_predicted),
            "gab_tors_observed": None if self.gab_tors_observed is None else list(self.gab_tors_observed),
            "hypothesis_t": self.hypothesis_t,
            "hypothesis_confident": self.hypothesis_confident,
            "lambda_structure": self.lambda_statement.to_json(),
            "xk_generators": [g.to_json() for g in self.presentation.generators],
            "xk_inertia_families": self.presentation.inertia_json(self.display_depth),
            "verification": [c.to_json() for c in self.verification],
            "p_class_group": list(self.A_k),
            "resolution_ranks": list(self.resolution_ranks),
            "freeness": self.freeness,
            "notes": list(self.notes + self.presentation.notes),
        }

    def to_text(self) -> str:
        j = self.to_json()
        lines = [
            f"D = {self.D}, p = {self.p}: {self.case.value}",
            f"h = {self.h}, Cl = {_fmt(self.class_group)}, A_k = {_fmt(self.A_k)}, r = {self.r}",
            f"delta_k = {self.delta_k}, d_k = {self.d_k}, relation rank = {self.relation_rank}",
            f"resolution 0 -> Lambda^{self.resolution_ranks[0]} -> Lambda^{self.resolution_ranks[1]} -> Gal(M/k~) -> 0",
            f"G^ab_tors predicted {_fmt(self.gab_tors_predicted)}"
            + ("" if self.gab_tors_predicted_exact else " (order only)")
            + f", observed {_fmt(self.gab_tors_observed) if self.gab_tors_observed is not None else 'not stabilized'}",
            f"anticyclotomic unramified degree p^{self.hypothesis_t}"
            + ("" if self.hypothesis_confident else " (low confidence)"),
            f"Gal(M/k~): {self.lambda_statement.text}"
            + (" [hypothesis unverified]" if self.lambda_statement.conditional else ""),
        ]
        if self.lambda_statement.side_condition:
            lines.append(f"  with {self.lambda_statement.side_condition}")
        lines.append(f"G: {self.freeness}")
        lines.append("generators: " + ", ".join(self.presentation.generator_symbols()))
        if self.presentation.inertia_is_H:
            lines.append("I_0 = H")
        for f in j["xk_inertia_families"]:
            if "head" in f:
                lines.append(f"I_0 family: {', '.join(f['terms'])}  ({f['arm_count']})")
        for c in self.verification:
            status = "skip" if c.passed is None else ("ok" if c.passed else "FAIL")
            lines.append(f"[{status}] {c.name}: {c.detail}")
        for n in j["notes"]:
            lines.append(f"note: {n}")
        return "\n".join(lines)


def _fmt(inv) -> str:
    return " x ".join(f"Z/{d}" for d in inv) if inv else "0"


def _lambda_statement(case: CaseTag, r: int, t: int, confident: bool) -> LambdaStatement:
    verified = t == 0 and confident
    if case is CaseTag.CASE2A:
        return LambdaStatement("lambda", "[G,G]^ab = Lambda", False, ElemModule(1))
    if case is CaseTag.CASE2B:
        if r == 0:
            return LambdaStatement("lambda_plus_torsion", "Lambda + Lambda/(f) for some nonunit f", False,
                                   ElemModule(1), "Lambda/(f,T) = Z_p under Lambda = Z_p[[S,T]]")
        if verified:
            return LambdaStatement("generated", "(<b_1P, alpha_1..alpha_r>[G,G])^ab", False)
    elif verified:
        if r == 0:
            return LambdaStatement("lambda", "Lambda phi(A_k) + Lambda = Lambda", False, ElemModule(1))
        return LambdaStatement("lambda_phi", "(<alpha_1..alpha_r>[G,G])^ab = Lambda phi(A_k) + Lambda", False)
    if case is CaseTag.CASE2B:
        return LambdaStatement("unverified", "(<b_1P, alpha_1..alpha_r>[G,G])^ab (needs t = 0)", True)
    return LambdaStatement(
        "weakened", "(<alpha_1^(p^n_1)..alpha_r^(p^n_r)>[G,G])^ab for some n_i >= 0", True)


def _freeness(case: CaseTag, r: int, d_k: int) -> str:
    if r == 0:
        if case is CaseTag.CASE2B:
            return "one local relation"
        return "binary generated free pro-p group"
    if d_k == 2:
        return "free pro-p group of rank 2"
    return f"not free: {d_k - 2} relation(s) on {d_k} generators"


@dataclass(frozen=True)
class _Inputs:
    case: CaseTag
    cl: FinAbGroup
    Ak: FinAbGroup
    r: int
    space: LocalUnitSpace
    phi: ConnectingMap
    gab: GabApprox
    anti: AntiUnramified


def _gather(D: int, p: int, ray_depth: int, precision: Optional[int]) -> _Inputs:
    case = classify_case(D, p)
    cg = class_group(D)
    Ak, r = p_part(cg.group, p)
    space = local_unit_quotient(D, p, precision)
    phi = connecting_map(D, p, space)
    gab = stabilized_gab(D, p, ray_depth)
    anti = anti_unramified_analysis(D, p, ray_depth)
    return _Inputs(case, cg.group, Ak, r, space, phi, gab, anti)


def _predicted_torsion(x: _Inputs) -> tuple[tuple[int, ...], bool]:
    """Invariants of the predicted torsion and whether they are exact."""
    ak = x.Ak.invariants
    if x.case is CaseTag.CASE2B:
        if not ak:
            return (3,), True
        return cyclic_product([3, *ak]).invariants, False
    return ak, True


def cross_verify_inputs(D: int, p: int, x: _Inputs, d_k: int) -> tuple[Check, ...]:
    checks = []
    g = x.gab
    # (i) generator rank against the oracle
    if g.stabilized:
        d_or = 2 + g.torsion.p_rank(p)
        checks.append(Check("d_k", d_or == d_k, f"d_k = {d_k} (formula), {d_or} (ray class oracle)"))
    else:
        checks.append(Check("d_k", None, f"oracle not stabilized by level {g.levels_used[-1]}"))
    # (ii) torsion structure
    if g.stabilized:
        obs = g.torsion
        pred, exact = _predicted_torsion(x)
        tu = 3 if x.case is CaseTag.CASE2B else 1
        if x.anti.t == 0 and x.anti.confident:
            if exact:
                ok = obs.invariants == pred
            else:
                ok = obs.order() == tu * x.Ak.order() and obs.p_rank(p) <= 1 + x.r
            checks.append(Check("gab_tors", ok, f"tors: {_fmt(obs.invariants)} = {_fmt(pred)}"
                                + ("" if exact else " (orders)")))
        else:
            ok = (tu * x.Ak.order()) % obs.order() == 0
            if x.case is not CaseTag.CASE2B:
                ok = ok and embeds_into(obs, x.Ak, p)
            checks.append(Check("gab_tors", ok, f"tors: {_fmt(obs.invariants)} within {_fmt(pred)} (t = {x.anti.t})"))
    else:
        checks.append(Check("gab_tors", None, "oracle not stabilized"))
    # (iii) delta_k from the oracle
    if g.stabilized:
        base = 3 if x.case is CaseTag.CASE2B else 2  # dim of local units modulo global units
        d_or = 2 + g.torsion.p_rank(p)
        back = base + x.r - d_or
        checks.append(Check("delta_k", back == x.phi.delta,
                            f"delta_k = {x.phi.delta} (connecting map), {back} (oracle)"))
    else:
        checks.append(Check("delta_k", None, "oracle not stabilized"))
    # (iv) local unit dimensions
    want = expected_dims(D, p)
    have = (x.space.dim, x.space.plus_dim, x.space.minus_dim)
    checks.append(Check("local_units", have == want and len(x.space.tags) == x.space.dim,
                        f"dim {have[0]}, plus {have[1]}, minus {have[2]}; tags {', '.join(x.space.tags)}"))
    return tuple(checks)


def cross_verify(D: int, p: int, ray_depth: int = DEFAULT_DEPTH) -> tuple[Check, ...]:
    x = _gather(D, p, ray_depth, None)
    d_k = generator_rank(x.case, x.r, x.phi.delta)
    return cross_verify_inputs(D, p, x, d_k)


def invariants_report(D: int, p: int, ray_depth: int = DEFAULT_DEPTH, precision: Optional[int] = None,
                      display_depth: int = 3) -> ClassificationReport:
    x = _gather(D, p, ray_depth, precision)
    delta = x.phi.delta
    d_k = generator_rank(x.case, x.r, delta)
    relation_rank = d_k - 2
    pred, exact = _predicted_torsion(x)
    t, conf = x.anti.t, x.anti.confident
    lam = _lambda_statement(x.case, x.r, t, conf)
    if lam.module is not None and elem_rank(lam.module) != 1:
        raise AssertionError("Lambda-rank of Gal(M/k~) must be 1")
    pres = presentation_xk(D, p, x.r)
    notes = []
    if not x.gab.stabilized:
        notes.append("ray class oracle did not stabilize; observed torsion is provisional")
    if not conf:
        notes.append("anticyclotomic unramified degree is low confidence")
    if t > 0:
        notes.append(f"k^anti/k has an unramified subextension of degree {p}^{t}; conclusions use the weakened form")
    if not exact:
        notes.append("predicted torsion is an extension of A_k by Z/3; only its order is determined")
    return ClassificationReport(
        D, p, x.case, x.cl.order(), x.cl.invariants, x.Ak.invariants, x.r, delta, d_k, relation_rank,
        (d_k - 2, d_k - 1), pred, exact,
        x.gab.torsion.invariants if x.gab.stabilized else None, x.gab.stabilized, t, conf, lam,
        _freeness(x.case, x.r, d_k), pres, cross_verify_inputs(D, p, x, d_k), tuple(notes), display_depth)
