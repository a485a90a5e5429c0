import json
from pathlib import Path

import pytest

from iqpro.arith import fundamental_discriminants
from iqpro.classifier import (
    CaseTag,
    CommutatorFamily,
    classify_case,
    cross_verify,
    invariants_report,
    presentation_xk,
)
from iqpro.quadforms import DiscriminantError

FIXTURES = json.loads((Path(__file__).parent / "fixtures" / "presentations.json").read_text())


def check_fixture(key, fx):
    D, p = map(int, key.split(","))
    pres = presentation_xk(D, p)
    assert pres.case.value == fx["case"]
    assert pres.generator_symbols() == fx["generators"]
    assert pres.inertia_is_H == fx["inertia_is_H"]
    assert pres.family_heads() == fx["families"]
    for sym, ann in fx.get("sigma", {}).items():
        assert next(g.sigma for g in pres.generators if g.symbol == sym) == ann


@pytest.mark.parametrize("key", sorted(FIXTURES))
def test_presentation_fixtures(key):
    check_fixture(key, FIXTURES[key])


def test_case_examples():
    assert classify_case(-23, 3) is CaseTag.CASE1
    assert classify_case(-84, 3) is CaseTag.CASE2B
    assert classify_case(-4, 3) is CaseTag.CASE3
    assert classify_case(-3, 3) is CaseTag.CASE2A
    assert classify_case(-3, 5) is CaseTag.CASE3
    with pytest.raises(DiscriminantError):
        classify_case(-10, 3)
    with pytest.raises(ValueError):
        classify_case(-4, 2)
    with pytest.raises(ValueError):
        classify_case(-4, 9)


def test_case_trichotomy_definitions():
    from iqpro.arith import kronecker

    for D in fundamental_discriminants(-500, 0):
        for p in (3, 5, 7):
            c = classify_case(D, p)
            assert (c is CaseTag.CASE1) == (kronecker(D, p) == 1)
            assert (c in (CaseTag.CASE2A, CaseTag.CASE2B)) == (p == 3 and D % 9 == 6)
            assert (c is CaseTag.CASE2A) == (D == -3 and p == 3)


def test_report_examples():
    r = invariants_report(-4, 5)
    assert (r.case, r.h, r.r, r.delta_k, r.d_k, r.relation_rank) == (CaseTag.CASE1, 1, 0, 0, 2, 0)
    assert r.freeness == "binary generated free pro-p group"
    r = invariants_report(-84, 3)
    assert (r.case, r.h, r.r, r.delta_k, r.d_k, r.relation_rank) == (CaseTag.CASE2B, 4, 0, 0, 3, 1)
    assert r.gab_tors_observed == (3,)
    assert r.freeness == "one local relation"
    assert r.lambda_statement.side_condition.startswith("Lambda/(f,T) = Z_p")
    r = invariants_report(-3, 3)
    assert r.case is CaseTag.CASE2A and r.d_k == 2
    assert r.lambda_statement.text == "[G,G]^ab = Lambda"


def test_weakened_statement_when_t_positive():
    r = invariants_report(-23, 3)
    assert r.hypothesis_t == 1
    assert r.lambda_statement.conditional
    assert "p^n_1" in r.lambda_statement.text
    assert any("unramified subextension" in n for n in r.notes)


def test_case3_note():
    r = invariants_report(-4, 3)
    assert any("b_1P" in n for n in r.to_json()["notes"])


@pytest.mark.parametrize("D,p", [(-4, 3), (-84, 3), (-23, 3), (-3, 3), (-3299, 3), (-47, 5)])
def test_cross_verify_examples(D, p):
    checks = cross_verify(D, p)
    assert [c.name for c in checks] == ["d_k", "gab_tors", "delta_k", "local_units"]
    assert all(c.passed for c in checks), checks


@pytest.mark.parametrize("D", fundamental_discriminants(-150, 0)[::2])
@pytest.mark.parametrize("p", [3, 5, 7])
def test_report_invariants(D, p):
    r = invariants_report(D, p)
    assert r.relation_rank == r.d_k - 2
    assert r.resolution_ranks == (r.d_k - 2, r.d_k - 1)
    base = 3 if r.case is CaseTag.CASE2B else 2
    assert r.d_k == r.r + base - r.delta_k
    if r.delta_k == 0:
        assert len(r.presentation.generators) == r.d_k
    assert r.all_passed()
    # JSON round trip
    text = json.dumps(r.to_json(), indent=2)
    assert json.dumps(json.loads(text), indent=2) == text


def test_commutator_display():
    f = CommutatorFamily("a_P")
    assert f.display(2) == ["a_P", "[a_P, s]", "[a_P, s, s]", "..."]
    assert f.to_json(1)["arm_count"] == "h >= 0"
    assert invariants_report(-23, 3, display_depth=1).to_json()["xk_inertia_families"][0]["terms"] == [
        "a_P", "[a_P, s]", "..."]


def test_text_report():
    t = invariants_report(-84, 3).to_text()
    assert "Case2b" in t and "tors: Z/3 = Z/3" in t and "[ok] d_k" in t
