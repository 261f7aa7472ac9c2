import pytest
from hypothesis import given, strategies as st

from enrint.cosmos import FINCAT, FINSET, ValidationError
from enrint.enriched import poset_vcat, representable
from enrint.internal import cst, element, internalize
from enrint.limits import (HypothesisNotMet, Outcome, WeightedLimitProblem, cone_comma_cross_check,
                           decide, find_v_tensor, has_internal_tensors, has_v_tensors,
                           is_representable_via_und_tensors, preservation_map,
                           presheaf_preserves_tensors,
                           representability_report, tensor_bridge_terminal,
                           weighted_limit_report)
from enrint.testkit import GenConfig, cones_at, gen_presheaf, gen_vcategory, gen_weighted_instance

COSMOSES = ("finset", "fincat")
seeds = st.integers(0, 10_000)


def cfgs(max_objects=3):
    return st.builds(GenConfig, seed=seeds, cosmos=st.sampled_from(COSMOSES),
                     max_objects=st.just(max_objects))


def agree(report):
    verdicts = {o for o in report.values() if o is not Outcome.NOT_APPLICABLE}
    return len(verdicts) == 1


def test_decide_maps_refusals_to_not_applicable():
    def refuse():
        raise HypothesisNotMet("no")
    assert decide(refuse) is Outcome.NOT_APPLICABLE
    assert decide(lambda: True) is Outcome.TRUE and decide(lambda: 0) is Outcome.FALSE
    assert Outcome.NOT_APPLICABLE.value == "not-applicable"


# representability

@given(cfgs())
def test_representability_routes_agree(cfg):
    C = gen_vcategory(cfg)
    F = gen_presheaf(cfg, C)
    V = C.cosmos
    for c in C.objects:
        for x in V.global_elements(F.on[c]):
            r = representability_report(F, c, x)
            assert r["direct"] == r["elements"] == r["shifted"]
            assert agree(r)


def test_fixture_representability(P1):
    p = P1.problems["rep:F0at1"]
    r = representability_report(p["presheaf"], p["object"], p["element"])
    assert set(r.values()) == {Outcome.TRUE}
    F1 = P1.presheaves["F1"]
    for c in F1.base.objects:
        for x in FINSET.global_elements(F1.on[c]):
            assert representability_report(F1, c, x)["direct"] is Outcome.FALSE


def test_representables_satisfy_every_route():
    for V in (FINSET, FINCAT):
        C = poset_vcat(V, ("a", "b"), lambda x, y: x <= y)
        F = representable(C, "b")
        r = representability_report(F, "b", C.ident["b"])
        assert r["direct"] is r["elements"] is r["shifted"] is Outcome.TRUE


def test_bad_elements_are_rejected(P1):
    F = P1.presheaves["F1"]
    with pytest.raises(ValidationError):
        is_representable_via_und_tensors(F, "nowhere", FINSET.global_elements(F.on["0"])[0])


# tensors

def test_chain_tensors_by_the_point():
    C = poset_vcat(FINSET, ("a", "b"), lambda x, y: x <= y)
    X = FINSET.terminal()
    table = has_v_tensors(C, X)
    assert table is not None and all(w.candidate == c for c, w in table.items())
    assert presheaf_preserves_tensors(representable(C, "a"), X, table)


def test_empty_tensor_needs_an_initial_object():
    C = poset_vcat(FINSET, ("a", "b"), lambda x, y: False)
    assert find_v_tensor(C, "a", FINSET.obj([])) is None


def test_idempotent_lacks_internal_tensors_by_the_arrow(P2):
    D = P2.internal["D"]
    assert not has_internal_tensors(D, FINCAT.arrow()).holds


def test_terminal_bridge_on_the_idempotent(P2):
    D = P2.internal["D"]
    rep = tensor_bridge_terminal(D, element(D, "*"))
    assert rep.und and not rep.internal
    assert not rep.hypotheses_hold and rep.expected_divergence and not rep.violation


def test_terminal_bridge_without_divergence():
    for V in (FINSET, FINCAT):
        A = internalize(poset_vcat(V, ("a", "b"), lambda x, y: x <= y))
        rep = tensor_bridge_terminal(A, element(A, ("b", ())))
        assert rep.internal and rep.und and not rep.violation


def test_constant_point_category_has_every_tensor():
    for V in (FINSET, FINCAT):
        A = cst(V.terminal(), V)
        rep = tensor_bridge_terminal(A, element(A, ()))
        assert rep.internal and rep.und and rep.hypotheses_hold


@given(cfgs())
def test_preservation_isos_are_unique_and_found_by_the_transpose(cfg):
    C = gen_vcategory(cfg)
    F = gen_presheaf(cfg, C)
    V = C.cosmos
    for X in V.generators().probes:
        table = has_v_tensors(C, X)
        if table is None:
            continue
        for c, w in table.items():
            E = V.exponential(X, F.on[c])
            P = V.product(X, E.obj)
            isos = []
            for phi in V.hom_set(E.obj, F.on[w.candidate]):
                if not V.is_iso(phi):
                    continue
                lhs = V.compose(V.pair(V.compose(P.p0, w.unit), V.compose(P.p1, phi)),
                                F.ev[(c, w.candidate)])
                if V.map_equal(lhs, E.eval):
                    isos.append(phi)
            psi = preservation_map(F, w)
            assert len(isos) == (1 if V.is_iso(psi) else 0)
            if isos:
                assert V.map_equal(isos[0], V.inverse(psi))


# weighted limits

def test_fixture_weighted_limit(P3):
    p = P3.problems["wl:x"]
    prob = WeightedLimitProblem(p["C"], p["G"], p["W"], p["L"], p["lam"])
    assert set(weighted_limit_report(prob).values()) == {Outcome.TRUE}
    top = P3.problems["wl:top"]
    assert cones_at(top["W"], top["G"], top["L"]) == []


def test_fixture_top_fails_with_any_cone(P3):
    p = P3.problems["wl:top"]
    C = p["C"]
    below = {a for a in C.objects if FINSET.global_elements(C(a, "x"))}
    for L in below:
        for lam in cones_at(p["W"], p["G"], L):
            report = weighted_limit_report(WeightedLimitProblem(C, p["G"], p["W"], L, lam))
            assert agree(report)
            assert (report["direct"] is Outcome.TRUE) == (L == "x")


@given(cfgs())
def test_weighted_routes_agree(cfg):
    inst = gen_weighted_instance(cfg)
    for L in inst.C.objects:
        for lam in cones_at(inst.W, inst.G, L):
            report = weighted_limit_report(WeightedLimitProblem(inst.C, inst.G, inst.W, L, lam))
            assert agree(report), report


@given(cfgs())
def test_cone_category_matches_the_comma(cfg):
    inst = gen_weighted_instance(cfg)
    cert = cone_comma_cross_check(inst.W, inst.G)
    assert cert.certificate, cert.problems


def test_mismatched_cones_are_rejected(P3):
    p = P3.problems["wl:x"]
    with pytest.raises(ValidationError):
        WeightedLimitProblem(p["C"], p["G"], p["W"], "nowhere", p["lam"])

