import pytest
from hypothesis import given, strategies as st

from enrint.cosmos import FINCAT, FINSET, Map, ValidationError, size
from enrint.enriched import (VFunctor, VPresheaf, arrow_vcat, constant_presheaf, covariant_hom,
                             find_representations, functor_hom, identity_vfunctor,
                             is_representable_by, opposite, relabel_presheaf, relabel_vcat,
                             representable, unit_vcat, validate_presheaf, validate_vcategory,
                             validate_vfunctor, validate_vnat, weighted_cone_data, yoneda_nat)
from enrint.testkit import (GenConfig, gen_presheaf, gen_vcategory, nat_count_constructive,
                            oracle_nat_enum)

COSMOSES = ("finset", "fincat")
seeds = st.integers(0, 10_000)


def cfgs(max_objects=4):
    return st.builds(GenConfig, seed=seeds, cosmos=st.sampled_from(COSMOSES),
                     max_objects=st.just(max_objects))


# validation

def test_unit_category_is_valid():
    for V in (FINSET, FINCAT):
        assert validate_vcategory(unit_vcat(V)) == []


def test_fixture_category_is_valid(P1):
    assert validate_vcategory(P1.vcategories["C"]) == []


def test_corrupted_action_is_reported(P1):
    F = P1.presheaves["F1"]
    V = F.base.cosmos
    bad = dict(F.ev)
    e = bad[("1", "1")]
    swap = {"a": "b", "b": "a"}
    bad[("1", "1")] = Map(e.dom, e.cod, {k: swap[k[1]] for k in e.dom.elements})
    report = validate_presheaf(VPresheaf(F.base, F.on, bad))
    assert any("composition law fails at (1,1,1)" in r for r in report)
    assert any("identity law fails at 1" in r for r in report)
    assert V is FINSET


# small categories

@given(cfgs())
def test_opposite_is_an_involution(cfg):
    C = gen_vcategory(cfg)
    assert opposite(opposite(C)) == C
    assert validate_vcategory(opposite(C)) == []


def test_arrow_category_homs():
    for V in (FINSET, FINCAT):
        A = arrow_vcat(V)
        assert V.is_terminal_object(A("0", "1"))
        assert size(A("1", "0")) == 0
        Aop = opposite(A)
        assert V.is_terminal_object(Aop("1", "0")) and size(Aop("0", "1")) == 0


# representables

def test_representable_on_the_unit_is_constant_at_the_point():
    for V in (FINSET, FINCAT):
        F = representable(unit_vcat(V), "0")
        assert F.on["0"] == V.terminal()


def test_fixture_representable_values(P1):
    F0 = P1.presheaves["F0"]
    assert F0.on["0"].elements == ("f",) and F0.on["1"].elements == ("id1",)


@given(cfgs())
def test_representables_are_valid(cfg):
    C = gen_vcategory(cfg)
    for c in C.objects:
        assert validate_presheaf(representable(C, c)) == []


# Yoneda

@given(cfgs())
def test_identity_element_represents(cfg):
    C = gen_vcategory(cfg)
    for c in C.objects:
        F = representable(C, c)
        assert is_representable_by(F, c, C.ident[c])
        assert validate_vnat(yoneda_nat(F, c, C.ident[c])) == []


def test_fixture_non_representable(P1):
    assert find_representations(P1.presheaves["F1"]) == []
    reps = find_representations(P1.presheaves["F0"])
    assert [(e.obj, e.point.ob[()]) for e in reps] == [("1", "id1")]


def test_empty_hom_component():
    V = FINSET
    C = arrow_vcat(V)
    F = representable(C, "0")
    alpha = yoneda_nat(F, "0", C.ident["0"])
    comp = alpha.components["1"]
    assert size(comp.dom) == 0 and V.is_iso(comp) == (size(F.on["1"]) == 0)


def test_yoneda_rejects_non_elements(P1):
    F = P1.presheaves["F1"]
    x = FINSET.global_elements(F.on["1"])[0]
    with pytest.raises(ValidationError):
        yoneda_nat(F, "0", x)


@given(cfgs(3))
def test_yoneda_is_injective_on_elements(cfg):
    C = gen_vcategory(cfg)
    F = gen_presheaf(cfg, C)
    V = C.cosmos
    for c in C.objects:
        seen = set()
        for x in V.global_elements(F.on[c]):
            alpha = yoneda_nat(F, c, x)
            key = tuple(alpha.components[a] for a in C.objects)
            assert key not in seen
            seen.add(key)


@given(cfgs(3), st.randoms(use_true_random=False))
def test_representability_is_invariant_under_relabeling(cfg, rnd):
    C = gen_vcategory(cfg)
    F = gen_presheaf(cfg, C)
    V = C.cosmos
    names = list(C.objects)
    rnd.shuffle(names)
    rename = {a: f"n{k}" for k, a in enumerate(names)}
    D = relabel_vcat(C, rename)
    G = relabel_presheaf(F, rename, D)
    assert validate_presheaf(G) == []
    for c in C.objects:
        for x in V.global_elements(F.on[c]):
            assert is_representable_by(F, c, x) == is_representable_by(G, rename[c], x)


# ends

def _point_functor(V, I, X):
    ev = {}
    for i in I.objects:
        for j in I.objects:
            ev[(i, j)] = V.proj((X, I(i, j)), 0)
    return VFunctor(I, None, {i: X for i in I.objects}, ev=ev)


def test_end_over_the_unit_is_an_exponential():
    V = FINSET
    I = unit_vcat(V)
    F = _point_functor(V, I, V.obj(["a", "b"]))
    G = _point_functor(V, I, V.obj(["x", "y", "z"]))
    assert size(functor_hom(F, G).obj) == 9


def test_end_between_point_functors_is_a_point():
    for V in (FINSET, FINCAT):
        I = arrow_vcat(V)
        F = _point_functor(V, I, V.terminal())
        assert V.is_terminal_object(functor_hom(F, F).obj)


@given(cfgs(3), seeds)
def test_end_points_match_enumerated_transformations(cfg, other):
    C = gen_vcategory(cfg)
    F = gen_presheaf(cfg, C)
    G = gen_presheaf(GenConfig(other, cfg.cosmos, max_objects=3), C)
    assert oracle_nat_enum(F, G) == nat_count_constructive(F, G)


def test_end_rejects_mismatched_sources():
    V = FINSET
    F = _point_functor(V, unit_vcat(V), V.terminal())
    G = _point_functor(V, arrow_vcat(V), V.terminal())
    with pytest.raises(ValidationError):
        functor_hom(F, G)


# weighted cones

def test_unit_weight_on_the_unit_shape_gives_the_representable():
    for V in (FINSET, FINCAT):
        C = arrow_vcat(V)
        I = unit_vcat(V)
        W = _point_functor(V, I, V.terminal())
        G = VFunctor(I, C, {"0": "1"}, homs={("0", "0"): C.ident["1"]})
        E = weighted_cone_data(W, G).presheaf
        R = representable(C, "1")
        assert validate_presheaf(E) == []
        assert all(size(E.on[a]) == size(R.on[a]) for a in C.objects)


def test_fixture_cone_values_are_the_homs_into_x(P3):
    p = P3.problems["wl:x"]
    C, G, W = p["C"], p["G"], p["W"]
    E = weighted_cone_data(W, G).presheaf
    assert {a: size(E.on[a]) for a in C.objects} == {a: size(C(a, "x")) for a in C.objects}


def test_no_cones_when_homs_are_empty(P3):
    p = P3.problems["wl:x"]
    E = weighted_cone_data(p["W"], p["G"]).presheaf
    assert size(E.on["top"]) == 0


@given(cfgs(3))
def test_covariant_homs_and_identities_are_valid(cfg):
    C = gen_vcategory(cfg)
    Id = identity_vfunctor(C)
    assert validate_vfunctor(Id) == []
    for a in C.objects:
        assert validate_vfunctor(covariant_hom(C, a, Id)) == []


def test_constant_presheaf_is_valid():
    C = arrow_vcat(FINCAT)
    assert validate_presheaf(constant_presheaf(C, FINCAT.arrow())) == []
