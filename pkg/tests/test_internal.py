import pytest
from hypothesis import given, strategies as st

from enrint.cosmos import FINCAT, FINSET, size
from enrint.enriched import discrete_vcat, poset_vcat, validate_vcategory
from enrint.internal import (InternalFunctor, ValidationError, adjunction_transpose, ar_x_comparison,
                             arrow_hom_comparison, compose_functors, compute_internal_colimit, cst,
                             functor_from_element, is_v_terminal,
                             element, elements, hom_cst_comparison, identity_functor,
                             internal_hom_data, internalize, is_discrete_fibration,
                             is_discrete_opfibration, is_internal_colimit, is_internal_initial,
                             is_internal_initial_by_slice, is_internal_terminal,
                             is_internal_terminal_by_slice, is_iso_functor, is_iso_vfunctor,
                             composable_square_is_pullback, product_internal, pullback_internal,
                             slice, transpose_to_int, transpose_to_und, underlying,
                             underlying_data, validate_internal, validate_internal_functor,
                             walking_arrow)
from enrint.testkit import GenConfig, gen_fibration, gen_internal, gen_vcategory

COSMOSES = ("finset", "fincat")
seeds = st.integers(0, 10_000)


def cfgs(max_objects=3):
    return st.builds(GenConfig, seed=seeds, cosmos=st.sampled_from(COSMOSES),
                     max_objects=st.just(max_objects))


def chain(V):
    return poset_vcat(V, ("a", "b", "c"), lambda x, y: x <= y)


# internalization

@given(cfgs())
def test_internalized_categories_are_valid(cfg):
    A = internalize(gen_vcategory(cfg))
    assert validate_internal(A) == []


@given(cfgs())
def test_generated_internal_categories_are_valid(cfg):
    assert validate_internal(gen_internal(cfg)) == []


def test_constant_internal_category_has_a_discrete_underlying():
    for V, X in ((FINSET, FINSET.obj(["p", "q"])), (FINCAT, FINCAT.arrow())):
        U = underlying(cst(X, V))
        assert validate_vcategory(U) == []
        for a in U.objects:
            for b in U.objects:
                assert len(V.global_elements(U(a, b))) == (1 if a == b else 0)


def test_underlying_of_internalized_chain_recovers_the_homs():
    for V in (FINSET, FINCAT):
        C = chain(V)
        U = underlying(internalize(C))
        assert sorted(U.objects) == sorted((a, ()) for a in C.objects)
        for a in C.objects:
            for b in C.objects:
                assert size(U((a, ()), (b, ()))) == size(C(a, b))


# the adjunction

@given(cfgs())
def test_transposes_round_trip(cfg):
    C = gen_vcategory(cfg)
    A = internalize(C)
    U = underlying_data(A)
    H = identity_functor(A)
    K = transpose_to_und(H, U)
    assert transpose_to_int(K, A, source=A, und=U) == H
    K2 = transpose_to_und(transpose_to_int(K, A, source=A, und=U), U)
    assert K2.on == K.on and K2.homs == K.homs


def test_adjunction_transpose_dispatch():
    A = internalize(chain(FINSET))
    K = adjunction_transpose("to_und", identity_functor(A))
    assert adjunction_transpose("to_int", (K, A)).H0 == identity_functor(A).H0
    with pytest.raises(ValidationError):
        adjunction_transpose("sideways", A)


# closed forms of internal homs

@given(cfgs())
def test_arrow_hom_matches_the_generic_construction(cfg):
    A = internalize(gen_vcategory(cfg))
    cmp = arrow_hom_comparison(A)
    assert validate_internal_functor(cmp) == []
    assert is_iso_functor(cmp)


@pytest.mark.parametrize("V", [FINSET, FINCAT], ids=lambda V: V.tag)
def test_constant_hom_matches_the_generic_construction(V):
    A = internalize(chain(V))
    for X in V.generators().probes:
        cmp = hom_cst_comparison(X, A)
        assert validate_internal_functor(cmp) == [] and is_iso_functor(cmp)


@pytest.mark.parametrize("V", [FINSET, FINCAT], ids=lambda V: V.tag)
def test_shifted_arrows_match_the_constant_hom(V):
    for X in V.generators().probes:
        assert is_iso_vfunctor(ar_x_comparison(chain(V), X))


def test_internal_hom_out_of_the_arrow_is_valid():
    for V in (FINSET, FINCAT):
        D = internal_hom_data(walking_arrow(V), internalize(chain(V)))
        assert validate_internal(D.cat) == []
        assert len(V.global_elements(D.cat.A0)) == 6


# terminal objects

@pytest.mark.parametrize("V", [FINSET, FINCAT], ids=lambda V: V.tag)
def test_top_of_a_chain_is_terminal(V):
    A = internalize(chain(V))
    verdicts = {x.label[0]: is_internal_terminal(A, x) for x in elements(A)}
    assert verdicts == {"a": False, "b": False, "c": True}
    assert [x.label[0] for x in elements(A) if is_internal_initial(A, x)] == ["a"]


@given(cfgs())
def test_level_zero_criterion_matches_the_slice(cfg):
    A = internalize(gen_vcategory(cfg))
    for x in elements(A):
        assert is_internal_terminal(A, x) == is_internal_terminal_by_slice(A, x)
        assert is_internal_initial(A, x) == is_internal_initial_by_slice(A, x)


def test_idempotent_point_is_v_terminal_but_not_internally_terminal(P2):
    D = P2.internal["D"]
    x = element(D, "*")
    assert is_v_terminal(underlying(D), "*")
    assert not is_internal_terminal(D, x)


# slices, pullbacks and fibrations

def test_slice_projection_is_a_fibration():
    for V in (FINSET, FINCAT):
        A = internalize(chain(V))
        S, p = slice(A, element(A, ("b", ())))
        assert validate_internal(S) == []
        assert len(V.global_elements(S.A0)) == 2
        packet = is_discrete_fibration(p)
        assert packet.certificate and composable_square_is_pullback(p)


@given(cfgs())
def test_pullbacks_of_fibrations_are_fibrations(cfg):
    packet = gen_fibration(cfg)
    assert packet.certificate
    P = packet.P
    B = P.target
    for b in elements(B)[:2]:
        _, (_, Q) = pullback_internal(P, functor_from_element(b))
        assert is_discrete_fibration(Q).certificate


@given(cfgs())
def test_fibrations_have_pullback_composable_squares(cfg):
    packet = gen_fibration(cfg)
    assert composable_square_is_pullback(packet.P)


def test_projection_of_elements_is_not_an_opfibration(P1):
    P = P1.internal["piF1"]
    assert is_discrete_fibration(P).certificate
    assert not is_discrete_opfibration(P).certificate


def test_products_of_constant_categories():
    V = FINSET
    A = product_internal(cst(V.obj(["p", "q"])), cst(V.obj(["x"])))
    assert validate_internal(A) == [] and A.sizes() == (2, 2)


def test_identity_composes_neutrally():
    A = internalize(chain(FINCAT))
    H = identity_functor(A)
    assert compose_functors(H, H) == H


# colimits of constant diagrams

def _diagram(A, Y, on):
    V = A.cosmos
    return InternalFunctor(cst(Y, V), A, V.make_map(Y, A.A0, {u: (a, ()) for u, a in on.items()}),
                           V.make_map(Y, A.A1, {u: ((a, a), ()) for u, a in on.items()}))


def test_discrete_pair_has_no_colimit():
    V = FINSET
    A = internalize(discrete_vcat(V, ("a", "b")))
    G = _diagram(A, V.obj(["u", "v"]), {"u": "a", "v": "b"})
    assert validate_internal_functor(G) == []
    assert compute_internal_colimit(G) is None


def test_chain_colimit_is_the_join():
    V = FINSET
    A = internalize(chain(V))
    G = _diagram(A, V.obj(["u", "v"]), {"u": "a", "v": "b"})
    w = compute_internal_colimit(G)
    assert w is not None and V.point_label(w.apex) == ("b", ())
    assert is_internal_colimit(G, w.apex, w.components)
