import pytest
from hypothesis import given, strategies as st

from enrint.cosmos import FINCAT, FINSET
from enrint.enriched import (VFunctor, discrete_vcat, identity_nat, poset_vcat, representable,
                             validate_presheaf, yoneda_nat)
from enrint.grothendieck import (FibrationRequired, change_of_base, counit_epsilon, fibration_of,
                                 groth, groth_cov, groth_nat, inverse_fib, inverse_fib_mor,
                                 is_valid_groth, psi, slice_functor_from_element, unit_eta)
from enrint.internal import (bang_functor, element, identity_functor, internalize,
                             is_discrete_fibration, slice, validate_internal)
from enrint.testkit import GenConfig, gen_fibration, gen_presheaf, gen_vcategory, gen_vfunctor

COSMOSES = ("finset", "fincat")
seeds = st.integers(0, 10_000)


def cfgs(max_objects=3):
    return st.builds(GenConfig, seed=seeds, cosmos=st.sampled_from(COSMOSES),
                     max_objects=st.just(max_objects))


def chain(V):
    return poset_vcat(V, ("a", "b", "c"), lambda x, y: x <= y)


@given(cfgs())
def test_elements_form_a_valid_fibration(cfg):
    C = gen_vcategory(cfg)
    g = groth(C, gen_presheaf(cfg, C))
    assert is_valid_groth(g) == []
    assert is_discrete_fibration(g.projection).certificate


def test_fixture_elements(P1):
    g = groth(P1.vcategories["C"], P1.presheaves["F1"])
    assert g.total.sizes() == (3, 5)


@given(cfgs())
def test_unit_is_invertible(cfg):
    C = gen_vcategory(cfg)
    eta = unit_eta(gen_presheaf(cfg, C))
    assert eta.certificate, eta.problems


@given(cfgs())
def test_counit_is_invertible_after_relabeling(cfg):
    packet = gen_fibration(cfg)
    eps = counit_epsilon(packet)
    assert eps.certificate, eps.problems


@given(cfgs())
def test_fibers_of_a_relabeled_projection_form_a_presheaf(cfg):
    packet = gen_fibration(cfg)
    assert validate_presheaf(inverse_fib(packet)) == []


def test_non_fibrations_are_refused():
    A = internalize(chain(FINSET))
    with pytest.raises(FibrationRequired):
        fibration_of(bang_functor(A))


def test_slice_fibers_are_the_representable():
    for V in (FINSET, FINCAT):
        C = chain(V)
        A = internalize(C)
        _, p = slice(A, element(A, ("b", ())))
        Phi = inverse_fib(fibration_of(p))
        R = representable(C, "b")
        assert validate_presheaf(Phi) == []
        assert {a: len(V.global_elements(Phi.on[a])) for a in C.objects} == \
            {a: len(V.global_elements(R.on[a])) for a in C.objects}


# morphisms

@given(cfgs())
def test_identity_transformation_gives_the_identity(cfg):
    C = gen_vcategory(cfg)
    F = gen_presheaf(cfg, C)
    g = groth(C, F)
    assert groth_nat(identity_nat(F), g, g) == identity_functor(g.total)


@given(cfgs())
def test_fiber_map_of_an_elements_functor_recovers_the_transformation(cfg):
    C = gen_vcategory(cfg)
    F = gen_presheaf(cfg, C)
    V = C.cosmos
    for c in C.objects:
        for x in V.global_elements(F.on[c])[:1]:
            alpha = yoneda_nat(F, c, x)
            src = groth(C, alpha.source)
            tgt = groth(C, F, base=src.base)
            H = groth_nat(alpha, src, tgt)
            beta = inverse_fib_mor(H, fibration_of(src.projection), fibration_of(tgt.projection))
            for a in C.objects:
                assert V.map_equal(beta.components[a], alpha.components[a])


# representables and slices

@given(cfgs())
def test_elements_of_a_representable_are_the_slice(cfg):
    C = gen_vcategory(cfg)
    for c in C.objects:
        assert psi(C, c).certificate


@given(cfgs())
def test_elements_classify_slice_functors(cfg):
    C = gen_vcategory(cfg)
    F = gen_presheaf(cfg, C)
    V = C.cosmos
    for c in C.objects:
        for x in V.global_elements(F.on[c])[:2]:
            assert slice_functor_from_element(F, C, x, c).certificate


# change of base

@given(cfgs(), seeds)
def test_change_of_base_is_a_pullback(cfg, other):
    D = gen_vcategory(cfg)
    G = gen_presheaf(cfg, D)
    C = gen_vcategory(GenConfig(other, cfg.cosmos, max_objects=3))
    F = gen_vfunctor(cfg, C, D)
    cb = change_of_base(F, G)
    assert cb.commutes and cb.certificate


# covariant elements

def test_covariant_elements_form_an_opfibration():
    for V in (FINSET, FINCAT):
        I = discrete_vcat(V, ("u",))
        X = V.obj(["p", "q"]) if V is FINSET else V.discrete(["p", "q"])
        W = VFunctor(I, None, {"u": X}, ev={("u", "u"): V.proj((X, V.terminal()), 0)})
        gc = groth_cov(I, W)
        assert validate_internal(gc.total) == [] and gc.certificate
