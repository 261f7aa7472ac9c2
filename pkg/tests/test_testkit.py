import pytest
from hypothesis import given, strategies as st

from enrint.cosmos import FINCAT, FINSET, ValidationError, size
from enrint.enriched import (poset_vcat, representable, validate_presheaf, validate_vcategory,
                             validate_vfunctor)
from enrint.internal import cst, internalize, validate_internal, walking_arrow
from enrint.testkit import (MAX_CELLS, MAX_OBJECTS, GenConfig, OracleRefusal, functor_count_constructive,
                            gen_fibration, gen_internal, gen_presheaf, gen_vcategory,
                            gen_weighted_instance, nat_count_constructive, oracle_functor_enum,
                            oracle_isoofslices, oracle_nat_enum)

COSMOSES = ("finset", "fincat")
seeds = st.integers(0, 10_000)


def cfgs(max_objects=3):
    return st.builds(GenConfig, seed=seeds, cosmos=st.sampled_from(COSMOSES),
                     max_objects=st.just(max_objects))


def chain(V, n=3):
    return poset_vcat(V, tuple("abcd"[:n]), lambda x, y: x <= y)


# configuration

def test_config_rejects_out_of_range_caps():
    with pytest.raises(ValidationError):
        GenConfig(max_objects=MAX_OBJECTS + 1)
    with pytest.raises(ValidationError):
        GenConfig(max_cells=0)
    with pytest.raises(ValidationError):
        GenConfig(cosmos="sets")
    with pytest.raises(ValidationError):
        GenConfig(weights={"chain": -1})


@given(cfgs(MAX_OBJECTS))
def test_generation_is_deterministic(cfg):
    assert gen_vcategory(cfg) == gen_vcategory(cfg)
    C = gen_vcategory(cfg)
    F, G = gen_presheaf(cfg, C), gen_presheaf(cfg, C)
    assert F.on == G.on and F.ev == G.ev


@given(cfgs(MAX_OBJECTS))
def test_generated_data_is_valid_and_within_caps(cfg):
    C = gen_vcategory(cfg)
    assert validate_vcategory(C) == []
    assert len(C.objects) <= cfg.max_objects
    assert all(size(h) <= 2 * MAX_CELLS for h in C.hom.values())
    assert validate_presheaf(gen_presheaf(cfg, C)) == []
    assert validate_internal(gen_internal(cfg)) == []
    assert gen_fibration(cfg).certificate


@given(cfgs())
def test_weighted_instances_are_valid(cfg):
    inst = gen_weighted_instance(cfg)
    assert validate_vfunctor(inst.W) == [] and validate_vfunctor(inst.G) == []
    assert inst.G.target == inst.C and inst.W.source == inst.G.source


# oracles against hand counts

def test_transformations_between_representables_count_the_hom():
    for V in (FINSET, FINCAT):
        C = chain(V)
        for a in C.objects:
            for b in C.objects:
                n = oracle_nat_enum(representable(C, a), representable(C, b))
                assert n == len(V.global_elements(C(a, b)))


def test_functors_out_of_the_arrow_count_comparable_pairs():
    for V in (FINSET, FINCAT):
        assert oracle_functor_enum(walking_arrow(V), internalize(chain(V))) == 6


def test_functors_between_constant_categories_are_maps():
    V = FINSET
    assert oracle_functor_enum(cst(V.obj(["p", "q"])), cst(V.obj(["x", "y", "z"]))) == 9


def test_oracles_refuse_past_their_cap():
    V = FINSET
    with pytest.raises(OracleRefusal):
        oracle_functor_enum(cst(V.obj(list("pqrs"))), cst(V.obj(list("wxyz"))), cap=10)


# oracles against the constructions

@given(cfgs(), seeds)
def test_end_counts_match_enumeration(cfg, other):
    C = gen_vcategory(cfg)
    F = gen_presheaf(cfg, C)
    G = gen_presheaf(GenConfig(other, cfg.cosmos, max_objects=3), C)
    assert oracle_nat_enum(F, G) == nat_count_constructive(F, G)


@given(cfgs(), seeds)
def test_internal_hom_counts_match_enumeration(cfg, other):
    I = gen_internal(GenConfig(cfg.seed, cfg.cosmos, max_objects=2, max_cells=3))
    A = gen_internal(GenConfig(other, cfg.cosmos, max_objects=2, max_cells=3))
    try:
        expected = oracle_functor_enum(I, A)
    except OracleRefusal:
        return
    assert functor_count_constructive(I, A) == expected


@given(cfgs())
def test_slice_families_match(cfg):
    inst = gen_weighted_instance(cfg)
    V = inst.C.cosmos
    for X in V.generators().probes:
        for A in inst.C.objects:
            assert oracle_isoofslices(inst.W, inst.G, A, X).agree
