import pytest
from hypothesis import given, strategies as st

from enrint.cosmos import (FINCAT, FINSET, CompositionError, FactorizationError, FinCat,
                           MediatorError, ValidationError, size)


def finset(n, prefix="x"):
    return FINSET.obj([f"{prefix}{k}" for k in range(n)])


@st.composite
def finset_maps(draw, max_size=4):
    n = draw(st.integers(0, max_size))
    m = draw(st.integers(1, max_size))
    X, Y = finset(n, "a"), finset(m, "b")
    table = {x: Y.elements[draw(st.integers(0, m - 1))] for x in X.elements}
    return FINSET.make_map(X, Y, table)


def collapse_arrow():
    two = FINCAT.arrow()
    one = FINCAT.discrete(["*"])
    return FINCAT.make_map(two, one, {"0": "*", "1": "*"}, {m: "*" for m in two.morphisms})


# isomorphisms and composition

def test_identity_is_iso():
    for X in (finset(3), FINCAT.arrow(), FINSET.initial()):
        V = FINSET if X.tag == "finset" else FINCAT
        assert V.is_iso(V.identity(X))


def test_constant_map_is_not_iso():
    f = FINSET.make_map(FINSET.obj(["a", "b"]), FINSET.obj(["x"]), {"a": "x", "b": "x"})
    assert not FINSET.is_iso(f)


def test_collapsing_the_arrow_is_not_iso():
    f = collapse_arrow()
    assert not FINCAT.validate_map(f)
    assert not FINCAT.is_iso(f)


def test_compose_checks_boundaries():
    f = FINSET.identity(finset(2))
    g = FINSET.identity(finset(3))
    with pytest.raises(CompositionError):
        FINSET.compose(f, g)


@given(finset_maps(), st.data())
def test_composition_is_associative_and_unital(f, data):
    V = FINSET
    Y = f.cod
    Z = finset(data.draw(st.integers(1, 3)), "c")
    g = V.make_map(Y, Z, {y: Z.elements[data.draw(st.integers(0, len(Z) - 1))]
                          for y in Y.elements})
    h = V.identity(Z)
    assert V.map_equal(V.compose(V.compose(f, g), h), V.compose(f, V.compose(g, h)))
    assert V.map_equal(V.compose(V.identity(f.dom), f), f)


# points

def test_global_elements():
    assert len(FINSET.global_elements(finset(3))) == 3
    assert len(FINCAT.global_elements(FINCAT.arrow())) == 2
    assert FINSET.global_elements(FINSET.initial()) == []
    assert FINCAT.global_elements(FINCAT.initial()) == []


# limits

def test_product_size():
    assert size(FINSET.product(finset(2), finset(3)).obj) == 6


def test_pullback_of_constant_maps():
    Z = FINSET.obj(["x"])
    f = FINSET.make_map(FINSET.obj(["a", "b"]), Z, {"a": "x", "b": "x"})
    g = FINSET.make_map(FINSET.obj(["c"]), Z, {"c": "x"})
    pb = FINSET.pullback(f, g)
    assert size(pb.obj) == 2
    assert FINSET.map_equal(FINSET.compose(pb.p0, f), FINSET.compose(pb.p1, g))


def test_pullback_induce_rejects_non_commuting_cones():
    Z = FINSET.obj(["x", "y"])
    f = FINSET.make_map(FINSET.obj(["a"]), Z, {"a": "x"})
    g = FINSET.make_map(FINSET.obj(["c"]), Z, {"c": "y"})
    pb = FINSET.pullback(f, g)
    T = FINSET.terminal()
    with pytest.raises(MediatorError):
        pb.induce(FINSET.point(f.dom, "a"), FINSET.point(g.dom, "c"))
    assert size(pb.obj) == 0 and size(T) == 1


def test_equalizer_of_equal_maps_is_everything():
    X = finset(3)
    f = FINSET.identity(X)
    eq = FINSET.equalizer(f, f)
    assert eq.obj == X and FINSET.map_equal(eq.incl, FINSET.identity(X))


@given(finset_maps(), finset_maps())
def test_pair_then_project(f, g):
    V = FINSET
    if f.dom != g.dom:
        g = V.make_map(f.dom, g.cod, {x: g.cod.elements[0] for x in f.dom.elements})
    P = V.product(f.cod, g.cod)
    h = V.pair(f, g)
    assert V.map_equal(V.compose(h, P.p0), f)
    assert V.map_equal(V.compose(h, P.p1), g)


def test_fincat_product_and_pullback_are_valid():
    A = FINCAT.arrow()
    P = FINCAT.product(A, A)
    assert not FINCAT.validate_object(P.obj)
    assert size(P.obj) == 4 + 9
    f = collapse_arrow()
    pb = FINCAT.pullback(f, f)
    assert not FINCAT.validate_object(pb.obj)
    assert len(pb.obj.objects) == 4


# coproducts and extensivity

def test_singleton_coproduct():
    X = finset(2)
    co = FINSET.coproduct([("only", X)])
    assert size(co.obj) == 2
    assert FINSET.is_iso(co.injection("only"))


def test_binary_coproduct_keeps_tags():
    co = FINSET.coproduct([("l", FINSET.obj(["a"])), ("r", FINSET.obj(["b", "c"]))])
    assert size(co.obj) == 3
    assert set(co.obj.elements) == {("l", "a"), ("r", "b"), ("r", "c")}


def test_codiagonal():
    T = FINSET.terminal()
    src = FINSET.coproduct([("0", T), ("1", T)])
    tgt = FINSET.coproduct([("*", T)])
    f = FINSET.indexed_coproduct_map(src, tgt, {"0": "*", "1": "*"},
                                     {"0": FINSET.identity(T), "1": FINSET.identity(T)})
    assert size(f.dom) == 2 and size(f.cod) == 1


def test_indexed_coproduct_map_needs_every_component():
    T = FINSET.terminal()
    src = FINSET.coproduct([("0", T), ("1", T)])
    with pytest.raises(ValidationError):
        FINSET.indexed_coproduct_map(src, src, {"0": "0"}, {"0": FINSET.identity(T)})


def test_fiber_decompose_counts_preimages():
    co = FINSET.coproduct([("A", FINSET.obj(["u"])), ("B", FINSET.obj(["v"]))])
    Y = FINSET.obj(["p", "q", "r"])
    g = FINSET.make_map(Y, co.obj, {"p": ("A", "u"), "q": ("A", "u"), "r": ("B", "v")})
    dec = FINSET.fiber_decompose(g, co)
    assert size(dec.fibers["A"].obj) == 2 and size(dec.fibers["B"].obj) == 1
    assert FINSET.is_iso(dec.iso)


def test_fiber_of_an_injection():
    co = FINSET.coproduct([("A", finset(2)), ("B", finset(1, "y"))])
    dec = FINSET.fiber_decompose(co.injection("A"), co)
    assert size(dec.fibers["A"].obj) == 2 and size(dec.fibers["B"].obj) == 0


@given(st.lists(st.integers(0, 2), min_size=0, max_size=5))
def test_extensivity_roundtrip(tags):
    co = FINSET.coproduct([(l, FINSET.obj([l + "0"])) for l in "abc"])
    Y = FINSET.obj([f"y{n}" for n in range(len(tags))])
    g = FINSET.make_map(Y, co.obj, {f"y{n}": ("abc"[t], "abc"[t] + "0")
                                     for n, t in enumerate(tags)})
    dec = FINSET.fiber_decompose(g, co)
    rebuilt = FINSET.copair(dec.coproduct, {l: FINSET.compose(f.leg, g)
                                            for l, f in dec.fibers.items()}, co.obj)
    assert FINSET.map_equal(FINSET.compose(FINSET.inverse(dec.iso), rebuilt), g)


def test_extensive_factor_of_identity_square():
    co = FINSET.coproduct([("a", finset(2)), ("b", finset(1, "y"))])
    idc = FINSET.identity(co.obj)
    out = FINSET.extensive_factor(idc, co, co, {"a": "a", "b": "b"})
    assert all(FINSET.map_equal(f, FINSET.identity(co.summand(l))) for l, f in out.items())


def test_extensive_factor_rejects_a_wrong_index():
    co = FINSET.coproduct([("a", finset(1)), ("b", finset(1, "y"))])
    with pytest.raises(FactorizationError):
        FINSET.extensive_factor(FINSET.identity(co.obj), co, co, {"a": "b", "b": "a"})


def test_pullback_of_an_injection_is_a_summand():
    co = FINSET.coproduct([("a", finset(2)), ("b", finset(2, "y"))])
    Y = finset(3, "z")
    g = FINSET.make_map(Y, co.obj, {"z0": ("a", "x0"), "z1": ("b", "y1"), "z2": ("a", "x1")})
    pb = FINSET.pullback(g, co.injection("a"))
    assert FINSET.is_mono(pb.p0) and size(pb.obj) == 2


# exponentials

def test_exponential_sizes():
    assert size(FINSET.exponential(finset(2), finset(3)).obj) == 9
    T = FINSET.terminal()
    assert FINSET.is_terminal_object(FINSET.exponential(finset(3), T).obj)


def test_fincat_exponential_from_arrow_to_discrete():
    D = FINCAT.discrete(["a", "b"])
    E = FINCAT.exponential(FINCAT.arrow(), D).obj
    assert len(E.objects) == 2 and len(E.morphisms) == 2


@given(finset_maps(max_size=3), st.integers(1, 2))
def test_curry_eval_triangle(f, z):
    V = FINSET
    Z = finset(z, "z")
    X = f.dom
    P = V.product(X, Z)
    g = V.compose(P.p0, f)
    exp = V.exponential(X, f.cod)
    back = V.compose(V.times(V.identity(X), V.curry(g, X, Z)), exp.eval)
    assert V.map_equal(back, g)


def test_point_exponential_is_the_target():
    Y = finset(3)
    e = FINSET.exponential(FINSET.terminal(), Y)
    assert size(e.obj) == 3


# conservative families

def test_generators():
    assert FINSET.generators().probes == (FINSET.terminal(),)
    assert FINCAT.generators().probes == (FINCAT.arrow(),)


@given(finset_maps())
def test_probes_detect_isomorphisms(f):
    V = FINSET
    for G in V.generators().probes:
        on_dom = V.hom_set(G, f.dom)
        on_cod = V.hom_set(G, f.cod)
        image = {V.compose(h, f) for h in on_dom}
        bij = len(image) == len(on_dom) == len(on_cod)
        assert bij == V.is_iso(f)


def test_arrow_probe_detects_fincat_isomorphisms():
    V = FINCAT
    f = collapse_arrow()
    A = V.arrow()
    post = {V.compose(h, f) for h in V.hom_set(A, f.dom)}
    assert len(post) != len(V.hom_set(A, f.cod)) or len(post) != len(V.hom_set(A, f.dom))


# validation

def test_fincat_validation_rejects_non_associative_tables():
    X = FinCat(["*"], ["id", "a", "b"], {m: "*" for m in ("id", "a", "b")},
               {m: "*" for m in ("id", "a", "b")}, {"*": "id"},
               {("id", "id"): "id", ("id", "a"): "a", ("a", "id"): "a", ("id", "b"): "b",
                ("b", "id"): "b", ("a", "a"): "b", ("a", "b"): "a", ("b", "a"): "b",
                ("b", "b"): "a"})
    errs = FINCAT.validate_object(X)
    assert any("associativity" in e for e in errs)


def test_fincat_validation_rejects_missing_composites():
    X = FinCat(["*"], ["id", "a"], {"id": "*", "a": "*"}, {"id": "*", "a": "*"}, {"*": "id"},
               {("id", "id"): "id", ("id", "a"): "a", ("a", "id"): "a"})
    assert any("missing" in e for e in FINCAT.validate_object(X))
