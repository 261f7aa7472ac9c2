"""Internal categories to V and the constructions on them.

Composition is diagrammatic throughout: the composable pairs of ``A`` are the
pullback of ``t`` along ``s`` and ``c(f, g)`` is "f then g".
"""

from __future__ import annotations

from dataclasses import dataclass

from .cosmos import (Cosmos, CosmosError, Map, MediatorError, Pullback, TaggedCoproduct,
                     ValidationError, cosmos_of, size)
from .enriched import VCategory, VFunctor, arrow_vcat, validate_vfunctor


class StructureError(CosmosError):
    """Raised when a construction needs structure its input does not carry."""


@dataclass(frozen=True)
class Tagging:
    """Index data kept from a construction built out of tagged coproducts.

    ``objects`` has one summand per object of ``base`` and ``arrows`` one per
    ordered pair.  ``kind`` is ``"int"`` for an internalized V-category and
    ``"groth"`` for a category of elements.
    """

    kind: str
    base: VCategory
    objects: TaggedCoproduct
    arrows: TaggedCoproduct


class InternalCategory:
    """Objects ``A0``, arrows ``A1`` and structure maps in a cosmos.

    The composable pairs and the composition map are built on first use, so
    categories that only serve as functor targets stay cheap.
    """

    def __init__(self, cosmos: Cosmos, A0, A1, s: Map, t: Map, i: Map, make_c,
                 tagging: Tagging | None = None):
        self.cosmos = cosmos
        self.A0, self.A1 = A0, A1
        self.s, self.t, self.i = s, t, i
        self.tagging = tagging
        self._make_c = make_c
        self._pairs = None
        self._c = None

    @property
    def composable(self) -> Pullback:
        if self._pairs is None:
            self._pairs = self.cosmos.pullback(self.t, self.s)
        return self._pairs

    @property
    def c(self) -> Map:
        if self._c is None:
            mk = self._make_c
            self._c = mk(self.composable) if callable(mk) else mk
        return self._c

    def __eq__(self, other):
        return (isinstance(other, InternalCategory) and self.A0 == other.A0
                and self.A1 == other.A1 and self.s == other.s and self.t == other.t
                and self.i == other.i and self.c == other.c)

    __hash__ = object.__hash__

    @property
    def A2(self):
        return self.composable.obj

    def sizes(self) -> tuple:
        return size(self.A0), size(self.A1)

    def __repr__(self):
        return f"InternalCategory(sizes={self.sizes()})"


@dataclass(frozen=True, eq=False)
class InternalFunctor:
    source: InternalCategory
    target: InternalCategory
    H0: Map
    H1: Map

    def __eq__(self, other):
        return (isinstance(other, InternalFunctor) and self.source == other.source
                and self.target == other.target and self.H0 == other.H0
                and self.H1 == other.H1)

    __hash__ = object.__hash__


@dataclass(frozen=True)
class InternalElement:
    carrier: InternalCategory
    point: Map

    def __post_init__(self):
        V = self.carrier.cosmos
        if self.point.dom != V.terminal() or self.point.cod != self.carrier.A0:
            raise ValidationError("an element is a map from the terminal object to A0")

    @property
    def label(self):
        return self.point.ob[()]


def assemble(V: Cosmos, A0, A1, s: Map, t: Map, i: Map, make_c, tagging=None) -> InternalCategory:
    """Build an internal category; ``make_c`` receives the composable pairs."""
    return InternalCategory(V, A0, A1, s, t, i, make_c, tagging)


# ---------------------------------------------------------------------------
# validation


def _agree(report, V, lhs, rhs, what):
    try:
        if not V.map_equal(lhs, rhs):
            report.append(what)
    except CosmosError as exc:
        report.append(f"{what}: {exc}")


def validate_internal(A: InternalCategory) -> list:
    V = A.cosmos
    report = []
    for name, f, dom, cod in (("s", A.s, A.A1, A.A0), ("t", A.t, A.A1, A.A0),
                              ("i", A.i, A.A0, A.A1), ("c", A.c, A.A2, A.A1)):
        if f.dom != dom or f.cod != cod:
            report.append(f"{name} has the wrong boundary")
        else:
            report.extend(f"{name}: {e}" for e in V.validate_map(f))
    if report:
        return report
    P = A.composable
    idA0, idA1 = V.identity(A.A0), V.identity(A.A1)
    _agree(report, V, V.compose(A.i, A.s), idA0, "source of an identity")
    _agree(report, V, V.compose(A.i, A.t), idA0, "target of an identity")
    _agree(report, V, V.compose(A.c, A.s), V.compose(P.p0, A.s), "source of a composite")
    _agree(report, V, V.compose(A.c, A.t), V.compose(P.p1, A.t), "target of a composite")
    if report:
        return report
    try:
        left = P.induce(V.compose(A.s, A.i), idA1)
        right = P.induce(idA1, V.compose(A.t, A.i))
        _agree(report, V, V.compose(left, A.c), idA1, "left unit law")
        _agree(report, V, V.compose(right, A.c), idA1, "right unit law")
        Q = V.pullback(V.compose(P.p1, A.t), A.s)
        lhs = V.compose(P.induce(V.compose(Q.p0, A.c), Q.p1), A.c)
        gh = V.compose(P.induce(V.compose(Q.p0, P.p1), Q.p1), A.c)
        rhs = V.compose(P.induce(V.compose(Q.p0, P.p0), gh), A.c)
        _agree(report, V, lhs, rhs, "associativity")
    except MediatorError as exc:
        report.append(f"structure maps do not induce mediators: {exc}")
    return report


def functor_on_pairs(H: InternalFunctor) -> Map:
    """``H1 x_{H0} H1`` between the composable pairs."""
    V = H.source.cosmos
    P = H.source.composable
    return H.target.composable.induce(V.compose(P.p0, H.H1), V.compose(P.p1, H.H1))


def validate_internal_functor(H: InternalFunctor) -> list:
    A, B = H.source, H.target
    V = A.cosmos
    report = []
    if H.H0.dom != A.A0 or H.H0.cod != B.A0:
        report.append("H0 has the wrong boundary")
    if H.H1.dom != A.A1 or H.H1.cod != B.A1:
        report.append("H1 has the wrong boundary")
    if report:
        return report
    report.extend(f"H0: {e}" for e in V.validate_map(H.H0))
    report.extend(f"H1: {e}" for e in V.validate_map(H.H1))
    if report:
        return report
    _agree(report, V, V.compose(H.H1, B.s), V.compose(A.s, H.H0), "compatibility with source")
    _agree(report, V, V.compose(H.H1, B.t), V.compose(A.t, H.H0), "compatibility with target")
    _agree(report, V, V.compose(H.H0, B.i), V.compose(A.i, H.H1), "compatibility with identities")
    if report:
        return report
    try:
        _agree(report, V, V.compose(functor_on_pairs(H), B.c), V.compose(A.c, H.H1),
               "compatibility with composition")
    except MediatorError as exc:
        report.append(f"composable pairs are not preserved: {exc}")
    return report


def require(report: list, what: str):
    if report:
        raise ValidationError(f"invalid {what}: " + "; ".join(report[:3]))


# ---------------------------------------------------------------------------
# basic functors and limits in Cat(V)


def identity_functor(A: InternalCategory) -> InternalFunctor:
    V = A.cosmos
    return InternalFunctor(A, A, V.identity(A.A0), V.identity(A.A1))


def compose_functors(H: InternalFunctor, K: InternalFunctor) -> InternalFunctor:
    """``H`` then ``K``."""
    if H.H0.cod != K.H0.dom or H.H1.cod != K.H1.dom:
        raise ValidationError("functors are not composable")
    V = H.source.cosmos
    return InternalFunctor(H.source, K.target, V.compose(H.H0, K.H0), V.compose(H.H1, K.H1))


def is_iso_functor(H: InternalFunctor) -> bool:
    V = H.source.cosmos
    return V.is_iso(H.H0) and V.is_iso(H.H1)


def inverse_functor(H: InternalFunctor) -> InternalFunctor:
    V = H.source.cosmos
    return InternalFunctor(H.target, H.source, V.inverse(H.H0), V.inverse(H.H1))


def cst(X, V: Cosmos | None = None) -> InternalCategory:
    """The constant internal category: only identity arrows, objects ``X``."""
    V = V or cosmos_of(X)
    idX = V.identity(X)
    return assemble(V, X, X, idX, idX, idX, lambda pb: pb.p0)


def terminal_internal(V: Cosmos) -> InternalCategory:
    return cst(V.terminal(), V)


def element(A: InternalCategory, label) -> InternalElement:
    return InternalElement(A, A.cosmos.point(A.A0, label))


def elements(A: InternalCategory) -> list:
    return [InternalElement(A, p) for p in A.cosmos.global_elements(A.A0)]


def functor_from_element(x: InternalElement) -> InternalFunctor:
    A = x.carrier
    V = A.cosmos
    return InternalFunctor(terminal_internal(V), A, x.point, V.compose(x.point, A.i))


def bang_functor(A: InternalCategory) -> InternalFunctor:
    V = A.cosmos
    return InternalFunctor(A, terminal_internal(V), V.bang(A.A0), V.bang(A.A1))


def const_functor(A: InternalCategory, b: InternalElement) -> InternalFunctor:
    """``A -> * -> B`` picking out ``b``."""
    B = b.carrier
    V = A.cosmos
    return InternalFunctor(A, B, V.const(A.A0, b.point), V.const(A.A1, V.compose(b.point, B.i)))


@dataclass(frozen=True)
class InternalPullback:
    cat: InternalCategory
    p0: InternalFunctor
    p1: InternalFunctor
    level0: Pullback
    level1: Pullback

    def induce(self, U: InternalFunctor, W: InternalFunctor) -> InternalFunctor:
        return InternalFunctor(U.source, self.cat, self.level0.induce(U.H0, W.H0),
                               self.level1.induce(U.H1, W.H1))


def pullback_internal_data(H: InternalFunctor, K: InternalFunctor) -> InternalPullback:
    if H.H0.cod != K.H0.cod or H.H1.cod != K.H1.cod:
        raise ValidationError("cospan legs have different targets")
    A, B = H.source, K.source
    V = A.cosmos
    L0 = V.pullback(H.H0, K.H0)
    L1 = V.pullback(H.H1, K.H1)
    s = L0.induce(V.compose(L1.p0, A.s), V.compose(L1.p1, B.s))
    t = L0.induce(V.compose(L1.p0, A.t), V.compose(L1.p1, B.t))
    i = L1.induce(V.compose(L0.p0, A.i), V.compose(L0.p1, B.i))

    def make_c(pb):
        a = A.composable.induce(V.compose(pb.p0, L1.p0), V.compose(pb.p1, L1.p0))
        b = B.composable.induce(V.compose(pb.p0, L1.p1), V.compose(pb.p1, L1.p1))
        return L1.induce(V.compose(a, A.c), V.compose(b, B.c))

    P = assemble(V, L0.obj, L1.obj, s, t, i, make_c)
    return InternalPullback(P, InternalFunctor(P, A, L0.p0, L1.p0),
                            InternalFunctor(P, B, L0.p1, L1.p1), L0, L1)


def pullback_internal(H: InternalFunctor, K: InternalFunctor):
    """Levelwise pullback; returns the category and its two legs."""
    d = pullback_internal_data(H, K)
    return d.cat, (d.p0, d.p1)


def product_internal(A: InternalCategory, B: InternalCategory) -> InternalCategory:
    V = A.cosmos
    P0 = V.product(A.A0, B.A0)
    P1 = V.product(A.A1, B.A1)

    def make_c(pb):
        a = A.composable.induce(V.compose(pb.p0, P1.p0), V.compose(pb.p1, P1.p0))
        b = B.composable.induce(V.compose(pb.p0, P1.p1), V.compose(pb.p1, P1.p1))
        return V.pair(V.compose(a, A.c), V.compose(b, B.c))

    return assemble(V, P0.obj, P1.obj, V.times(A.s, B.s), V.times(A.t, B.t),
                    V.times(A.i, B.i), make_c)


def pair_functors(H: InternalFunctor, K: InternalFunctor) -> InternalFunctor:
    if H.source != K.source:
        raise ValidationError("functors have different sources")
    V = H.source.cosmos
    return InternalFunctor(H.source, product_internal(H.target, K.target),
                           V.pair(H.H0, K.H0), V.pair(H.H1, K.H1))


# ---------------------------------------------------------------------------
# Int and Und


def internalize(C: VCategory) -> InternalCategory:
    """``Int C``: objects one point per object, arrows the coproduct of the homs."""
    V = C.cosmos
    T = V.terminal()
    obs = C.objects
    oc = V.coproduct([(a, T) for a in obs])
    ac = V.coproduct([((a, b), C(a, b)) for a in obs for b in obs])
    s = V.indexed_coproduct_map(ac, oc, {(a, b): a for a in obs for b in obs},
                                {(a, b): V.bang(C(a, b)) for a in obs for b in obs})
    t = V.indexed_coproduct_map(ac, oc, {(a, b): b for a in obs for b in obs},
                                {(a, b): V.bang(C(a, b)) for a in obs for b in obs})
    i = V.indexed_coproduct_map(oc, ac, {a: (a, a) for a in obs}, dict(C.ident))

    def make_c(pb):
        triples = [(a, b, c) for a in obs for b in obs for c in obs]
        tc = V.coproduct([(k, V.product(C(k[0], k[1]), C(k[1], k[2])).obj) for k in triples])
        legs = {}
        for a, b, c in triples:
            P = V.product(C(a, b), C(b, c))
            legs[(a, b, c)] = pb.induce(V.compose(P.p0, ac.injection((a, b))),
                                        V.compose(P.p1, ac.injection((b, c))))
        phi = V.copair(tc, legs, pb.obj)
        comp = V.indexed_coproduct_map(tc, ac, {k: (k[0], k[2]) for k in triples},
                                       {k: C.comp[k] for k in triples})
        return V.compose(V.inverse(phi), comp)

    return assemble(V, oc.obj, ac.obj, s, t, i, make_c, Tagging("int", C, oc, ac))


def internalize_functor(F: VFunctor, source: InternalCategory | None = None,
                        target: InternalCategory | None = None) -> InternalFunctor:
    C, D = F.source, F.target
    V = C.cosmos
    A = source or internalize(C)
    B = target or internalize(D)
    TA, TB = A.tagging, B.tagging
    T = V.terminal()
    H0 = V.indexed_coproduct_map(TA.objects, TB.objects, dict(F.on),
                                 {a: V.identity(T) for a in C.objects})
    pairs = [(a, b) for a in C.objects for b in C.objects]
    H1 = V.indexed_coproduct_map(TA.arrows, TB.arrows,
                                 {(a, b): (F.on[a], F.on[b]) for a, b in pairs},
                                 {k: F.homs[k] for k in pairs})
    return InternalFunctor(A, B, H0, H1)


def int_tagging(A: InternalCategory) -> Tagging:
    if A.tagging is None or A.tagging.kind != "int":
        raise StructureError("expected an internalized V-category with its tagging")
    return A.tagging


@dataclass(frozen=True)
class Underlying:
    vcat: VCategory
    homs: dict          # (a, b) -> pullback defining Und(a, b)

    def leg(self, a, b) -> Map:
        return self.homs[(a, b)].p0


def underlying_data(A: InternalCategory) -> Underlying:
    V = A.cosmos
    T = V.terminal()
    labels = tuple(V.point_label(p) for p in V.global_elements(A.A0))
    st = V.pair(A.s, A.t)
    pts = {a: V.point(A.A0, a) for a in labels}
    pbs = {(a, b): V.pullback(st, V.pair(pts[a], pts[b])) for a in labels for b in labels}
    comp = {}
    for a in labels:
        for b in labels:
            for c in labels:
                P = V.product(pbs[(a, b)].obj, pbs[(b, c)].obj)
                m = A.composable.induce(V.compose(P.p0, pbs[(a, b)].p0),
                                        V.compose(P.p1, pbs[(b, c)].p0))
                comp[(a, b, c)] = pbs[(a, c)].induce(V.compose(m, A.c), V.bang(P.obj))
    ident = {a: pbs[(a, a)].induce(V.compose(pts[a], A.i), V.identity(T)) for a in labels}
    C = VCategory(V, labels, {k: pb.obj for k, pb in pbs.items()}, comp, ident)
    return Underlying(C, pbs)


def underlying(A: InternalCategory) -> VCategory:
    return underlying_data(A).vcat


def underlying_functor(H: InternalFunctor, source: Underlying | None = None,
                       target: Underlying | None = None) -> VFunctor:
    V = H.source.cosmos
    U = source or underlying_data(H.source)
    W = target or underlying_data(H.target)
    on = {a: H.H0.ob[a] for a in U.vcat.objects}
    homs = {}
    for (a, b), pb in U.homs.items():
        homs[(a, b)] = W.homs[(on[a], on[b])].induce(V.compose(pb.p0, H.H1), V.bang(pb.obj))
    return VFunctor(U.vcat, W.vcat, on, homs=homs)


def transpose_to_und(H: InternalFunctor, und: Underlying | None = None) -> VFunctor:
    """An internal functor ``Int C -> A`` as a V-functor ``C -> Und A``."""
    tg = int_tagging(H.source)
    C = tg.base
    V = C.cosmos
    U = und or underlying_data(H.target)
    on = {a: V.point_label(V.compose(tg.objects.injection(a), H.H0)) for a in C.objects}
    homs = {}
    for a in C.objects:
        for b in C.objects:
            inj = tg.arrows.injection((a, b))
            homs[(a, b)] = U.homs[(on[a], on[b])].induce(V.compose(inj, H.H1), V.bang(C(a, b)))
    return VFunctor(C, U.vcat, on, homs=homs)


def transpose_to_int(K: VFunctor, A: InternalCategory, source: InternalCategory | None = None,
                     und: Underlying | None = None) -> InternalFunctor:
    """A V-functor ``C -> Und A`` as an internal functor ``Int C -> A``."""
    C = K.source
    V = C.cosmos
    U = und or underlying_data(A)
    if K.target != U.vcat:
        raise ValidationError("functor does not land in the underlying V-category")
    S = source or internalize(C)
    tg = int_tagging(S)
    H0 = V.copair(tg.objects, {a: V.point(A.A0, K.on[a]) for a in C.objects}, A.A0)
    H1 = V.copair(tg.arrows, {(a, b): V.compose(K.homs[(a, b)], U.leg(K.on[a], K.on[b]))
                              for a in C.objects for b in C.objects}, A.A1)
    return InternalFunctor(S, A, H0, H1)


def adjunction_transpose(direction: str, data):
    """``"to_und"`` takes an internal functor out of ``Int C``;
    ``"to_int"`` takes a pair ``(K, A)`` with ``K: C -> Und A``."""
    if direction == "to_und":
        return transpose_to_und(data)
    if direction == "to_int":
        K, A = data
        return transpose_to_int(K, A)
    raise ValidationError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# internal homs


@dataclass(frozen=True, eq=False)
class InternalHom:
    """``[[I, A]]`` together with the maps needed to read its cells."""

    cat: InternalCategory
    source: InternalCategory
    target: InternalCategory
    level0: object      # Sections for (h0, h1)
    eq0: object
    level1: object      # Sections for ((H, K), theta)
    eq1: object
    eval0: Map          # I0 x E0 -> A0
    eval1: Map          # I1 x E0 -> A1
    evalc: Map          # I0 x E1 -> A1, the components

    def point_of_functor(self, H: InternalFunctor) -> Map:
        if H.source != self.source or H.target != self.target:
            raise ValidationError("functor has the wrong boundary")
        V = self.cat.cosmos
        I = self.source
        u = V.name(H.H0)
        v = V.compose(V.proj((I.A1, V.terminal()), 0), H.H1)
        return self.eq0.induce(V.sections_induce(self.level0, u, v))

    def functor_of_point(self, p: Map) -> InternalFunctor:
        V = self.cat.cosmos
        I = self.source
        H0 = V.compose(V.pair(V.identity(I.A0), V.const(I.A0, p)), self.eval0)
        H1 = V.compose(V.pair(V.identity(I.A1), V.const(I.A1, p)), self.eval1)
        return InternalFunctor(I, self.target, H0, H1)

    def arrow_point(self, H: Map, K: Map, theta: Map) -> Map:
        """The cell of level 1 from ``H`` to ``K`` with components ``theta: I0 -> A1``."""
        V = self.cat.cosmos
        I = self.source
        u = V.pair(H, K)
        v = V.compose(V.proj((I.A0, V.terminal()), 0), theta)
        return self.eq1.induce(V.sections_induce(self.level1, u, v))

    def components(self, p: Map) -> Map:
        """Read a level-1 point as its component map ``I0 -> A1``."""
        V = self.cat.cosmos
        I0 = self.source.A0
        return V.compose(V.pair(V.identity(I0), V.const(I0, p)), self.evalc)

    def evaluation(self, x: Map) -> InternalFunctor:
        """Evaluation at a point ``x`` of ``I0``."""
        V = self.cat.cosmos
        E = self.cat
        H0 = V.compose(V.pair(V.const(E.A0, x), V.identity(E.A0)), self.eval0)
        H1 = V.compose(V.pair(V.const(E.A1, x), V.identity(E.A1)), self.evalc)
        return InternalFunctor(E, self.target, H0, H1)

    def diagonal(self) -> InternalFunctor:
        V = self.cat.cosmos
        I, A = self.source, self.target
        u0 = V.curry(V.proj((I.A0, A.A0), 1), I.A0, A.A0)
        v0 = V.compose(V.proj((I.A1, A.A0), 1), A.i)
        d0 = self.eq0.induce(V.sections_induce(self.level0, u0, v0))
        u1 = V.pair(V.compose(A.s, d0), V.compose(A.t, d0))
        v1 = V.proj((I.A0, A.A1), 1)
        d1 = self.eq1.induce(V.sections_induce(self.level1, u1, v1))
        return InternalFunctor(A, self.cat, d0, d1)


def internal_hom_data(I: InternalCategory, A: InternalCategory) -> InternalHom:
    """The exponential ``[[I, A]]`` in Cat(V), built from the limit formula.

    Objects are pairs ``(h0, h1)`` cut out in two stages: the boundary
    equations first, as sections of ``<s, t>``, then identities and
    composition.  Arrows are triples ``(H, K, theta)`` likewise.
    """
    V = I.cosmos
    E00 = V.exponential(I.A0, A.A0)
    Z = E00.obj
    idZ = V.identity(Z)
    p = V.pair(A.s, A.t)
    q0 = V.pair(V.compose(V.times(I.s, idZ), E00.eval), V.compose(V.times(I.t, idZ), E00.eval))
    sec0 = V.sections(q0, p, I.A1, Z)
    S0 = sec0.obj
    idS0 = V.identity(S0)
    I2 = I.composable
    unit_l = V.compose(V.times(I.i, idS0), sec0.eval)
    unit_r = V.compose(V.times(V.identity(I.A0), sec0.proj), E00.eval, A.i)
    comp_l = V.compose(V.times(I.c, idS0), sec0.eval)
    comp_r = V.compose(A.composable.induce(V.compose(V.times(I2.p0, idS0), sec0.eval),
                                           V.compose(V.times(I2.p1, idS0), sec0.eval)), A.c)
    eq0 = V.pointwise_equalizer(S0, [(I.A0, unit_l, unit_r), (I2.obj, comp_l, comp_r)])
    E0, j0 = eq0.obj, eq0.incl
    eval0 = V.compose(V.times(V.identity(I.A0), V.compose(j0, sec0.proj)), E00.eval)
    eval1 = V.compose(V.times(V.identity(I.A1), j0), sec0.eval)

    PP = V.product(E0, E0)
    idI0 = V.identity(I.A0)
    q1 = V.pair(V.compose(V.times(idI0, PP.p0), eval0), V.compose(V.times(idI0, PP.p1), eval0))
    sec1 = V.sections(q1, p, I.A0, PP.obj)
    S1 = sec1.obj
    idS1 = V.identity(S1)
    Hs = V.compose(sec1.proj, PP.p0)
    Ks = V.compose(sec1.proj, PP.p1)
    idI1 = V.identity(I.A1)
    th_s = V.compose(V.times(I.s, idS1), sec1.eval)
    th_t = V.compose(V.times(I.t, idS1), sec1.eval)
    K1 = V.compose(V.times(idI1, Ks), eval1)
    H1 = V.compose(V.times(idI1, Hs), eval1)
    nat_l = V.compose(A.composable.induce(th_s, K1), A.c)
    nat_r = V.compose(A.composable.induce(H1, th_t), A.c)
    eq1 = V.pointwise_equalizer(S1, [(I.A1, nat_l, nat_r)])
    E1, j1 = eq1.obj, eq1.incl
    s = V.compose(j1, Hs)
    t = V.compose(j1, Ks)
    evalc = V.compose(V.times(idI0, j1), sec1.eval)
    i = eq1.induce(V.sections_induce(sec1, V.pair(V.identity(E0), V.identity(E0)),
                                     V.compose(eval0, A.i)))

    def make_c(pb):
        u = V.pair(V.compose(pb.p0, s), V.compose(pb.p1, t))
        v = V.compose(A.composable.induce(V.compose(V.times(idI0, pb.p0), evalc),
                                          V.compose(V.times(idI0, pb.p1), evalc)), A.c)
        return eq1.induce(V.sections_induce(sec1, u, v))

    E = assemble(V, E0, E1, s, t, i, make_c)
    return InternalHom(E, I, A, sec0, eq0, sec1, eq1, eval0, eval1, evalc)


def internal_hom(I: InternalCategory, A: InternalCategory) -> InternalCategory:
    return internal_hom_data(I, A).cat


def walking_arrow(V: Cosmos) -> InternalCategory:
    return internalize(arrow_vcat(V))


@dataclass(frozen=True, eq=False)
class ArrowHom:
    """``[[2, A]]`` with its endpoint functor ``<0, 1>*`` into ``A x A``."""

    cat: InternalCategory
    base: InternalCategory
    ends: InternalFunctor
    squares: Pullback | None = None


def arrow_hom_closed(A: InternalCategory) -> ArrowHom:
    """Objects are the arrows of ``A``; arrows are commuting squares.

    A square is stored as ``((f, b), (a, g))`` with ``f ; b = a ; g``, running
    from ``f`` to ``g``.
    """
    V = A.cosmos
    P = A.composable
    SQ = V.pullback(A.c, A.c)
    f = V.compose(SQ.p0, P.p0)
    b = V.compose(SQ.p0, P.p1)
    a = V.compose(SQ.p1, P.p0)
    g = V.compose(SQ.p1, P.p1)
    idA1 = V.identity(A.A1)
    i = SQ.induce(P.induce(idA1, V.compose(A.t, A.i)), P.induce(V.compose(A.s, A.i), idA1))

    def make_c(pb):
        f0, b0, a0 = (V.compose(pb.p0, m) for m in (f, b, a))
        b1, a1, h1 = (V.compose(pb.p1, m) for m in (b, a, g))
        bb = V.compose(P.induce(b0, b1), A.c)
        aa = V.compose(P.induce(a0, a1), A.c)
        return SQ.induce(P.induce(f0, bb), P.induce(aa, h1))

    E = assemble(V, A.A1, SQ.obj, f, g, i, make_c)
    AA = product_internal(A, A)
    ends = InternalFunctor(E, AA, V.pair(A.s, A.t), V.pair(a, b))
    return ArrowHom(E, A, ends, SQ)


def arrow_hom_generic(A: InternalCategory) -> tuple:
    """``[[2, A]]`` from the limit formula, with its endpoint functor."""
    V = A.cosmos
    D = internal_hom_data(walking_arrow(V), A)
    two = D.source
    ev0 = D.evaluation(V.point(two.A0, ("0", ())))
    ev1 = D.evaluation(V.point(two.A0, ("1", ())))
    return ArrowHom(D.cat, A, pair_functors(ev0, ev1)), D


def arrow_hom(A: InternalCategory) -> InternalCategory:
    return arrow_hom_closed(A).cat


def arrow_hom_comparison(A: InternalCategory) -> InternalFunctor:
    """The canonical functor from the generic ``[[2, A]]`` to the closed form."""
    V = A.cosmos
    closed = arrow_hom_closed(A)
    gen, D = arrow_hom_generic(A)
    two = D.source
    E = gen.cat
    arr = V.point(two.A1, (("0", "1"), ()))
    lvl0 = V.compose(V.pair(V.const(E.A0, arr), V.identity(E.A0)), D.eval1)
    f = V.compose(E.s, lvl0)
    g = V.compose(E.t, lvl0)
    a = V.compose(V.pair(V.const(E.A1, V.point(two.A0, ("0", ()))), V.identity(E.A1)), D.evalc)
    b = V.compose(V.pair(V.const(E.A1, V.point(two.A0, ("1", ()))), V.identity(E.A1)), D.evalc)
    P = A.composable
    lvl1 = closed.squares.induce(P.induce(f, b), P.induce(a, g))
    return InternalFunctor(E, closed.cat, lvl0, lvl1)


@dataclass(frozen=True, eq=False)
class ConstHom:
    """``[[cst X, A]]`` with levels ``[X, A0]`` and ``[X, A1]``."""

    cat: InternalCategory
    base: object
    target: InternalCategory
    exp0: object
    exp1: object

    def diagonal(self) -> InternalFunctor:
        V = self.cat.cosmos
        X, A = self.base, self.target
        return InternalFunctor(A, self.cat, V.curry(V.proj((X, A.A0), 1), X, A.A0),
                               V.curry(V.proj((X, A.A1), 1), X, A.A1))


def hom_cst_data(X, A: InternalCategory) -> ConstHom:
    V = A.cosmos
    e0 = V.exponential(X, A.A0)
    e1 = V.exponential(X, A.A1)

    def post(f, src):
        return V.curry(V.compose(src.eval, f), X, src.obj)

    s = post(A.s, e1)
    t = post(A.t, e1)
    i = post(A.i, e0)

    def make_c(pb):
        idX = V.identity(X)
        l = V.compose(V.times(idX, pb.p0), e1.eval)
        r = V.compose(V.times(idX, pb.p1), e1.eval)
        return V.curry(V.compose(A.composable.induce(l, r), A.c), X, pb.obj)

    E = assemble(V, e0.obj, e1.obj, s, t, i, make_c)
    return ConstHom(E, X, A, e0, e1)


def hom_cst(X, A: InternalCategory) -> InternalCategory:
    return hom_cst_data(X, A).cat


def hom_cst_comparison(X, A: InternalCategory) -> InternalFunctor:
    """The canonical functor from the generic ``[[cst X, A]]`` to the closed form."""
    V = A.cosmos
    closed = hom_cst_data(X, A)
    D = internal_hom_data(cst(X, V), A)
    lvl0 = V.compose(D.eq0.incl, D.level0.proj)
    lvl1 = V.curry(D.evalc, X, D.cat.A1)
    return InternalFunctor(D.cat, closed.cat, lvl0, lvl1)


def ar_x(C: VCategory, X) -> VCategory:
    """The V-category with the same objects and hom-objects ``[X, C(A, B)]``."""
    V = C.cosmos
    obs = C.objects
    exps = {(a, b): V.exponential(X, C(a, b)) for a in obs for b in obs}
    idX = V.identity(X)
    comp = {}
    for a in obs:
        for b in obs:
            for c in obs:
                P = V.product(exps[(a, b)].obj, exps[(b, c)].obj)
                l = V.compose(V.times(idX, P.p0), exps[(a, b)].eval)
                r = V.compose(V.times(idX, P.p1), exps[(b, c)].eval)
                comp[(a, b, c)] = V.curry(V.compose(V.pair(l, r), C.comp[(a, b, c)]), X, P.obj)
    T = V.terminal()
    ident = {a: V.curry(V.compose(V.proj((X, T), 1), C.ident[a]), X, T) for a in obs}
    return VCategory(V, obs, {k: e.obj for k, e in exps.items()}, comp, ident)


def ar_x_comparison(C: VCategory, X) -> VFunctor:
    """The canonical V-functor ``Ar_X C -> Und [[cst X, Int C]]``."""
    V = C.cosmos
    A = internalize(C)
    tg = A.tagging
    H = hom_cst_data(X, A)
    U = underlying_data(H.cat)
    src = ar_x(C, X)
    on = {}
    for a in C.objects:
        const = V.const(X, V.point(A.A0, (a, ())))
        on[a] = V.point_label(V.name(const))
    homs = {}
    for a in C.objects:
        for b in C.objects:
            e = V.exponential(X, C(a, b))
            post = V.curry(V.compose(e.eval, tg.arrows.injection((a, b))), X, e.obj)
            homs[(a, b)] = U.homs[(on[a], on[b])].induce(post, V.bang(e.obj))
    return VFunctor(src, U.vcat, on, homs=homs)


def is_iso_vfunctor(F: VFunctor) -> bool:
    """Bijective on objects and invertible on every hom-object."""
    V = F.source.cosmos
    if validate_vfunctor(F):
        return False
    if sorted(map(repr, F.on.values())) != sorted(map(repr, F.target.objects)) or \
            len(set(F.on.values())) != len(F.target.objects):
        return False
    return all(V.is_iso(h) for h in F.homs.values())


# ---------------------------------------------------------------------------
# slices and commas


@dataclass(frozen=True, eq=False)
class Comma:
    cat: InternalCategory
    projection: InternalFunctor
    data: InternalPullback
    arrows: ArrowHom

    def point(self, a: Map, arrow: Map) -> Map:
        """The object ``(a, arrow)`` of level 0, given as points."""
        return self.data.level0.induce(a, arrow)


def comma_data(H: InternalFunctor, b: InternalElement) -> Comma:
    """``H | b``: objects ``(a, f: H a -> b)``."""
    AH = arrow_hom_closed(H.target)
    L = pair_functors(H, const_functor(H.source, b))
    d = pullback_internal_data(L, AH.ends)
    return Comma(d.cat, d.p0, d, AH)


def cocomma_data(b: InternalElement, K: InternalFunctor) -> Comma:
    """``b | K``: objects ``(a, f: b -> K a)``."""
    AH = arrow_hom_closed(K.target)
    L = pair_functors(const_functor(K.source, b), K)
    d = pullback_internal_data(L, AH.ends)
    return Comma(d.cat, d.p0, d, AH)


def comma(H: InternalFunctor, b: InternalElement):
    d = comma_data(H, b)
    return d.cat, d.projection


def cocomma(b: InternalElement, K: InternalFunctor):
    d = cocomma_data(b, K)
    return d.cat, d.projection


def slice(A: InternalCategory, T: InternalElement):
    return comma(identity_functor(A), T)


def coslice(A: InternalCategory, T: InternalElement):
    return cocomma(T, identity_functor(A))


# ---------------------------------------------------------------------------
# discrete fibrations


@dataclass(frozen=True, eq=False)
class FibrationPacket:
    P: InternalFunctor
    certificate: bool
    fibers: dict | None = None          # A -> (object, leg into A0)
    actions: dict | None = None         # (A, B) -> C(A,B) x P^-1 B -> P^-1 A
    fib0: TaggedCoproduct | None = None
    fib1: TaggedCoproduct | None = None
    phi0: Map | None = None             # fib0 total -> A0
    phi1: Map | None = None             # fib1 total -> A1
    opposite: bool = False

    def __bool__(self):
        return self.certificate


def _comparison(P: InternalFunctor, dual: bool):
    A, B = P.source, P.target
    V = A.cosmos
    end_B = B.s if dual else B.t
    end_A = A.s if dual else A.t
    pb = V.pullback(end_B, P.H0)
    return pb, pb.induce(P.H1, end_A)


def fibration_comparison(P: InternalFunctor, dual: bool = False) -> Map:
    """``<P1, t>: A1 -> B1 x_{B0} A0`` (or with sources for ``dual``)."""
    return _comparison(P, dual)[1]


def _canonical_fibers(P: InternalFunctor, tg: Tagging):
    """Use the summands of a tagged source as fibers when ``P0`` respects the tags."""
    S = P.source.tagging
    V = P.source.cosmos
    if S is None or S.objects.obj != P.source.A0 or S.objects.labels != tg.objects.labels:
        return None
    for l, inj in zip(S.objects.labels, S.objects.injections):
        try:
            V.factor_through(V.compose(inj, P.H0), tg.objects.injection(l))
        except MediatorError:
            return None
    return {l: (S.objects.summand(l), S.objects.injection(l)) for l in S.objects.labels}


def is_discrete_fibration(P: InternalFunctor, dual: bool = False) -> FibrationPacket:
    V = P.source.cosmos
    pb, cmp = _comparison(P, dual)
    cert = V.is_iso(cmp)
    tg = P.target.tagging
    if not cert or tg is None or tg.kind != "int" or dual:
        return FibrationPacket(P, cert, opposite=dual)
    C = tg.base
    obs = C.objects
    fibers = _canonical_fibers(P, tg)
    if fibers is None:
        dec = V.fiber_decompose(P.H0, tg.objects)
        fibers = {l: (f.obj, f.leg) for l, f in dec.fibers.items()}
    fib0 = V.coproduct([(a, fibers[a][0]) for a in obs])
    phi0 = V.copair(fib0, {a: fibers[a][1] for a in obs}, P.source.A0)
    inv = V.inverse(cmp)
    fib1 = V.coproduct([((a, b), V.product(C(a, b), fibers[b][0]).obj)
                        for a in obs for b in obs])
    legs = {}
    for a in obs:
        for b in obs:
            Q = V.product(C(a, b), fibers[b][0])
            into = pb.induce(V.compose(Q.p0, tg.arrows.injection((a, b))),
                             V.compose(Q.p1, fibers[b][1]))
            legs[(a, b)] = V.compose(into, inv)
    phi1 = V.copair(fib1, legs, P.source.A1)
    s_fib = V.compose(phi1, P.source.s, V.inverse(phi0))
    actions = V.extensive_factor(s_fib, fib1, fib0, {(a, b): a for a in obs for b in obs})
    return FibrationPacket(P, cert, fibers, actions, fib0, fib1, phi0, phi1)


def is_discrete_opfibration(P: InternalFunctor) -> FibrationPacket:
    return is_discrete_fibration(P, dual=True)


def composable_square_is_pullback(P: InternalFunctor) -> bool:
    """The square of composable pairs over ``t . pi1`` and ``P0`` is a pullback."""
    A, B = P.source, P.target
    V = A.cosmos
    P2 = functor_on_pairs(P)
    bottom = V.compose(B.composable.p1, B.t)
    pb = V.pullback(bottom, P.H0)
    return V.is_iso(pb.induce(P2, V.compose(A.composable.p1, A.t)))


# ---------------------------------------------------------------------------
# terminal objects


def is_internal_terminal(A: InternalCategory, T: InternalElement) -> bool:
    """Is the slice projection ``A/T -> A`` invertible?

    The projection is a discrete fibration, so its level 1 is a pullback of
    its level 0 and invertibility is decided by the map of objects alone:
    the arrows into ``T``, sent to their sources.
    """
    V = A.cosmos
    pb = V.pullback(A.t, T.point)
    return V.is_iso(V.compose(pb.p0, A.s))


def is_internal_initial(A: InternalCategory, T: InternalElement) -> bool:
    V = A.cosmos
    pb = V.pullback(A.s, T.point)
    return V.is_iso(V.compose(pb.p0, A.t))


def is_internal_terminal_by_slice(A: InternalCategory, T: InternalElement) -> bool:
    """The definition verbatim: build the slice and test its projection."""
    _, proj = slice(A, T)
    return is_iso_functor(proj)


def is_internal_initial_by_slice(A: InternalCategory, T: InternalElement) -> bool:
    _, proj = coslice(A, T)
    return is_iso_functor(proj)


def internal_terminals(A: InternalCategory) -> list:
    return [x for x in elements(A) if is_internal_terminal(A, x)]


def is_v_terminal(C: VCategory, T) -> bool:
    V = C.cosmos
    return all(V.is_terminal_object(C(a, T)) for a in C.objects)


# ---------------------------------------------------------------------------
# cones, cocones and their universal objects


@dataclass(frozen=True, eq=False)
class ConeCategory:
    comma: Comma
    hom: InternalHom
    diagram: InternalFunctor
    diagram_point: Map
    cocone: bool

    @property
    def cat(self) -> InternalCategory:
        return self.comma.cat

    def point(self, L: Map, kappa: Map) -> Map:
        """The object of level 0 with apex ``L`` and components ``kappa: I0 -> A1``."""
        D = self.hom
        V = D.cat.cosmos
        d0 = D.diagonal().H0
        apex = V.compose(L, d0)
        if self.cocone:
            arrow = D.arrow_point(self.diagram_point, apex, kappa)
        else:
            arrow = D.arrow_point(apex, self.diagram_point, kappa)
        return self.comma.point(L, arrow)


def _check_diagram(G: InternalFunctor):
    require(validate_internal_functor(G), "diagram")


def cone_category(G: InternalFunctor) -> ConeCategory:
    _check_diagram(G)
    D = internal_hom_data(G.source, G.target)
    g = D.point_of_functor(G)
    c = comma_data(D.diagonal(), InternalElement(D.cat, g))
    return ConeCategory(c, D, G, g, False)


def cocone_category(G: InternalFunctor) -> ConeCategory:
    _check_diagram(G)
    D = internal_hom_data(G.source, G.target)
    g = D.point_of_functor(G)
    c = cocomma_data(InternalElement(D.cat, g), D.diagonal())
    return ConeCategory(c, D, G, g, True)


def _is_universal(K: ConeCategory, L: Map, kappa: Map, initial: bool) -> bool:
    try:
        p = K.point(L, kappa)
    except MediatorError:
        return False
    x = InternalElement(K.cat, p)
    return is_internal_initial(K.cat, x) if initial else is_internal_terminal(K.cat, x)


def is_internal_limit(G: InternalFunctor, L: Map, kappa: Map) -> bool:
    """Is ``(L, kappa)`` an internal terminal object among cones over ``G``?"""
    return _is_universal(cone_category(G), L, kappa, False)


def is_internal_colimit(G: InternalFunctor, L: Map, kappa: Map) -> bool:
    return _is_universal(cocone_category(G), L, kappa, True)


@dataclass(frozen=True)
class ColimitWitness:
    apex: Map           # * -> A0
    components: Map     # X -> A1


def const_cocone_category(X, G: InternalFunctor) -> tuple:
    """Cocones under a diagram out of ``cst X`` via the closed form of ``[[cst X, A]]``."""
    A = G.target
    V = A.cosmos
    H = hom_cst_data(X, A)
    g = V.name(G.H0)
    c = cocomma_data(InternalElement(H.cat, g), H.diagonal())
    return c, H


def compute_internal_colimit(G: InternalFunctor) -> ColimitWitness | None:
    """Search the objects of ``G | Delta`` for an internal initial one."""
    _check_diagram(G)
    I = G.source
    V = I.cosmos
    if not (I.A1 == I.A0 and V.map_equal(I.s, V.identity(I.A0))
            and V.map_equal(I.t, V.identity(I.A0))):
        raise ValidationError("the diagram must be indexed by a constant internal category")
    X = I.A0
    c, H = const_cocone_category(X, G)
    for p in V.global_elements(c.cat.A0):
        if is_internal_initial(c.cat, InternalElement(c.cat, p)):
            apex = V.compose(p, c.data.level0.p0)
            arrow = V.compose(p, c.data.level0.p1)
            return ColimitWitness(apex, V.point_to_map(H.exp1, arrow))
    return None
