"""The internal Grothendieck construction and its inverse on discrete fibrations."""

from __future__ import annotations

from dataclasses import dataclass

from .cosmos import Map, MediatorError, ValidationError
from .enriched import (VCategory, VFunctor, VNat, VPresheaf, identity_nat, representable,
                       require_valid, validate_presheaf, validate_vfunctor, validate_vnat,
                       yoneda_nat)
from .internal import (FibrationPacket, InternalCategory, InternalFunctor, StructureError,
                       Tagging, assemble, compose_functors, comma_data, element,
                       identity_functor, int_tagging, internalize, internalize_functor,
                       inverse_functor, is_discrete_fibration, is_iso_functor,
                       validate_internal, validate_internal_functor)


class FibrationRequired(StructureError):
    pass


@dataclass(frozen=True, eq=False)
class GrothResult:
    total: InternalCategory
    projection: InternalFunctor
    tagging: Tagging
    presheaf: object

    @property
    def base(self) -> InternalCategory:
        return self.projection.target


def _triples(obs):
    return [(a, b, c) for a in obs for b in obs for c in obs]


def groth(C: VCategory, F: VPresheaf, base: InternalCategory | None = None) -> GrothResult:
    """Objects ``(A, x)`` with ``x`` in ``FA``; arrows ``(f, y)`` from ``(A, F f y)`` to ``(B, y)``."""
    if F.base != C:
        raise ValidationError("presheaf is not based on the given V-category")
    require_valid(validate_presheaf(F), "presheaf")
    V = C.cosmos
    obs = C.objects
    pairs = [(a, b) for a in obs for b in obs]
    IntC = base or internalize(C)
    tg = int_tagging(IntC)
    fam0 = V.coproduct([(a, F.on[a]) for a in obs])
    prods = {(a, b): V.product(C(a, b), F.on[b]) for a, b in pairs}
    fam1 = V.coproduct([(k, prods[k].obj) for k in pairs])
    s = V.indexed_coproduct_map(fam1, fam0, {k: k[0] for k in pairs},
                                {k: F.ev[k] for k in pairs})
    t = V.indexed_coproduct_map(fam1, fam0, {k: k[1] for k in pairs},
                                {k: prods[k].p1 for k in pairs})
    i = V.indexed_coproduct_map(fam0, fam1, {a: (a, a) for a in obs},
                                {a: V.compose(V.unit_left(F.on[a]),
                                              V.times(C.ident[a], V.identity(F.on[a])))
                                 for a in obs})

    def make_c(pb):
        trip = _triples(obs)
        P3 = {k: V.product_family((C(k[0], k[1]), C(k[1], k[2]), F.on[k[2]])) for k in trip}
        tc = V.coproduct([(k, P3[k].obj) for k in trip])
        legs, comps = {}, {}
        for a, b, c in trip:
            f, g, z = P3[(a, b, c)].projections
            gz = V.pair(g, z)
            first = V.compose(V.pair(f, V.compose(gz, F.ev[(b, c)])), fam1.injection((a, b)))
            legs[(a, b, c)] = pb.induce(first, V.compose(gz, fam1.injection((b, c))))
            comps[(a, b, c)] = V.pair(V.compose(V.pair(f, g), C.comp[(a, b, c)]), z)
        phi = V.copair(tc, legs, pb.obj)
        comp = V.indexed_coproduct_map(tc, fam1, {k: (k[0], k[2]) for k in trip}, comps)
        return V.compose(V.inverse(phi), comp)

    tagging = Tagging("groth", C, fam0, fam1)
    total = assemble(V, fam0.obj, fam1.obj, s, t, i, make_c, tagging)
    H0 = V.indexed_coproduct_map(fam0, tg.objects, {a: a for a in obs},
                                 {a: V.bang(F.on[a]) for a in obs})
    H1 = V.indexed_coproduct_map(fam1, tg.arrows, {k: k for k in pairs},
                                 {k: prods[k].p0 for k in pairs})
    return GrothResult(total, InternalFunctor(total, IntC, H0, H1), tagging, F)


def groth_nat(alpha: VNat, source: GrothResult | None = None,
              target: GrothResult | None = None) -> InternalFunctor:
    """``int alpha``: ``(A, x) |-> (A, alpha_A x)`` and ``(f, y) |-> (f, alpha_B y)``."""
    require_valid(validate_vnat(alpha), "transformation")
    F, G = alpha.source, alpha.target
    C = F.base
    V = C.cosmos
    src = source or groth(C, F)
    tgt = target or groth(C, G, base=src.base)
    obs = C.objects
    pairs = [(a, b) for a in obs for b in obs]
    a_ = alpha.components
    H0 = V.indexed_coproduct_map(src.tagging.objects, tgt.tagging.objects, {a: a for a in obs},
                                 {a: a_[a] for a in obs})
    H1 = V.indexed_coproduct_map(src.tagging.arrows, tgt.tagging.arrows, {k: k for k in pairs},
                                 {(a, b): V.times(V.identity(C(a, b)), a_[b]) for a, b in pairs})
    return InternalFunctor(src.total, tgt.total, H0, H1)


@dataclass(frozen=True, eq=False)
class CovariantGroth:
    total: InternalCategory
    projection: InternalFunctor
    tagging: Tagging
    certificate: bool


def groth_cov(I: VCategory, W: VFunctor, base: InternalCategory | None = None) -> CovariantGroth:
    """Elements of a functor into V: arrows ``(w, f)`` from ``(i, w)`` to ``(j, W f w)``."""
    if not W.into_v or W.source != I:
        raise ValidationError("need a functor from the given V-category into V")
    require_valid(validate_vfunctor(W), "weight")
    V = I.cosmos
    obs = I.objects
    pairs = [(a, b) for a in obs for b in obs]
    IntI = base or internalize(I)
    tg = int_tagging(IntI)
    fam0 = V.coproduct([(a, W.on[a]) for a in obs])
    prods = {(a, b): V.product(W.on[a], I(a, b)) for a, b in pairs}
    fam1 = V.coproduct([(k, prods[k].obj) for k in pairs])
    s = V.indexed_coproduct_map(fam1, fam0, {k: k[0] for k in pairs},
                                {k: prods[k].p0 for k in pairs})
    t = V.indexed_coproduct_map(fam1, fam0, {k: k[1] for k in pairs},
                                {k: W.ev[k] for k in pairs})
    i = V.indexed_coproduct_map(fam0, fam1, {a: (a, a) for a in obs},
                                {a: V.compose(V.unit_right(W.on[a]),
                                              V.times(V.identity(W.on[a]), I.ident[a]))
                                 for a in obs})

    def make_c(pb):
        trip = _triples(obs)
        P3 = {k: V.product_family((W.on[k[0]], I(k[0], k[1]), I(k[1], k[2]))) for k in trip}
        tc = V.coproduct([(k, P3[k].obj) for k in trip])
        legs, comps = {}, {}
        for a, b, c in trip:
            w, f, g = P3[(a, b, c)].projections
            wf = V.pair(w, f)
            second = V.compose(V.pair(V.compose(wf, W.ev[(a, b)]), g), fam1.injection((b, c)))
            legs[(a, b, c)] = pb.induce(V.compose(wf, fam1.injection((a, b))), second)
            comps[(a, b, c)] = V.pair(w, V.compose(V.pair(f, g), I.comp[(a, b, c)]))
        phi = V.copair(tc, legs, pb.obj)
        comp = V.indexed_coproduct_map(tc, fam1, {k: (k[0], k[2]) for k in trip}, comps)
        return V.compose(V.inverse(phi), comp)

    tagging = Tagging("groth_cov", I, fam0, fam1)
    total = assemble(V, fam0.obj, fam1.obj, s, t, i, make_c, tagging)
    H0 = V.indexed_coproduct_map(fam0, tg.objects, {a: a for a in obs},
                                 {a: V.bang(W.on[a]) for a in obs})
    H1 = V.indexed_coproduct_map(fam1, tg.arrows, {k: k for k in pairs},
                                 {k: prods[k].p1 for k in pairs})
    P = InternalFunctor(total, IntI, H0, H1)
    return CovariantGroth(total, P, tagging, is_discrete_fibration(P, dual=True).certificate)


# ---------------------------------------------------------------------------
# change of base


def precompose_presheaf(F: VFunctor, G: VPresheaf) -> VPresheaf:
    """``G . F`` for a V-functor ``F: C -> D`` and a presheaf ``G`` on ``D``."""
    C = F.source
    V = C.cosmos
    on = {a: G.on[F.on[a]] for a in C.objects}
    ev = {}
    for a in C.objects:
        for b in C.objects:
            ev[(a, b)] = V.compose(V.times(F.homs[(a, b)], V.identity(on[b])),
                                   G.ev[(F.on[a], F.on[b])])
    return VPresheaf(C, on, ev)


@dataclass(frozen=True, eq=False)
class ChangeOfBase:
    functor: InternalFunctor        # int (G F) -> int G
    source: GrothResult
    target: GrothResult
    base_functor: InternalFunctor   # Int F
    commutes: bool
    certificate: bool               # the square is a levelwise pullback


def change_of_base(F: VFunctor, G: VPresheaf) -> ChangeOfBase:
    C, D = F.source, F.target
    if G.base != D:
        raise ValidationError("presheaf is not based on the target of the functor")
    require_valid(validate_vfunctor(F), "functor")
    V = C.cosmos
    IntC, IntD = internalize(C), internalize(D)
    tgt = groth(D, G, base=IntD)
    src = groth(C, precompose_presheaf(F, G), base=IntC)
    obs = C.objects
    pairs = [(a, b) for a in obs for b in obs]
    H0 = V.indexed_coproduct_map(src.tagging.objects, tgt.tagging.objects, dict(F.on),
                                 {a: V.identity(G.on[F.on[a]]) for a in obs})
    H1 = V.indexed_coproduct_map(src.tagging.arrows, tgt.tagging.arrows,
                                 {(a, b): (F.on[a], F.on[b]) for a, b in pairs},
                                 {(a, b): V.times(F.homs[(a, b)], V.identity(G.on[F.on[b]]))
                                  for a, b in pairs})
    H = InternalFunctor(src.total, tgt.total, H0, H1)
    IF = internalize_functor(F, IntC, IntD)
    commutes = compose_functors(H, tgt.projection) == compose_functors(src.projection, IF)
    cert = commutes
    if commutes:
        for lvl in (0, 1):
            h = H0 if lvl == 0 else H1
            p = src.projection.H0 if lvl == 0 else src.projection.H1
            q = tgt.projection.H0 if lvl == 0 else tgt.projection.H1
            f = IF.H0 if lvl == 0 else IF.H1
            pb = V.pullback(q, f)
            if not V.is_iso(pb.induce(h, p)):
                cert = False
    return ChangeOfBase(H, src, tgt, IF, commutes, cert)


# ---------------------------------------------------------------------------
# the inverse construction


def _require_packet(packet: FibrationPacket):
    if not packet.certificate:
        raise FibrationRequired("the functor is not an internal discrete fibration")
    if packet.fibers is None:
        raise StructureError("fibers need a target of the form Int C with its tagging")


def inverse_fib(packet: FibrationPacket) -> VPresheaf:
    """Fibers and transport maps of a discrete fibration over ``Int C``."""
    _require_packet(packet)
    C = packet.P.target.tagging.base
    return VPresheaf(C, {a: packet.fibers[a][0] for a in C.objects}, packet.actions)


def fibration_of(P: InternalFunctor) -> FibrationPacket:
    packet = is_discrete_fibration(P)
    _require_packet(packet)
    return packet


def inverse_fib_mor(H: InternalFunctor, source: FibrationPacket,
                    target: FibrationPacket) -> VNat:
    """The transformation of fibers induced by ``H`` over ``Int C``."""
    _require_packet(source)
    _require_packet(target)
    if H.source != source.P.source or H.target != target.P.source:
        raise ValidationError("functor does not run between the given fibrations")
    V = H.source.cosmos
    if not V.map_equal(V.compose(H.H0, target.P.H0), source.P.H0):
        raise ValidationError("functor does not commute with the projections")
    C = source.P.target.tagging.base
    comps = {}
    for a in C.objects:
        _, leg_p = source.fibers[a]
        _, leg_q = target.fibers[a]
        comps[a] = V.factor_through(V.compose(leg_p, H.H0), leg_q)
    return VNat(inverse_fib(source), inverse_fib(target), comps)


@dataclass(frozen=True)
class Certified:
    value: object
    certificate: bool
    problems: tuple = ()


def unit_eta(F: VPresheaf, g: GrothResult | None = None) -> Certified:
    """``Phi(int F) => F``; with summands as fibers every component is an identity."""
    C = F.base
    V = C.cosmos
    g = g or groth(C, F)
    packet = is_discrete_fibration(g.projection)
    _require_packet(packet)
    phi = inverse_fib(packet)
    comps = {}
    for a in C.objects:
        Y = phi.on[a]
        comps[a] = V.identity(Y) if Y == F.on[a] else \
            V.factor_through(packet.fibers[a][1], g.tagging.objects.injection(a))
    eta = VNat(phi, F, comps)
    problems = tuple(validate_presheaf(phi)) + tuple(validate_vnat(eta))
    ok = not problems and all(V.is_iso(f) for f in comps.values())
    return Certified(eta, ok, problems)


def counit_epsilon(packet: FibrationPacket, g: GrothResult | None = None) -> Certified:
    """``int Phi(P) -> A`` over ``Int C``."""
    _require_packet(packet)
    P = packet.P
    C = P.target.tagging.base
    g = g or groth(C, inverse_fib(packet), base=P.target)
    if g.tagging.objects.obj != packet.fib0.obj or g.tagging.arrows.obj != packet.fib1.obj:
        raise StructureError("fiber coproducts do not match the category of elements")
    eps = InternalFunctor(g.total, P.source, packet.phi0, packet.phi1)
    problems = tuple(validate_internal_functor(eps))
    over = compose_functors(eps, P) == g.projection if not problems else False
    ok = not problems and over and is_iso_functor(eps)
    return Certified(eps, ok, problems)


# ---------------------------------------------------------------------------
# representables and slices


def psi(C: VCategory, c, base: InternalCategory | None = None) -> Certified:
    """``int C(-, c) -> Int C / c``: ``x |-> (A, x)`` and ``(m, y) |-> ((m;y, i_c), (m, y))``."""
    V = C.cosmos
    IntC = base or internalize(C)
    tg = int_tagging(IntC)
    g = groth(C, representable(C, c), base=IntC)
    sl = comma_data(identity_functor(IntC), element(IntC, (c, ())))
    L0, L1 = sl.data.level0, sl.data.level1
    SQ = sl.arrows.squares
    Pa = IntC.composable
    obs = C.objects
    legs0, legs1 = {}, {}
    for a in obs:
        h = C(a, c)
        legs0[a] = L0.induce(V.compose(V.bang(h), V.point(IntC.A0, (a, ()))),
                             tg.arrows.injection((a, c)))
    ic = V.compose(C.ident[c], tg.arrows.injection((c, c)))
    for a in obs:
        for b in obs:
            P = V.product(C(a, b), C(b, c))
            m = V.compose(P.p0, tg.arrows.injection((a, b)))
            y = V.compose(P.p1, tg.arrows.injection((b, c)))
            my = V.compose(C.comp[(a, b, c)], tg.arrows.injection((a, c)))
            square = SQ.induce(Pa.induce(my, V.const(P.obj, ic)), Pa.induce(m, y))
            legs1[(a, b)] = L1.induce(m, square)
    H0 = V.copair(g.tagging.objects, legs0, sl.cat.A0)
    H1 = V.copair(g.tagging.arrows, legs1, sl.cat.A1)
    H = InternalFunctor(g.total, sl.cat, H0, H1)
    problems = tuple(validate_internal_functor(H))
    ok = not problems and is_iso_functor(H) and \
        compose_functors(H, sl.projection) == g.projection
    return Certified(H, ok, problems)


def slice_functor_from_element(F: VPresheaf, C: VCategory, x: Map, c=None) -> Certified:
    """The functor ``Int C / c -> int F`` classifying ``x: * -> Fc``.

    ``c`` defaults to the unique object with ``x`` landing in ``Fc``.
    """
    V = C.cosmos
    if c is None:
        hits = [a for a in C.objects if F.on[a] == x.cod]
        if len(hits) != 1:
            raise ValidationError("name the object the element belongs to")
        c = hits[0]
    IntC = internalize(C)
    p = psi(C, c, base=IntC)
    if not p.certificate:
        raise MediatorError("comparison with the slice is not invertible")
    alpha = yoneda_nat(F, c, x)
    src = groth(C, alpha.source, base=IntC)
    tgt = groth(C, F, base=IntC)
    ga = groth_nat(alpha, src, tgt)
    H = compose_functors(inverse_functor(p.value), ga)
    idc = V.compose(C.ident[c], src.tagging.objects.injection(c))
    start = V.compose(idc, p.value.H0)
    hit = V.compose(start, H.H0)
    expected = V.compose(x, tgt.tagging.objects.injection(c))
    return Certified(H, V.map_equal(hit, expected))


def identity_transformation_functor(F: VPresheaf) -> InternalFunctor:
    return groth_nat(identity_nat(F))


def is_valid_groth(g: GrothResult) -> list:
    return validate_internal(g.total) + validate_internal_functor(g.projection)
