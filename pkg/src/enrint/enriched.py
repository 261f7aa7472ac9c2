"""Finite enriched categories and functors stored in evaluation form."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .cosmos import (Cosmos, CosmosError, Map, ValidationError, cosmos_of,
                     from_empty, size)


class EnrichedError(CosmosError):
    pass


@dataclass(frozen=True, eq=False)
class VCategory:
    cosmos: Cosmos
    objects: tuple
    hom: Mapping        # (A, B) -> object C(A, B)
    comp: Mapping       # (A, B, C) -> C(A, B) x C(B, C) -> C(A, C)
    ident: Mapping      # A -> (* -> C(A, A))

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "hom", dict(self.hom))
        object.__setattr__(self, "comp", dict(self.comp))
        object.__setattr__(self, "ident", dict(self.ident))

    def __call__(self, a, b):
        return self.hom[(a, b)]

    def __eq__(self, other):
        return (isinstance(other, VCategory) and self.objects == other.objects
                and self.hom == other.hom and self.comp == other.comp
                and self.ident == other.ident)

    __hash__ = object.__hash__


@dataclass(frozen=True, eq=False)
class VPresheaf:
    """A V-functor ``C^op -> V`` given by its action maps ``C(A,B) x FB -> FA``."""

    base: VCategory
    on: Mapping
    ev: Mapping

    def __post_init__(self):
        object.__setattr__(self, "on", dict(self.on))
        object.__setattr__(self, "ev", dict(self.ev))

    def __eq__(self, other):
        return (isinstance(other, VPresheaf) and self.base == other.base
                and self.on == other.on and self.ev == other.ev)

    __hash__ = object.__hash__


@dataclass(frozen=True, eq=False)
class VFunctor:
    """A V-functor out of ``source``.

    With ``target`` a V-category the hom maps ``F_{A,B}`` are stored in
    ``homs``.  With ``target`` equal to ``None`` the functor lands in V itself
    and is stored covariantly: ``ev[i, j]: Wi x I(i, j) -> Wj``.
    """

    source: VCategory
    target: VCategory | None
    on: Mapping
    homs: Mapping = field(default_factory=dict)
    ev: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "on", dict(self.on))
        object.__setattr__(self, "homs", dict(self.homs))
        object.__setattr__(self, "ev", dict(self.ev))

    @property
    def into_v(self) -> bool:
        return self.target is None

    def __eq__(self, other):
        return (isinstance(other, VFunctor) and self.source == other.source
                and self.target == other.target and self.on == other.on
                and self.homs == other.homs and self.ev == other.ev)

    __hash__ = object.__hash__


@dataclass(frozen=True, eq=False)
class VNat:
    """Components ``FA -> GA`` of a transformation between V-valued functors."""

    source: object
    target: object
    components: Mapping

    def __post_init__(self):
        object.__setattr__(self, "components", dict(self.components))

    def __eq__(self, other):
        return (isinstance(other, VNat) and self.components == other.components
                and self.source == other.source and self.target == other.target)

    __hash__ = object.__hash__


@dataclass(frozen=True)
class EnrichedElement:
    obj: object
    point: Map


@dataclass(frozen=True)
class End:
    """``V^I(F, G)`` as a subobject of the product of the ``[Fi, Gi]``."""

    obj: object
    incl: Map
    product: object
    exponentials: tuple
    index: tuple
    equalizer: object

    def induce(self, u: Map) -> Map:
        return self.equalizer.induce(u)


# ---------------------------------------------------------------------------
# validation


def _check(report, V, lhs, rhs, what):
    try:
        ok = V.map_equal(lhs, rhs)
    except CosmosError as exc:
        report.append(f"{what}: {exc}")
        return
    if not ok:
        report.append(what)


def _boundary(report, f: Map, dom, cod, what):
    if f.dom != dom or f.cod != cod:
        report.append(f"{what} has the wrong boundary")
        return False
    return True


def validate_vcategory(C: VCategory) -> list:
    V = C.cosmos
    report = []
    obs = C.objects
    for a in obs:
        for b in obs:
            if (a, b) not in C.hom:
                report.append(f"missing hom-object ({a},{b})")
    if report:
        return report
    for a in obs:
        for b in obs:
            for c in obs:
                f = C.comp.get((a, b, c))
                if f is None:
                    report.append(f"missing composition ({a},{b},{c})")
                    continue
                _boundary(report, f, V.product(C(a, b), C(b, c)).obj, C(a, c),
                          f"composition ({a},{b},{c})")
        i = C.ident.get(a)
        if i is None:
            report.append(f"missing identity at {a}")
        else:
            _boundary(report, i, V.terminal(), C(a, a), f"identity at {a}")
    if report:
        return report
    for a in obs:
        for b in obs:
            h = C(a, b)
            left = V.product(V.terminal(), h)
            _check(report, V, V.compose(V.times(C.ident[a], V.identity(h)), C.comp[(a, a, b)]),
                   left.p1, f"left unit law fails at ({a},{b})")
            right = V.product(h, V.terminal())
            _check(report, V, V.compose(V.times(V.identity(h), C.ident[b]), C.comp[(a, b, b)]),
                   right.p0, f"right unit law fails at ({a},{b})")
    for a in obs:
        for b in obs:
            for c in obs:
                for d in obs:
                    x, y, z = C(a, b), C(b, c), C(c, d)
                    lhs = V.compose(V.times(C.comp[(a, b, c)], V.identity(z)), C.comp[(a, c, d)])
                    rhs = V.compose(V.assoc(x, y, z), V.times(V.identity(x), C.comp[(b, c, d)]),
                                    C.comp[(a, b, d)])
                    _check(report, V, lhs, rhs, f"associativity fails at ({a},{b},{c},{d})")
    return report


def validate_presheaf(F: VPresheaf) -> list:
    C = F.base
    V = C.cosmos
    report = []
    obs = C.objects
    for a in obs:
        if a not in F.on:
            report.append(f"missing value at {a}")
    if report:
        return report
    for a in obs:
        for b in obs:
            e = F.ev.get((a, b))
            if e is None:
                report.append(f"missing action ({a},{b})")
                continue
            _boundary(report, e, V.product(C(a, b), F.on[b]).obj, F.on[a], f"action ({a},{b})")
    if report:
        return report
    for a in obs:
        Fa = F.on[a]
        P = V.product(V.terminal(), Fa)
        _check(report, V, V.compose(V.times(C.ident[a], V.identity(Fa)), F.ev[(a, a)]), P.p1,
               f"identity law fails at {a}")
    for a in obs:
        for b in obs:
            for c in obs:
                x, y, z = C(a, b), C(b, c), F.on[c]
                lhs = V.compose(V.times(C.comp[(a, b, c)], V.identity(z)), F.ev[(a, c)])
                rhs = V.compose(V.assoc(x, y, z), V.times(V.identity(x), F.ev[(b, c)]),
                                F.ev[(a, b)])
                _check(report, V, lhs, rhs, f"composition law fails at ({a},{b},{c})")
    return report


def validate_vfunctor(F: VFunctor) -> list:
    I = F.source
    V = I.cosmos
    report = []
    obs = I.objects
    for i in obs:
        if i not in F.on:
            report.append(f"missing value at {i}")
    if report:
        return report
    if F.into_v:
        for i in obs:
            for j in obs:
                e = F.ev.get((i, j))
                if e is None:
                    report.append(f"missing action ({i},{j})")
                    continue
                _boundary(report, e, V.product(F.on[i], I(i, j)).obj, F.on[j],
                          f"action ({i},{j})")
        if report:
            return report
        for i in obs:
            Wi = F.on[i]
            P = V.product(Wi, V.terminal())
            _check(report, V, V.compose(V.times(V.identity(Wi), I.ident[i]), F.ev[(i, i)]),
                   P.p0, f"identity law fails at {i}")
        for i in obs:
            for j in obs:
                for k in obs:
                    w, x, y = F.on[i], I(i, j), I(j, k)
                    lhs = V.compose(V.times(V.identity(w), I.comp[(i, j, k)]), F.ev[(i, k)])
                    rhs = V.compose(V.assoc_inv(w, x, y), V.times(F.ev[(i, j)], V.identity(y)),
                                    F.ev[(j, k)])
                    _check(report, V, lhs, rhs, f"composition law fails at ({i},{j},{k})")
        return report
    D = F.target
    for i in obs:
        if F.on[i] not in D.objects:
            report.append(f"{i} is not sent to an object of the target")
    if report:
        return report
    for i in obs:
        for j in obs:
            h = F.homs.get((i, j))
            if h is None:
                report.append(f"missing hom map ({i},{j})")
                continue
            _boundary(report, h, I(i, j), D(F.on[i], F.on[j]), f"hom map ({i},{j})")
    if report:
        return report
    for i in obs:
        _check(report, V, V.compose(I.ident[i], F.homs[(i, i)]), D.ident[F.on[i]],
               f"identity law fails at {i}")
    for i in obs:
        for j in obs:
            for k in obs:
                lhs = V.compose(I.comp[(i, j, k)], F.homs[(i, k)])
                rhs = V.compose(V.times(F.homs[(i, j)], F.homs[(j, k)]),
                                D.comp[(F.on[i], F.on[j], F.on[k])])
                _check(report, V, lhs, rhs, f"composition law fails at ({i},{j},{k})")
    return report


def validate_vnat(alpha: VNat) -> list:
    F, G = alpha.source, alpha.target
    report = []
    if isinstance(F, VPresheaf):
        C = F.base
        V = C.cosmos
        for a in C.objects:
            f = alpha.components.get(a)
            if f is None:
                report.append(f"missing component at {a}")
                continue
            _boundary(report, f, F.on[a], G.on[a], f"component at {a}")
        if report:
            return report
        for a in C.objects:
            for b in C.objects:
                lhs = V.compose(F.ev[(a, b)], alpha.components[a])
                rhs = V.compose(V.times(V.identity(C(a, b)), alpha.components[b]), G.ev[(a, b)])
                _check(report, V, lhs, rhs, f"naturality fails at ({a},{b})")
        return report
    I = F.source
    V = I.cosmos
    for i in I.objects:
        f = alpha.components.get(i)
        if f is None:
            report.append(f"missing component at {i}")
            continue
        _boundary(report, f, F.on[i], G.on[i], f"component at {i}")
    if report:
        return report
    for i in I.objects:
        for j in I.objects:
            lhs = V.compose(F.ev[(i, j)], alpha.components[j])
            rhs = V.compose(V.times(alpha.components[i], V.identity(I(i, j))), G.ev[(i, j)])
            _check(report, V, lhs, rhs, f"naturality fails at ({i},{j})")
    return report


def require_valid(report: list, what: str):
    if report:
        raise ValidationError(f"invalid {what}: " + "; ".join(report[:3]))


# ---------------------------------------------------------------------------
# small V-categories


def _structure_map(V: Cosmos, dom, cod) -> Map:
    """The only map available for hom-objects that are points or empty."""
    if size(dom) == 0:
        return from_empty(dom, cod)
    if V.is_terminal_object(cod):
        return V.bang(dom)
    raise EnrichedError("no canonical structure map")


def unit_vcat(V: Cosmos) -> VCategory:
    T = V.terminal()
    return VCategory(V, ("0",), {("0", "0"): T},
                     {("0", "0", "0"): V.bang(V.product(T, T).obj)}, {"0": V.identity(T)})


def discrete_vcat(V: Cosmos, labels) -> VCategory:
    labels = tuple(labels)
    T, E = V.terminal(), V.initial()
    hom = {(a, b): T if a == b else E for a in labels for b in labels}
    return _from_point_homs(V, labels, hom)


def arrow_vcat(V: Cosmos) -> VCategory:
    """The walking arrow ``0 -> 1`` with ``hom(1, 0)`` initial."""
    T, E = V.terminal(), V.initial()
    hom = {("0", "0"): T, ("0", "1"): T, ("1", "1"): T, ("1", "0"): E}
    return _from_point_homs(V, ("0", "1"), hom)


def poset_vcat(V: Cosmos, labels, leq) -> VCategory:
    """A preorder as a V-category with hom-objects ``*`` or empty."""
    labels = tuple(labels)
    T, E = V.terminal(), V.initial()
    hom = {(a, b): T if leq(a, b) else E for a in labels for b in labels}
    return _from_point_homs(V, labels, hom)


def _from_point_homs(V, labels, hom) -> VCategory:
    comp = {}
    for a in labels:
        for b in labels:
            for c in labels:
                comp[(a, b, c)] = _structure_map(V, V.product(hom[(a, b)], hom[(b, c)]).obj,
                                                 hom[(a, c)])
    ident = {a: V.identity(V.terminal()) for a in labels}
    return VCategory(V, labels, hom, comp, ident)


def opposite(C: VCategory) -> VCategory:
    V = C.cosmos
    obs = C.objects
    hom = {(a, b): C(b, a) for a in obs for b in obs}
    comp = {(a, b, c): V.compose(V.swap(C(b, a), C(c, b)), C.comp[(c, b, a)])
            for a in obs for b in obs for c in obs}
    return VCategory(V, obs, hom, comp, C.ident)


def relabel_vcat(C: VCategory, rename: Mapping) -> VCategory:
    """Rename the objects of ``C`` along a bijection."""
    r = rename
    return VCategory(C.cosmos, tuple(r[a] for a in C.objects),
                     {(r[a], r[b]): h for (a, b), h in C.hom.items()},
                     {(r[a], r[b], r[c]): f for (a, b, c), f in C.comp.items()},
                     {r[a]: i for a, i in C.ident.items()})


def relabel_presheaf(F: VPresheaf, rename: Mapping, base: VCategory) -> VPresheaf:
    r = rename
    return VPresheaf(base, {r[a]: X for a, X in F.on.items()},
                     {(r[a], r[b]): e for (a, b), e in F.ev.items()})


def identity_vfunctor(C: VCategory) -> VFunctor:
    V = C.cosmos
    return VFunctor(C, C, {a: a for a in C.objects},
                    homs={k: V.identity(h) for k, h in C.hom.items()})


# ---------------------------------------------------------------------------
# presheaves and transformations


def representable(C: VCategory, c) -> VPresheaf:
    if c not in C.objects:
        raise EnrichedError(f"unknown object {c!r}")
    return VPresheaf(C, {a: C(a, c) for a in C.objects},
                     {(a, b): C.comp[(a, b, c)] for a in C.objects for b in C.objects})


def constant_presheaf(C: VCategory, X) -> VPresheaf:
    V = C.cosmos
    return VPresheaf(C, {a: X for a in C.objects},
                     {(a, b): V.proj((C(a, b), X), 1) for a in C.objects for b in C.objects})


def identity_nat(F) -> VNat:
    V = F.base.cosmos if isinstance(F, VPresheaf) else F.source.cosmos
    return VNat(F, F, {a: V.identity(X) for a, X in F.on.items()})


def compose_nat(alpha: VNat, beta: VNat) -> VNat:
    """``alpha`` then ``beta``."""
    comps = {}
    for a, f in alpha.components.items():
        comps[a] = cosmos_of(f.dom).compose(f, beta.components[a])
    return VNat(alpha.source, beta.target, comps)


def yoneda_nat(F: VPresheaf, c, x: Map) -> VNat:
    """The transformation ``C(-, c) => F`` determined by ``x: * -> Fc``."""
    C = F.base
    V = C.cosmos
    if x.dom != V.terminal() or x.cod != F.on[c]:
        raise ValidationError("x is not a global element of Fc")
    comps = {}
    for a in C.objects:
        h = C(a, c)
        comps[a] = V.compose(V.unit_right(h), V.times(V.identity(h), x), F.ev[(a, c)])
    return VNat(representable(C, c), F, comps)


def is_representable_by(F: VPresheaf, c, x: Map) -> bool:
    V = F.base.cosmos
    alpha = yoneda_nat(F, c, x)
    return all(V.is_iso(f) for f in alpha.components.values())


def find_representations(F: VPresheaf) -> list:
    V = F.base.cosmos
    out = []
    for c in F.base.objects:
        for x in V.global_elements(F.on[c]):
            if is_representable_by(F, c, x):
                out.append(EnrichedElement(c, x))
    return out


# ---------------------------------------------------------------------------
# ends


def functor_hom(F: VFunctor, G: VFunctor) -> End:
    """The object of V-natural transformations ``F => G`` between functors into V."""
    if not (F.into_v and G.into_v):
        raise ValidationError("ends are taken between functors into V")
    if F.source != G.source:
        raise ValidationError("functors have different sources")
    I = F.source
    V = I.cosmos
    obs = I.objects
    exps = tuple(V.exponential(F.on[i], G.on[i]) for i in obs)
    P = V.product_family(tuple(e.obj for e in exps))
    where = {i: n for n, i in enumerate(obs)}
    equations = []
    for i in obs:
        for j in obs:
            X = V.product(F.on[i], I(i, j))
            XP = V.product(X.obj, P.obj)
            a = V.compose(XP.p0, X.p0)
            f = V.compose(XP.p0, X.p1)
            theta_i = V.compose(XP.p1, P.projections[where[i]])
            theta_j = V.compose(XP.p1, P.projections[where[j]])
            # transport then apply, versus apply then transport
            u1 = V.compose(V.pair(V.compose(XP.p0, F.ev[(i, j)]), theta_j), exps[where[j]].eval)
            u2 = V.compose(V.pair(V.compose(V.pair(a, theta_i), exps[where[i]].eval), f),
                           G.ev[(i, j)])
            equations.append((X.obj, u1, u2))
    eq = V.pointwise_equalizer(P.obj, equations)
    return End(eq.obj, eq.incl, P, exps, obs, eq)


def end_point_to_nat(F: VFunctor, G: VFunctor, end: End, p: Map) -> VNat:
    V = F.source.cosmos
    comps = {}
    for n, i in enumerate(end.index):
        q = V.compose(p, end.incl, end.product.projections[n])
        comps[i] = V.point_to_map(end.exponentials[n], q)
    return VNat(F, G, comps)


def nat_to_end_point(alpha: VNat, end: End) -> Map:
    V = alpha.source.source.cosmos
    names = [V.name(alpha.components[i]) for i in end.index]
    T = V.terminal()
    return end.induce(end.product.pair(names, T) if not names else end.product.pair(names))


def covariant_hom(C: VCategory, a, G: VFunctor) -> VFunctor:
    """The functor ``C(a, G-)`` from the source of ``G`` into V."""
    V = C.cosmos
    I = G.source
    on = {i: C(a, G.on[i]) for i in I.objects}
    ev = {}
    for i in I.objects:
        for j in I.objects:
            ev[(i, j)] = V.compose(V.times(V.identity(on[i]), G.homs[(i, j)]),
                                   C.comp[(a, G.on[i], G.on[j])])
    return VFunctor(I, None, on, ev=ev)


@dataclass(frozen=True)
class ConePresheaf:
    presheaf: VPresheaf
    ends: dict


def weighted_cone_presheaf(W: VFunctor, G: VFunctor) -> VPresheaf:
    return weighted_cone_data(W, G).presheaf


def weighted_cone_data(W: VFunctor, G: VFunctor) -> ConePresheaf:
    """``A |-> V^I(W, C(A, G-))`` with its actions, keeping the ends."""
    if not W.into_v or G.into_v:
        raise ValidationError("need a weight into V and a diagram into a V-category")
    if W.source != G.source:
        raise ValidationError("weight and diagram have different shapes")
    C = G.target
    V = C.cosmos
    ends = {a: functor_hom(W, covariant_hom(C, a, G)) for a in C.objects}
    I = W.source
    ev = {}
    for a in C.objects:
        for b in C.objects:
            Eb = ends[b]
            Z = V.product(C(a, b), Eb.obj)
            legs = []
            for n, i in enumerate(I.objects):
                Wi = W.on[i]
                XZ = V.product(Wi, Z.obj)
                f = V.compose(XZ.p1, Z.p0)
                theta = V.compose(XZ.p1, Z.p1, Eb.incl, Eb.product.projections[n])
                image = V.compose(V.pair(XZ.p0, theta), Eb.exponentials[n].eval)
                body = V.compose(V.pair(f, image), C.comp[(a, b, G.on[i])])
                legs.append(V.curry(body, Wi, Z.obj))
            into = ends[a].product.pair(legs, Z.obj) if not legs else ends[a].product.pair(legs)
            ev[(a, b)] = ends[a].induce(into)
    return ConePresheaf(VPresheaf(C, {a: e.obj for a, e in ends.items()}, ev), ends)
