"""Deciders for representability and weighted limits, and the tensor machinery.

Every decider answers the same question by a different route.  Routes that
are only valid under a hypothesis raise :class:`HypothesisNotMet` instead of
returning a verdict outside their scope; :func:`decide` folds that into the
tri-state :class:`Outcome`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .cosmos import CosmosError, Map, MediatorError, ValidationError, size
from .enriched import (VCategory, VFunctor, VNat, VPresheaf, covariant_hom, functor_hom,
                       identity_nat, is_representable_by, nat_to_end_point, opposite,
                       require_valid, validate_vfunctor, validate_vnat, weighted_cone_data)
from .grothendieck import Certified, GrothResult, groth, groth_cov, inverse_fib
from .internal import (ColimitWitness, FibrationPacket, InternalCategory, InternalElement,
                       InternalFunctor, comma_data, compose_functors, compute_internal_colimit,
                       const_cocone_category, cst, element, hom_cst_data, internalize,
                       internalize_functor, is_discrete_fibration, is_internal_initial,
                       is_internal_limit, is_internal_terminal)


class HypothesisNotMet(CosmosError):
    """A theorem-scoped route was asked outside its hypotheses."""


class Outcome(str, Enum):
    TRUE = "true"
    FALSE = "false"
    NOT_APPLICABLE = "not-applicable"


def decide(route, *args, **kwargs) -> Outcome:
    try:
        return Outcome.TRUE if route(*args, **kwargs) else Outcome.FALSE
    except HypothesisNotMet:
        return Outcome.NOT_APPLICABLE


def _probes(V, probes):
    return tuple(V.generators().probes if probes is None else probes)


# ---------------------------------------------------------------------------
# terminal objects seen through Und and its shifts


def v_terminal_in_underlying(A: InternalCategory, T: Map) -> bool:
    """Is the element ``T`` V-terminal in ``Und A``?

    Only the hom-objects into ``T`` are formed, which is all the definition
    looks at.
    """
    V = A.cosmos
    st = V.pair(A.s, A.t)
    for a in V.global_elements(A.A0):
        if not V.is_terminal_object(V.pullback(st, V.pair(a, T)).obj):
            return False
    return True


def shifted_element(A: InternalCategory, T: Map, X):
    """``T`` seen in ``[[cst X, A]]`` through the diagonal."""
    V = A.cosmos
    H = hom_cst_data(X, A)
    return H, V.name(V.const(X, T))


def shifted_terminal(A: InternalCategory, T: Map, X) -> bool:
    H, p = shifted_element(A, T, X)
    return v_terminal_in_underlying(H.cat, p)


# ---------------------------------------------------------------------------
# V-tensors


@dataclass(frozen=True)
class TensorWitness:
    base: object
    probe: object
    candidate: object
    unit: Map           # X -> C(base, candidate)
    verdict: bool


def tensor_comparison(C: VCategory, c, X, candidate, gamma: Map, a) -> Map:
    """``C(c (x) X, a) -> [X, C(c, a)]``: precompose with the unit."""
    V = C.cosmos
    h = C(candidate, a)
    P = V.product(X, h)
    body = V.compose(V.pair(V.compose(P.p0, gamma), P.p1), C.comp[(c, candidate, a)])
    return V.curry(body, X, h)


def is_v_tensor(C: VCategory, c, X, candidate, gamma: Map) -> bool:
    V = C.cosmos
    if gamma.dom != X or gamma.cod != C(c, candidate):
        raise ValidationError("the unit must be a map X -> C(c, candidate)")
    return all(V.is_iso(tensor_comparison(C, c, X, candidate, gamma, a)) for a in C.objects)


def _sizes_match(C: VCategory, c, X, candidate) -> bool:
    V = C.cosmos
    return all(size(C(candidate, a)) == size(V.exponential(X, C(c, a)).obj)
               for a in C.objects)


def find_v_tensor(C: VCategory, c, X) -> TensorWitness | None:
    """Exhaustive search over candidate objects and units."""
    V = C.cosmos
    for cand in C.objects:
        if not _sizes_match(C, c, X, cand):
            continue
        for gamma in V.hom_set(X, C(c, cand)):
            if is_v_tensor(C, c, X, cand, gamma):
                return TensorWitness(c, X, cand, gamma, True)
    return None


def has_v_tensors(C: VCategory, X) -> dict | None:
    """A witness for every object, or ``None`` if some tensor is missing."""
    table = {}
    for c in C.objects:
        w = find_v_tensor(C, c, X)
        if w is None:
            return None
        table[c] = w
    return table


def preservation_map(F: VPresheaf, w: TensorWitness) -> Map:
    """``F(c (x) X) -> [X, Fc]``, the transpose of ``ev^F (gamma x id)``.

    A map ``phi`` making the preservation triangle commute is a section of
    this map, so one exists as an isomorphism exactly when this map is
    invertible, and then it is the inverse.
    """
    C = F.base
    V = C.cosmos
    X, c, cand = w.probe, w.base, w.candidate
    Y = F.on[cand]
    P = V.product(X, Y)
    body = V.compose(V.pair(V.compose(P.p0, w.unit), P.p1), F.ev[(c, cand)])
    return V.curry(body, X, Y)


def presheaf_preserves_tensors(F: VPresheaf, X, table: dict | None = None) -> bool:
    V = F.base.cosmos
    table = table if table is not None else has_v_tensors(F.base, X)
    if table is None:
        raise HypothesisNotMet("the base has no V-tensors by this probe")
    return all(V.is_iso(preservation_map(F, w)) for w in table.values())


# ---------------------------------------------------------------------------
# internal tensors


@dataclass(frozen=True)
class TensorSearch:
    holds: bool
    witnesses: dict         # diagram map G -> ColimitWitness or None

    def __bool__(self):
        return self.holds


def cst_diagram(A: InternalCategory, X, G: Map) -> InternalFunctor:
    """The internal functor ``cst X -> A`` transposing ``G: X -> A0``."""
    V = A.cosmos
    return InternalFunctor(cst(X, V), A, G, V.compose(G, A.i))


def is_const_colimit(G: InternalFunctor, apex: Map, kappa: Map) -> bool:
    """Internal colimit test for a diagram out of ``cst X``, via the closed-form hom."""
    V = G.target.cosmos
    c, _ = const_cocone_category(G.source.A0, G)
    try:
        p = c.point(apex, V.name(kappa))
    except MediatorError:
        return False
    return is_internal_initial(c.cat, InternalElement(c.cat, p))


def _colimit(A, X, G):
    return compute_internal_colimit(cst_diagram(A, X, G))


def has_internal_tensors(A: InternalCategory, X) -> TensorSearch:
    V = A.cosmos
    found = {G: _colimit(A, X, G) for G in V.hom_set(X, A.A0)}
    return TensorSearch(all(w is not None for w in found.values()), found)


def has_c_internal_tensors(packet: FibrationPacket, X) -> TensorSearch:
    """Colimits of the diagrams that land in a single fiber."""
    if not packet.certificate or packet.fibers is None:
        raise HypothesisNotMet("needs a discrete fibration over some Int C")
    A = packet.P.source
    V = A.cosmos
    found = {}
    for label in packet.P.target.tagging.base.objects:
        obj, leg = packet.fibers[label]
        for G0 in V.hom_set(X, obj):
            G = V.compose(G0, leg)
            if G not in found:
                found[G] = _colimit(A, X, G)
    return TensorSearch(all(w is not None for w in found.values()), found)


def groth_tensor_witness(F: VPresheaf, c, X, G: Map, g: GrothResult | None = None,
                         table: dict | None = None) -> Certified:
    """The cocone ``(phi G, gamma x phi G)`` under ``G: cst X -> int F``.

    The certificate records whether it passes the internal colimit test.
    """
    C = F.base
    V = C.cosmos
    if G.dom != X or G.cod != F.on[c]:
        raise ValidationError("G must be a map X -> Fc")
    w = (table or {}).get(c) or find_v_tensor(C, c, X)
    if w is None:
        raise HypothesisNotMet("no V-tensor of this object by the probe")
    psi = preservation_map(F, w)
    if not V.is_iso(psi):
        raise HypothesisNotMet("the presheaf does not preserve this tensor")
    g = g or groth(C, F)
    phiG = V.compose(V.name(G), V.inverse(psi))
    apex = V.compose(phiG, g.tagging.objects.injection(w.candidate))
    kappa = V.compose(V.pair(w.unit, V.const(X, phiG)),
                      g.tagging.arrows.injection((c, w.candidate)))
    diagram = cst_diagram(g.total, X, V.compose(G, g.tagging.objects.injection(c)))
    return Certified(ColimitWitness(apex, kappa), is_const_colimit(diagram, apex, kappa))


# ---------------------------------------------------------------------------
# representability


def _global(F: VPresheaf, c, x: Map):
    V = F.base.cosmos
    if c not in F.base.objects:
        raise ValidationError(f"unknown object {c!r}")
    if x.dom != V.terminal() or x.cod != F.on[c]:
        raise ValidationError("x is not a global element of Fc")


def elements_point(g: GrothResult, c, x: Map) -> Map:
    V = g.total.cosmos
    return V.point(g.total.A0, (c, V.point_label(x)))


def is_representable_direct(F: VPresheaf, c, x: Map) -> bool:
    _global(F, c, x)
    return is_representable_by(F, c, x)


def is_representable_via_elements(F: VPresheaf, c, x: Map, g: GrothResult | None = None) -> bool:
    _global(F, c, x)
    g = g or groth(F.base, F)
    return is_internal_terminal(g.total, InternalElement(g.total, elements_point(g, c, x)))


def is_representable_via_shifted(F: VPresheaf, c, x: Map, probes=None,
                                 g: GrothResult | None = None) -> bool:
    _global(F, c, x)
    g = g or groth(F.base, F)
    T = elements_point(g, c, x)
    return all(shifted_terminal(g.total, T, X) for X in _probes(F.base.cosmos, probes))


def require_tensor_hypotheses(F: VPresheaf, probes=None) -> dict:
    """Tensor tables per probe; raises when the base lacks them or ``F`` breaks them."""
    C = F.base
    tables = {}
    for X in _probes(C.cosmos, probes):
        table = has_v_tensors(C, X)
        if table is None:
            raise HypothesisNotMet("the base lacks V-tensors by a probe")
        if not presheaf_preserves_tensors(F, X, table):
            raise HypothesisNotMet("the presheaf does not preserve V-tensors by a probe")
        tables[X] = table
    return tables


def is_representable_via_und_tensors(F: VPresheaf, c, x: Map, probes=None,
                                     g: GrothResult | None = None) -> bool:
    _global(F, c, x)
    require_tensor_hypotheses(F, probes)
    g = g or groth(F.base, F)
    return v_terminal_in_underlying(g.total, elements_point(g, c, x))


REPRESENTABILITY_ROUTES = {
    "direct": is_representable_direct,
    "elements": is_representable_via_elements,
    "shifted": is_representable_via_shifted,
    "und-tensors": is_representable_via_und_tensors,
}


def representability_report(F: VPresheaf, c, x: Map, methods=None) -> dict:
    """Outcome per route, sharing one category of elements."""
    g = groth(F.base, F)
    out = {}
    for name in methods or REPRESENTABILITY_ROUTES:
        route = REPRESENTABILITY_ROUTES[name]
        if name == "direct":
            out[name] = decide(route, F, c, x)
        else:
            out[name] = decide(route, F, c, x, g=g)
    return out


# ---------------------------------------------------------------------------
# weighted limits


@dataclass(frozen=True, eq=False)
class WeightedLimitProblem:
    """A candidate ``(L, lambda)`` for the ``W``-weighted limit of ``G``.

    ``lam[i]`` is the component ``Wi -> C(L, Gi)`` of a cone in covariant
    evaluation form.
    """

    C: VCategory
    G: VFunctor
    W: VFunctor
    L: object
    lam: dict
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "lam", dict(self.lam))
        if not self.W.into_v or self.G.into_v:
            raise ValidationError("need a weight into V and a diagram into a V-category")
        if self.W.source != self.G.source:
            raise ValidationError("weight and diagram have different shapes")
        if self.G.target != self.C:
            raise ValidationError("the diagram does not land in C")
        if self.L not in self.C.objects:
            raise ValidationError(f"unknown object {self.L!r}")
        require_valid(validate_vfunctor(self.W), "weight")
        require_valid(validate_vfunctor(self.G), "diagram")
        require_valid(validate_vnat(self.cone()), "cone")

    @property
    def shape(self) -> VCategory:
        return self.W.source

    def cone(self) -> VNat:
        return VNat(self.W, covariant_hom(self.C, self.L, self.G), self.lam)

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def cones(self):
        return self._get("cones", lambda: weighted_cone_data(self.W, self.G))

    @property
    def elements(self) -> GrothResult:
        return self._get("groth", lambda: groth(self.C, self.cones.presheaf))

    @property
    def cone_point(self) -> Map:
        """``lambda`` as a global element of ``V^I(W, C(L, G-))``."""
        return self._get("point", lambda: nat_to_end_point(self.cone(), self.cones.ends[self.L]))

    @property
    def candidate(self) -> Map:
        """``(L, lambda)`` as a point of the objects of the cone category."""
        return self._get("candidate", lambda: elements_point(self.elements, self.L,
                                                             self.cone_point))


def weighted_cone_internal(W: VFunctor, G: VFunctor):
    """The internal category of weighted cones and its projection to ``Int C``."""
    g = groth(G.target, weighted_cone_data(W, G).presheaf)
    return g.total, g.projection


def is_weighted_limit_direct(problem: WeightedLimitProblem) -> bool:
    return is_representable_by(problem.cones.presheaf, problem.L, problem.cone_point)


def is_weighted_limit_elements(problem: WeightedLimitProblem) -> bool:
    A = problem.elements.total
    return is_internal_terminal(A, InternalElement(A, problem.candidate))


def is_weighted_limit_shifted(problem: WeightedLimitProblem, probes=None) -> bool:
    A = problem.elements.total
    return all(shifted_terminal(A, problem.candidate, X)
               for X in _probes(problem.C.cosmos, probes))


def is_weighted_limit_und_tensors(problem: WeightedLimitProblem, probes=None) -> bool:
    for X in _probes(problem.C.cosmos, probes):
        if has_v_tensors(problem.C, X) is None:
            raise HypothesisNotMet("the base lacks V-tensors by a probe")
    return v_terminal_in_underlying(problem.elements.total, problem.candidate)


@dataclass(frozen=True, eq=False)
class ConeTranslation:
    diagram: InternalFunctor    # Int G . pi_W
    apex: Map                   # * -> (Int C)_0
    kappa: Map                  # (int W)_0 -> (Int C)_1
    valid: bool


def cone_translate(problem: WeightedLimitProblem) -> ConeTranslation:
    """The weighted cone as a cone over ``Int G . pi_W``: ``kappa`` is ``lambda_i`` on ``Wi``."""
    C, I = problem.C, problem.shape
    V = C.cosmos
    IntI, IntC = internalize(I), internalize(C)
    elems = groth_cov(I, problem.W, base=IntI)
    D = compose_functors(elems.projection, internalize_functor(problem.G, IntI, IntC))
    arrows = IntC.tagging.arrows
    apex = V.point(IntC.A0, (problem.L, ()))
    kappa = V.copair(elems.tagging.objects,
                     {i: V.compose(problem.lam[i], arrows.injection((problem.L, problem.G.on[i])))
                      for i in I.objects}, IntC.A1)
    X = elems.total.A0
    valid = (V.map_equal(V.compose(kappa, IntC.s), V.const(X, apex))
             and V.map_equal(V.compose(kappa, IntC.t), D.H0))
    return ConeTranslation(D, apex, kappa, valid)


def is_weighted_limit_conical(problem: WeightedLimitProblem) -> bool:
    tr = cone_translate(problem)
    if not tr.valid:
        raise ValidationError("the translated cone has the wrong boundary")
    return is_internal_limit(tr.diagram, tr.apex, tr.kappa)


WEIGHTED_ROUTES = {
    "direct": is_weighted_limit_direct,
    "elements": is_weighted_limit_elements,
    "shifted": is_weighted_limit_shifted,
    "conical": is_weighted_limit_conical,
    "und-tensors": is_weighted_limit_und_tensors,
}


def weighted_limit_report(problem: WeightedLimitProblem, methods=None) -> dict:
    return {name: decide(WEIGHTED_ROUTES[name], problem) for name in methods or WEIGHTED_ROUTES}


# ---------------------------------------------------------------------------
# the comma cross-check


def _end_composition(V, Exy, Eyz, Exz):
    """Pointwise composite ``V^I(x, y) x V^I(y, z) -> V^I(x, z)`` of ends."""
    P = V.product(Exy.obj, Eyz.obj)
    legs = []
    for n in range(len(Exy.index)):
        e1, e2 = Exy.exponentials[n], Eyz.exponentials[n]
        X = e1.base
        Q = V.product(X, P.obj)
        th = V.compose(Q.p1, P.p0, Exy.incl, Exy.product.projections[n])
        ph = V.compose(Q.p1, P.p1, Eyz.incl, Eyz.product.projections[n])
        mid = V.compose(V.pair(Q.p0, th), e1.eval)
        legs.append(V.curry(V.compose(V.pair(mid, ph), e2.eval), X, P.obj))
    into = Exz.product.pair(legs, P.obj) if not legs else Exz.product.pair(legs)
    return Exz.induce(into)


def cone_category_vcat(W: VFunctor, G: VFunctor) -> VCategory:
    """The full sub-V-category of ``V^I`` on the ``C(A, G-)`` and ``W``."""
    C = G.target
    V = C.cosmos
    funcs = {("rep", a): covariant_hom(C, a, G) for a in C.objects}
    funcs[("weight",)] = W
    labels = tuple(funcs)
    ends = {(x, y): functor_hom(funcs[x], funcs[y]) for x in labels for y in labels}
    comp = {(x, y, z): _end_composition(V, ends[(x, y)], ends[(y, z)], ends[(x, z)])
            for x in labels for y in labels for z in labels}
    ident = {x: nat_to_end_point(identity_nat(funcs[x]), ends[(x, x)]) for x in labels}
    return VCategory(V, labels, {k: e.obj for k, e in ends.items()}, comp, ident), ends


def _restricted_hom_functor(C: VCategory, G: VFunctor, D: VCategory, ends) -> VFunctor:
    """``A |-> C(A, G-)`` as a V-functor ``C -> D^op``."""
    V = C.cosmos
    I = G.source
    Dop = opposite(D)
    homs = {}
    for a in C.objects:
        for b in C.objects:
            E = ends[(("rep", b), ("rep", a))]
            h = C(a, b)
            legs = []
            for i in I.objects:
                X = C(b, G.on[i])
                P = V.product(X, h)
                legs.append(V.curry(V.compose(V.pair(P.p1, P.p0), C.comp[(a, b, G.on[i])]),
                                    X, h))
            into = E.product.pair(legs, h) if not legs else E.product.pair(legs)
            homs[(a, b)] = E.induce(into)
    return VFunctor(C, Dop, {a: ("rep", a) for a in C.objects}, homs=homs)


def cone_comma_cross_check(W: VFunctor, G: VFunctor) -> Certified:
    """Compare the category of weighted cones with the comma built inside ``V^I``.

    The comma is formed from the finite full sub-V-category on the functors
    ``C(A, G-)`` and ``W``.  Both sides are discrete fibrations over ``Int C``,
    so the certificate is an invertible transformation between their fibers.
    """
    C = G.target
    V = C.cosmos
    data = weighted_cone_data(W, G)
    D, ends = cone_category_vcat(W, G)
    K = _restricted_hom_functor(C, G, D, ends)
    IntC = internalize(C)
    IntD = internalize(K.target)
    cm = comma_data(internalize_functor(K, IntC, IntD), element(IntD, (("weight",), ())))
    packet = is_discrete_fibration(cm.projection)
    if not packet.certificate:
        return Certified(None, False, ("the comma projection is not a discrete fibration",))
    Q = inverse_fib(packet)
    comps = {}
    for a in C.objects:
        E = data.presheaf.on[a]
        into = cm.data.level0.induce(V.const(E, V.point(IntC.A0, (a, ()))),
                                     IntD.tagging.arrows.injection((("rep", a), ("weight",))))
        try:
            comps[a] = V.factor_through(into, packet.fibers[a][1])
        except MediatorError:
            return Certified(None, False, (f"cone at {a!r} misses its fiber",))
    nat = VNat(data.presheaf, Q, comps)
    problems = tuple(validate_vnat(nat))
    ok = not problems and all(V.is_iso(f) for f in comps.values())
    return Certified(nat, ok, problems)


# ---------------------------------------------------------------------------
# internal versus enriched terminal objects


@dataclass(frozen=True)
class BridgeReport:
    hypotheses: dict        # probe -> do the (C-)internal tensors exist
    internal: bool
    und: bool
    shifted: dict           # probe -> verdict
    violation: bool         # a divergence that a theorem rules out
    expected_divergence: bool

    @property
    def hypotheses_hold(self) -> bool:
        return all(self.hypotheses.values())


def tensor_bridge_terminal(target, T, probes=None) -> BridgeReport:
    """Compare internal terminality of ``T`` with its enriched shadows.

    ``target`` is an internal category, or a discrete fibration packet over
    some ``Int C`` in which case the fiberwise tensor hypothesis is used.
    Shifted verdicts must always agree with the internal one; the verdict in
    ``Und`` only has to agree when the tensor hypothesis holds.
    """
    packet = target if isinstance(target, FibrationPacket) else None
    A = packet.P.source if packet is not None else target
    V = A.cosmos
    if isinstance(T, InternalElement):
        T = T.point
    probes = _probes(V, probes)
    hyp = {}
    for X in probes:
        if packet is not None:
            hyp[X] = has_c_internal_tensors(packet, X).holds
        else:
            hyp[X] = has_internal_tensors(A, X).holds
    internal = is_internal_terminal(A, InternalElement(A, T))
    und = v_terminal_in_underlying(A, T)
    shifted = {X: shifted_terminal(A, T, X) for X in probes}
    holds = all(hyp.values())
    violation = any(v != internal for v in shifted.values()) or (holds and und != internal)
    expected = (not holds) and und != internal
    return BridgeReport(hyp, internal, und, shifted, violation, expected)

