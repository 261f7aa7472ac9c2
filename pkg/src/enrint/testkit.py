"""Seeded instance generators and brute-force oracles for the property suites.

Generators only combine recipes that preserve validity, so every output
passes its validator.  Oracles count solutions of the defining equations cell
by cell and never touch the end, internal-hom or weighted-cone constructions
they are compared with.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Mapping

from .cosmos import (FINSET, Cosmos, FinCat, FinSet, Map, ValidationError, cells,
                     cosmos_for, from_empty, size)
from .enriched import (VCategory, VFunctor, VPresheaf, arrow_vcat, constant_presheaf,
                       covariant_hom, discrete_vcat, end_point_to_nat, functor_hom,
                       identity_vfunctor, poset_vcat, representable, unit_vcat,
                       weighted_cone_data)
from .grothendieck import groth, precompose_presheaf
from .internal import (InternalCategory, InternalFunctor, assemble, cst, internal_hom,
                       internalize, is_discrete_fibration, product_internal)

MAX_OBJECTS = 4
MAX_CELLS = 6

VCAT_RECIPES = ("poset", "monoid", "parallel", "finset", "product", "arrow2", "ordered")
PRESHEAF_RECIPES = ("constant", "representable", "product", "restriction")
INTERNAL_RECIPES = ("int", "groth", "cst", "product")

DEFAULT_WEIGHTS = {
    "poset": 4, "monoid": 2, "parallel": 2, "finset": 1, "product": 2, "arrow2": 1,
    "ordered": 1, "constant": 2, "representable": 3, "restriction": 2,
    "int": 2, "groth": 3, "cst": 1,
}


class OracleRefusal(Exception):
    """The enumeration would exceed its cap; nothing partial is returned."""


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    cosmos: str = "finset"
    max_objects: int = MAX_OBJECTS
    max_cells: int = MAX_CELLS
    weights: Mapping = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))

    def __post_init__(self):
        cosmos_for(self.cosmos)
        if not 1 <= self.max_objects <= MAX_OBJECTS:
            raise ValidationError(f"max_objects must lie in 1..{MAX_OBJECTS}")
        if not 1 <= self.max_cells <= MAX_CELLS:
            raise ValidationError(f"max_cells must lie in 1..{MAX_CELLS}")
        if any(w < 0 for w in self.weights.values()):
            raise ValidationError("recipe weights must be non-negative")

    @property
    def V(self) -> Cosmos:
        return cosmos_for(self.cosmos)

    def rng(self, purpose: str) -> random.Random:
        return random.Random(f"{self.cosmos}:{self.seed}:{purpose}")

    def pick(self, rng: random.Random, recipes) -> str:
        recipes = [r for r in recipes if self.weights.get(r, 1) > 0]
        if not recipes:
            raise ValidationError("every applicable recipe has weight zero")
        return rng.choices(recipes, [self.weights.get(r, 1) for r in recipes])[0]


# ---------------------------------------------------------------------------
# maps into thin or discrete codomains


def thin_map(V: Cosmos, dom, cod, on_cells) -> Map:
    """The map with the given action on elements or objects.

    For fincat the codomain must be thin (at most one morphism between two
    objects), which pins down the action on morphisms.
    """
    if V is FINSET:
        return V.make_map(dom, cod, {x: on_cells(x) for x in dom.elements})
    ob = {x: on_cells(x) for x in dom.objects}
    mor = {}
    for m in dom.morphisms:
        hs = cod.hom(ob[dom.src[m]], ob[dom.tgt[m]])
        if len(hs) != 1:
            raise ValidationError("codomain is not thin along the image")
        mor[m] = hs[0]
    return V.make_map(dom, cod, ob, mor)


def _discrete(V: Cosmos, labels):
    return V.obj(labels) if V is FINSET else V.discrete(labels)


def _structure(V: Cosmos, dom, cod) -> Map:
    if size(dom) == 0:
        return from_empty(dom, cod)
    return V.const(dom, V.global_elements(cod)[0])


# ---------------------------------------------------------------------------
# ordinary finite categories and their discrete enrichment


@dataclass(frozen=True)
class OrdinaryCategory:
    objects: tuple
    homs: dict      # (a, b) -> tuple of arrow names
    comp: dict      # (f, g) -> f then g
    ident: dict


def enrich(V: Cosmos, K: OrdinaryCategory) -> VCategory:
    """``K`` with discrete hom-objects."""
    obs = K.objects
    hom = {(a, b): _discrete(V, K.homs[(a, b)]) for a in obs for b in obs}
    comp = {}
    for a in obs:
        for b in obs:
            for c in obs:
                P = V.product(hom[(a, b)], hom[(b, c)]).obj
                comp[(a, b, c)] = thin_map(V, P, hom[(a, c)], lambda fg: K.comp[fg])
    ident = {a: V.point(hom[(a, a)], K.ident[a]) for a in obs}
    return VCategory(V, obs, hom, comp, ident)


def _endo_monoid(rng: random.Random, cap: int) -> OrdinaryCategory:
    n = rng.choice((2, 3))
    unit = tuple(range(n))
    gens = [tuple(rng.randrange(n) for _ in range(n)) for _ in range(rng.randint(1, 2))]
    elems = [unit]
    frontier = [unit]
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                h = tuple(g[e[k]] for k in range(n))
                if h not in elems:
                    elems.append(h)
                    nxt.append(h)
        frontier = nxt
    elems = elems[:1] + sorted(elems[1:])
    if len(elems) > cap:
        elems = [unit]
    closed = all(tuple(g[f[k]] for k in range(n)) in elems for f in elems for g in elems)
    if not closed:
        elems = [unit]
    names = {e: "e" if e == unit else "m" + "".join(map(str, e)) for e in elems}
    comp = {(names[f], names[g]): names[tuple(g[f[k]] for k in range(n))]
            for f in elems for g in elems}
    return OrdinaryCategory(("o",), {("o", "o"): tuple(names[e] for e in elems)}, comp,
                            {"o": "e"})


def _parallel(rng: random.Random, cap: int) -> OrdinaryCategory:
    k = rng.randint(0, min(3, cap))
    arrows = tuple(f"u{n}" for n in range(k))
    homs = {("a", "a"): ("ia",), ("b", "b"): ("ib",), ("a", "b"): arrows, ("b", "a"): ()}
    comp = {("ia", "ia"): "ia", ("ib", "ib"): "ib"}
    for f in arrows:
        comp[("ia", f)] = f
        comp[(f, "ib")] = f
    return OrdinaryCategory(("a", "b"), homs, comp, {"a": "ia", "b": "ib"})


def _finset_full(rng: random.Random, max_objects: int, cap: int) -> OrdinaryCategory:
    """A full subcategory of finite sets on sets of sizes 0, 1, 2."""
    sizes = [0, 1, 2]
    rng.shuffle(sizes)
    sizes = sorted(sizes[:rng.randint(1, min(3, max_objects))])
    if cap < 4 and 2 in sizes:
        sizes.remove(2)
        sizes = sizes or [1]
    obs = tuple(f"s{n}" for n in sizes)

    def name(m, n, f):
        return f"h{m}{n}_" + "".join(map(str, f))

    homs, fns = {}, {}
    for m in sizes:
        for n in sizes:
            fs = list(itertools.product(range(n), repeat=m))
            homs[(f"s{m}", f"s{n}")] = tuple(name(m, n, f) for f in fs)
            for f in fs:
                fns[name(m, n, f)] = (m, n, f)
    comp = {}
    for a in sizes:
        for b in sizes:
            for c in sizes:
                for f in itertools.product(range(b), repeat=a):
                    for g in itertools.product(range(c), repeat=b):
                        comp[(name(a, b, f), name(b, c, g))] = name(a, c, tuple(g[x] for x in f))
    ident = {f"s{n}": name(n, n, tuple(range(n))) for n in sizes}
    return OrdinaryCategory(obs, homs, comp, ident)


def _random_poset(rng: random.Random, n: int):
    labels = tuple("pqrs"[:n])
    rel = {(a, a) for a in labels}
    for x in range(n):
        for y in range(x + 1, n):
            if rng.random() < 0.5:
                rel.add((labels[x], labels[y]))
    changed = True
    while changed:
        changed = False
        for (a, b) in list(rel):
            for (c, d) in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return labels, rel


def _arrow2(V: Cosmos) -> VCategory:
    """Objects ``0, 1`` with ``hom(0, 1)`` the walking arrow: a locally thin 2-category."""
    T, E, A = V.terminal(), V.initial(), V.arrow()
    hom = {("0", "0"): T, ("1", "1"): T, ("0", "1"): A, ("1", "0"): E}
    obs = ("0", "1")
    comp = {}
    for a in obs:
        for b in obs:
            for c in obs:
                P = V.product(hom[(a, b)], hom[(b, c)])
                if (a, b, c) == ("0", "0", "1"):
                    comp[(a, b, c)] = P.p1
                elif (a, b, c) == ("0", "1", "1"):
                    comp[(a, b, c)] = P.p0
                else:
                    comp[(a, b, c)] = _structure(V, P.obj, hom[(a, c)])
    return VCategory(V, obs, hom, comp, {a: V.identity(T) for a in obs})


def _ordered_monoid(V: Cosmos, rng: random.Random) -> VCategory:
    """One object whose hom is the chain ``0 < 1`` under max (unit 0) or min (unit 1)."""
    A = V.arrow()
    use_max = rng.random() < 0.5
    op = max if use_max else min
    P = V.product(A, A).obj
    comp = thin_map(V, P, A, lambda xy: op(xy))
    return VCategory(V, ("o",), {("o", "o"): A}, {("o", "o", "o"): comp},
                     {"o": V.point(A, "0" if use_max else "1")})


def product_vcat(C: VCategory, D: VCategory) -> VCategory:
    """Objects are labels ``"a|b"``; homs are products of homs."""
    V = C.cosmos
    pairs = [(a, b) for a in C.objects for b in D.objects]
    lab = {p: f"{p[0]}|{p[1]}" for p in pairs}
    hom = {(lab[x], lab[y]): V.product(C(x[0], y[0]), D(x[1], y[1])).obj
           for x in pairs for y in pairs}
    comp = {}
    for x in pairs:
        for y in pairs:
            for z in pairs:
                H1 = V.product(C(x[0], y[0]), D(x[1], y[1]))
                H2 = V.product(C(y[0], z[0]), D(y[1], z[1]))
                P = V.product(H1.obj, H2.obj)
                left = V.compose(V.pair(V.compose(P.p0, H1.p0), V.compose(P.p1, H2.p0)),
                                 C.comp[(x[0], y[0], z[0])])
                right = V.compose(V.pair(V.compose(P.p0, H1.p1), V.compose(P.p1, H2.p1)),
                                  D.comp[(x[1], y[1], z[1])])
                comp[(lab[x], lab[y], lab[z])] = V.pair(left, right)
    ident = {lab[x]: V.pair(C.ident[x[0]], D.ident[x[1]]) for x in pairs}
    return VCategory(V, tuple(lab[p] for p in pairs), hom, comp, ident)


def _within_caps(cfg: GenConfig, C: VCategory) -> bool:
    return (len(C.objects) <= cfg.max_objects
            and all(size(h) <= cfg.max_cells for h in C.hom.values()))


def _vcat_recipe(cfg: GenConfig, rng: random.Random, recipe: str, depth: int) -> VCategory:
    V = cfg.V
    if recipe == "poset":
        labels, rel = _random_poset(rng, rng.randint(1, min(3, cfg.max_objects)))
        return poset_vcat(V, labels, lambda a, b: (a, b) in rel)
    if recipe == "monoid":
        return enrich(V, _endo_monoid(rng, cfg.max_cells))
    if recipe == "parallel":
        return enrich(V, _parallel(rng, cfg.max_cells))
    if recipe == "finset":
        return enrich(V, _finset_full(rng, cfg.max_objects, cfg.max_cells))
    if recipe == "arrow2":
        return _arrow2(V)
    if recipe == "ordered":
        return _ordered_monoid(V, rng)
    if recipe == "product" and depth == 0:
        small = GenConfig(cfg.seed, cfg.cosmos, max(1, cfg.max_objects // 2), cfg.max_cells,
                          cfg.weights)
        C = _gen_vcat(small, rng, depth + 1)
        D = _gen_vcat(small, rng, depth + 1)
        P = product_vcat(C, D)
        if _within_caps(cfg, P):
            return P
        return C
    return unit_vcat(V)


def _vcat_recipes(cfg: GenConfig, depth: int):
    out = ["poset", "monoid", "parallel", "finset"]
    if depth == 0:
        out.append("product")
    if cfg.cosmos == "fincat":
        out += ["arrow2", "ordered"]
    return out


def _gen_vcat(cfg: GenConfig, rng: random.Random, depth: int) -> VCategory:
    for _ in range(8):
        C = _vcat_recipe(cfg, rng, cfg.pick(rng, _vcat_recipes(cfg, depth)), depth)
        if _within_caps(cfg, C):
            return C
    return unit_vcat(cfg.V)


def gen_vcategory(cfg: GenConfig) -> VCategory:
    return _gen_vcat(cfg, cfg.rng("vcategory"), 0)


# ---------------------------------------------------------------------------
# presheaves


def _walking_idempotent(V: Cosmos):
    return V.obj(["*"], [("id", "*", "*"), ("v", "*", "*")], {"*": "id"},
                 {("id", "id"): "id", ("id", "v"): "v", ("v", "id"): "v", ("v", "v"): "v"})


def small_object(V: Cosmos, rng: random.Random, max_cells: int = MAX_CELLS):
    """A random object of V with at most ``max_cells`` cells."""
    if V is FINSET:
        return V.obj([f"x{n}" for n in range(rng.randint(0, min(3, max_cells)))])
    pool = [V.initial(), V.discrete(["x0"]), V.discrete(["x0", "x1"]), V.arrow(),
            _walking_idempotent(V)]
    pool = [X for X in pool if size(X) <= max_cells]
    return rng.choice(pool)


def product_presheaf(F: VPresheaf, G: VPresheaf) -> VPresheaf:
    C = F.base
    V = C.cosmos
    on = {a: V.product(F.on[a], G.on[a]).obj for a in C.objects}
    ev = {}
    for a in C.objects:
        for b in C.objects:
            Q = V.product(F.on[b], G.on[b])
            S = V.product(C(a, b), Q.obj)
            left = V.compose(V.pair(S.p0, V.compose(S.p1, Q.p0)), F.ev[(a, b)])
            right = V.compose(V.pair(S.p0, V.compose(S.p1, Q.p1)), G.ev[(a, b)])
            ev[(a, b)] = V.pair(left, right)
    return VPresheaf(C, on, ev)


def constant_vfunctor(C: VCategory, D: VCategory, d) -> VFunctor:
    V = C.cosmos
    return VFunctor(C, D, {a: d for a in C.objects},
                    homs={(a, b): V.compose(V.bang(C(a, b)), D.ident[d])
                          for a in C.objects for b in C.objects})


def _is_thin(C: VCategory) -> bool:
    V = C.cosmos
    return all(size(h) == 0 or V.is_terminal_object(h) for h in C.hom.values())


def monotone_vfunctor(C: VCategory, D: VCategory, on: Mapping) -> VFunctor | None:
    """The V-functor between thin V-categories with object map ``on``, if monotone."""
    V = C.cosmos
    homs = {}
    for a in C.objects:
        for b in C.objects:
            h, k = C(a, b), D(on[a], on[b])
            if size(h) and not size(k):
                return None
            homs[(a, b)] = _structure(V, h, k)
    return VFunctor(C, D, dict(on), homs=homs)


def gen_vfunctor(cfg: GenConfig, C: VCategory, D: VCategory, rng=None) -> VFunctor:
    """An identity, constant or (between thin categories) monotone V-functor ``C -> D``."""
    rng = rng or cfg.rng("vfunctor")
    options = ["constant"]
    if C == D:
        options.append("identity")
    if _is_thin(C) and _is_thin(D):
        options.append("monotone")
    kind = rng.choice(options)
    if kind == "identity":
        return identity_vfunctor(C)
    if kind == "monotone":
        for _ in range(6):
            F = monotone_vfunctor(C, D, {a: rng.choice(D.objects) for a in C.objects})
            if F is not None:
                return F
    return constant_vfunctor(C, D, rng.choice(D.objects))


def _within_cell_cap(cfg: GenConfig, F: VPresheaf) -> bool:
    return all(size(X) <= cfg.max_cells for X in F.on.values())


def _presheaf_recipe(cfg: GenConfig, rng, C: VCategory, recipe: str, depth: int):
    V = C.cosmos
    if recipe == "constant":
        return constant_presheaf(C, small_object(V, rng, cfg.max_cells))
    if recipe == "representable":
        return representable(C, rng.choice(C.objects))
    if recipe == "product" and depth == 0:
        F = _gen_presheaf(cfg, rng, C, depth + 1)
        G = _gen_presheaf(cfg, rng, C, depth + 1)
        P = product_presheaf(F, G)
        return P if _within_cell_cap(cfg, P) else F
    if recipe == "restriction" and depth == 0:
        K = gen_vfunctor(cfg, C, C, rng)
        return precompose_presheaf(K, _gen_presheaf(cfg, rng, C, depth + 1))
    return representable(C, C.objects[0])


def _gen_presheaf(cfg: GenConfig, rng, C: VCategory, depth: int) -> VPresheaf:
    recipes = ["constant", "representable"] + (["product", "restriction"] if depth == 0 else [])
    for _ in range(8):
        F = _presheaf_recipe(cfg, rng, C, cfg.pick(rng, recipes), depth)
        if _within_cell_cap(cfg, F):
            return F
    return constant_presheaf(C, C.cosmos.terminal())


def gen_presheaf(cfg: GenConfig, C: VCategory) -> VPresheaf:
    return _gen_presheaf(cfg, cfg.rng("presheaf"), C, 0)


# ---------------------------------------------------------------------------
# internal categories and fibrations


def gen_internal(cfg: GenConfig) -> InternalCategory:
    rng = cfg.rng("internal")
    recipe = cfg.pick(rng, INTERNAL_RECIPES)
    V = cfg.V
    if recipe == "int":
        return internalize(gen_vcategory(cfg))
    if recipe == "groth":
        C = gen_vcategory(cfg)
        return groth(C, gen_presheaf(cfg, C)).total
    if recipe == "product":
        small = max(1, cfg.max_cells // 2)
        return product_internal(cst(small_object(V, rng, small), V),
                                cst(small_object(V, rng, small), V))
    return cst(small_object(V, rng, cfg.max_cells), V)


def relabel_object(V: Cosmos, X, rng: random.Random) -> Map:
    """An isomorphism from ``X`` onto a shuffled copy with fresh labels."""
    if V is FINSET:
        order = list(X.elements)
        rng.shuffle(order)
        new = {x: ("r", n) for n, x in enumerate(order)}
        Y = FinSet([new[x] for x in order])
        return V.make_map(X, Y, new)
    obs, mors = list(X.objects), list(X.morphisms)
    rng.shuffle(obs)
    rng.shuffle(mors)
    no = {x: ("o", n) for n, x in enumerate(obs)}
    nm = {m: ("m", n) for n, m in enumerate(mors)}
    Y = FinCat([no[x] for x in obs], [nm[m] for m in mors],
               {nm[m]: no[X.src[m]] for m in mors}, {nm[m]: no[X.tgt[m]] for m in mors},
               {no[x]: nm[X.ident[x]] for x in obs},
               {(nm[f], nm[g]): nm[h] for (f, g), h in X.comp.items()})
    return V.make_map(X, Y, no, nm)


def relabel_internal(A: InternalCategory, rng: random.Random):
    """A copy of ``A`` with relabeled, untagged levels and the isos ``A0 -> A0'``, ``A1 -> A1'``."""
    V = A.cosmos
    u0, u1 = relabel_object(V, A.A0, rng), relabel_object(V, A.A1, rng)
    v0, v1 = V.inverse(u0), V.inverse(u1)
    pairs = A.composable

    def make_c(pb):
        back = pairs.induce(V.compose(pb.p0, v1), V.compose(pb.p1, v1))
        return V.compose(back, A.c, u1)

    B = assemble(V, u0.cod, u1.cod, V.compose(v1, A.s, u0), V.compose(v1, A.t, u0),
                 V.compose(v0, A.i, u1), make_c)
    return B, u0, u1


def gen_fibration(cfg: GenConfig, C: VCategory | None = None):
    """The projection of a category of elements, transported along a random relabeling."""
    C = C if C is not None else gen_vcategory(cfg)
    g = groth(C, gen_presheaf(cfg, C))
    B, u0, u1 = relabel_internal(g.total, cfg.rng("relabel"))
    V = C.cosmos
    P = InternalFunctor(B, g.projection.target, V.compose(V.inverse(u0), g.projection.H0),
                        V.compose(V.inverse(u1), g.projection.H1))
    return is_discrete_fibration(P)


# ---------------------------------------------------------------------------
# brute-force enumeration


DEFAULT_CAP = 200_000


def _kinds(X):
    """Cells grouped by kind: elements, or objects and morphisms."""
    if isinstance(X, FinSet):
        return {"o": X.elements}
    return {"o": X.objects, "m": X.morphisms}


def _ap(f: Map, kind: str, c):
    return f.ob[c] if kind == "o" else f.mor[c]


def _tuples(factors, kind):
    return itertools.product(*(_kinds(X)[kind] for X in factors))


class _Budget:
    def __init__(self, cap: int):
        self.left = cap

    def spend(self, n: int = 1):
        self.left -= n
        if self.left < 0:
            raise OracleRefusal("enumeration cap exceeded")


def brute_maps(X, Y, budget: _Budget, ob_choices=None, mor_choices=None) -> list:
    """Every map ``X -> Y``, found without the cosmos' own functor enumeration."""
    if isinstance(X, FinSet):
        choices = ob_choices or [Y.elements] * len(X)
        total = 1
        for c in choices:
            total *= len(c)
        budget.spend(total)
        return [Map(X, Y, dict(zip(X.elements, img))) for img in itertools.product(*choices)]
    ob_choices = ob_choices or [Y.objects] * len(X.objects)
    out = []
    mi = {m: k for k, m in enumerate(X.morphisms)}
    checks = [[] for _ in X.morphisms]
    for (f, g), h in X.comp.items():
        checks[max(mi[f], mi[g], mi[h])].append((mi[f], mi[g], mi[h]))
    for obs in itertools.product(*ob_choices):
        budget.spend()
        ob = dict(zip(X.objects, obs))
        cands = []
        for k, m in enumerate(X.morphisms):
            a, b = ob[X.src[m]], ob[X.tgt[m]]
            base = [n for n in Y.morphisms if Y.src[n] == a and Y.tgt[n] == b]
            if mor_choices is not None:
                base = [n for n in base if n in mor_choices[k]]
            if m == X.ident[X.src[m]]:
                base = [n for n in base if n == Y.ident[a]]
            cands.append(base)
        assign = [None] * len(X.morphisms)

        def extend(k):
            if k == len(assign):
                out.append(Map(X, Y, ob, dict(zip(X.morphisms, assign))))
                return
            for n in cands[k]:
                budget.spend()
                assign[k] = n
                if all(Y.comp.get((assign[a], assign[b])) == assign[c] for a, b, c in checks[k]):
                    extend(k + 1)
            assign[k] = None

        extend(0)
    return out


def _backtrack(slots, choices, check_at, budget: _Budget) -> int:
    """Count assignments of ``choices[k]`` to ``slots[k]`` passing every check."""
    assign = {}
    count = 0

    def go(k):
        nonlocal count
        if k == len(slots):
            count += 1
            return
        for c in choices[k]:
            budget.spend()
            assign[slots[k]] = c
            if all(chk(assign) for chk in check_at[k]):
                go(k + 1)
        assign.pop(slots[k], None)

    go(0)
    return count


def _as_covariant(F):
    """(objects, value map, action triples) for a presheaf or a functor into V."""
    if isinstance(F, VPresheaf):
        C = F.base
        # naturality square: alpha_a(ev(h, y)) = ev'(h, alpha_b(y)) for h in C(a, b)
        return C, F.on, [((a, b), C(a, b), "pre") for a in C.objects for b in C.objects]
    I = F.source
    return I, F.on, [((i, j), I(i, j), "co") for i in I.objects for j in I.objects]


def oracle_nat_enum(F, G, cap: int = DEFAULT_CAP) -> int:
    """Number of V-natural transformations ``F => G`` by exhaustive search."""
    B, _, actions = _as_covariant(F)
    budget = _Budget(cap)
    obs = list(B.objects)
    idx = {a: n for n, a in enumerate(obs)}
    choices = [brute_maps(F.on[a], G.on[a], budget) for a in obs]
    check_at = [[] for _ in obs]
    for (a, b), H, mode in actions:

        def check(assign, a=a, b=b, H=H, mode=mode):
            al_a, al_b = assign[a], assign[b]
            for kind in _kinds(H):
                if mode == "pre":
                    for h, y in _tuples((H, F.on[b]), kind):
                        if _ap(al_a, kind, _ap(F.ev[(a, b)], kind, (h, y))) != \
                                _ap(G.ev[(a, b)], kind, (h, _ap(al_b, kind, y))):
                            return False
                else:
                    for w, h in _tuples((F.on[a], H), kind):
                        if _ap(al_b, kind, _ap(F.ev[(a, b)], kind, (w, h))) != \
                                _ap(G.ev[(a, b)], kind, (_ap(al_a, kind, w), h)):
                            return False
            return True

        check_at[max(idx[a], idx[b])].append(check)
    return _backtrack(obs, choices, check_at, budget)


def presheaf_as_functor(F: VPresheaf) -> VFunctor:
    """A presheaf on ``C`` as a functor ``C^op -> V`` in covariant form."""
    from .enriched import opposite
    C = F.base
    V = C.cosmos
    Cop = opposite(C)
    ev = {(i, j): V.compose(V.swap(F.on[i], C(j, i)), F.ev[(j, i)])
          for i in C.objects for j in C.objects}
    return VFunctor(Cop, None, F.on, ev=ev)


def nat_count_constructive(F, G) -> int:
    """Global elements of the end ``V^C(F, G)``."""
    if isinstance(F, VPresheaf):
        F, G = presheaf_as_functor(F), presheaf_as_functor(G)
    end = functor_hom(F, G)
    return len(end.obj.elements if isinstance(end.obj, FinSet) else end.obj.objects)


def oracle_functor_enum(I: InternalCategory, A: InternalCategory, cap: int = DEFAULT_CAP) -> int:
    """Number of internal functors ``I -> A`` by exhaustive search."""
    budget = _Budget(cap)
    pairs_I = I.composable.obj
    count = 0
    for H0 in brute_maps(I.A0, A.A0, budget):
        kinds = _kinds(I.A1)
        want = {}
        for kind, cs in kinds.items():
            for f in cs:
                src = _ap(H0, kind, _ap(I.s, kind, f))
                tgt = _ap(H0, kind, _ap(I.t, kind, f))
                want[(kind, f)] = [g for g in _kinds(A.A1)[kind]
                                   if _ap(A.s, kind, g) == src and _ap(A.t, kind, g) == tgt]
        ob_choices = [want[("o", f)] for f in kinds["o"]]
        mor_choices = [set(want[("m", f)]) for f in kinds.get("m", ())]
        if isinstance(I.A1, FinCat):
            H1s = brute_maps(I.A1, A.A1, budget, ob_choices, mor_choices)
        else:
            H1s = brute_maps(I.A1, A.A1, budget, ob_choices)
        for H1 in H1s:
            budget.spend()
            ok = all(_ap(H1, kind, _ap(I.i, kind, x)) == _ap(A.i, kind, _ap(H0, kind, x))
                     for kind, xs in _kinds(I.A0).items() for x in xs)
            if ok:
                for kind, fgs in _kinds(pairs_I).items():
                    for f, g in fgs:
                        if _ap(H1, kind, _ap(I.c, kind, (f, g))) != \
                                _ap(A.c, kind, (_ap(H1, kind, f), _ap(H1, kind, g))):
                            ok = False
                            break
                    if not ok:
                        break
            count += ok
    return count


def functor_count_constructive(I: InternalCategory, A: InternalCategory) -> int:
    H = internal_hom(I, A)
    return len(cells(H.A0)) if isinstance(H.A0, FinSet) else len(H.A0.objects)


@dataclass(frozen=True)
class SliceBijection:
    """Both family descriptions of the same hom-set, and the count they should share."""

    enriched: int
    internal: int
    constructive: int
    bijective: bool

    @property
    def agree(self) -> bool:
        return self.bijective and self.enriched == self.internal == self.constructive


def _slice_families(W: VFunctor, G: VFunctor, A, X, lower, budget: _Budget) -> set:
    """Families ``h_ij: Wi x I(i,j) x X -> C(A, Gj)`` compatible with composition.

    The upper triangle is shared by both descriptions; ``lower(j, k, kind, u, g)``
    is the action of ``g`` in ``I(j,k)`` on ``u`` in ``C(A, Gj)``.
    """
    I = W.source
    C = G.target
    V = I.cosmos
    obs = I.objects
    slots = [(i, j) for i in obs for j in obs]
    pos = {s: n for n, s in enumerate(slots)}
    choices = [brute_maps(V.product_family((W.on[i], I(i, j), X)).obj, C(A, G.on[j]), budget)
               for i, j in slots]
    check_at = [[] for _ in slots]
    for i in obs:
        for j in obs:
            for k in obs:

                def check(h, i=i, j=j, k=k):
                    dom = (W.on[i], I(i, j), I(j, k), X)
                    for kind in _kinds(X):
                        for w, f, g, x in _tuples(dom, kind):
                            top = _ap(h[(i, k)], kind,
                                      (w, _ap(I.comp[(i, j, k)], kind, (f, g)), x))
                            upper = _ap(h[(j, k)], kind,
                                        (_ap(W.ev[(i, j)], kind, (w, f)), g, x))
                            low = lower(j, k, kind, _ap(h[(i, j)], kind, (w, f, x)), g)
                            if not top == upper == low:
                                return False
                    return True

                last = max(pos[(i, j)], pos[(j, k)], pos[(i, k)])
                check_at[last].append(check)

    found = set()
    assign = {}

    def go(n):
        if n == len(slots):
            found.add(tuple((s, tuple(sorted(assign[s].ob.items(), key=repr)),
                             tuple(sorted((assign[s].mor or {}).items(), key=repr)))
                            for s in slots))
            return
        for c in choices[n]:
            budget.spend()
            assign[slots[n]] = c
            if all(chk(assign) for chk in check_at[n]):
                go(n + 1)
        assign.pop(slots[n], None)

    go(0)
    return found


def oracle_isoofslices(W: VFunctor, G: VFunctor, A, X, cap: int = DEFAULT_CAP) -> SliceBijection:
    """Enumerate the enriched and the internal family descriptions of maps into the cone object.

    The enriched side acts by ``C(A, G-)``; the internal side composes with
    ``G_{j,k}`` in ``C``.  The identity on families is the comparison, so
    it is a bijection exactly when the two solution sets coincide.
    """
    C = G.target
    V = C.cosmos
    budget = _Budget(cap)
    cov = covariant_hom(C, A, G)

    def enriched_lower(j, k, kind, u, g):
        return _ap(cov.ev[(j, k)], kind, (u, g))

    def internal_lower(j, k, kind, u, g):
        return _ap(C.comp[(A, G.on[j], G.on[k])], kind, (u, _ap(G.homs[(j, k)], kind, g)))

    left = _slice_families(W, G, A, X, enriched_lower, budget)
    right = _slice_families(W, G, A, X, internal_lower, budget)
    end = weighted_cone_data(W, G).ends[A]
    constructive = len(V.hom_set(X, end.obj))
    return SliceBijection(len(left), len(right), constructive, left == right)


# ---------------------------------------------------------------------------
# weighted-limit problems


def cones_at(W: VFunctor, G: VFunctor, L, cones=None) -> list:
    """Every cone with apex ``L``, as component dicts ``Wi -> C(L, Gi)``."""
    cones = cones or weighted_cone_data(W, G)
    end = cones.ends[L]
    C = G.target
    V = C.cosmos
    target = covariant_hom(C, L, G)
    return [end_point_to_nat(W, target, end, p).components for p in V.global_elements(end.obj)]


def gen_shape(cfg: GenConfig, rng) -> VCategory:
    V = cfg.V
    choice = rng.choice(("unit", "discrete", "arrow"))
    if choice == "discrete":
        return discrete_vcat(V, ("i", "j"))
    if choice == "arrow":
        return arrow_vcat(V)
    return unit_vcat(V)


def gen_weight(cfg: GenConfig, I: VCategory, rng) -> VFunctor:
    """A constant weight or a covariant representable ``I(i, -)``."""
    V = cfg.V
    if rng.random() < 0.5:
        X = small_object(V, rng, 2)
        return VFunctor(I, None, {i: X for i in I.objects},
                        ev={(i, j): V.proj((X, I(i, j)), 0) for i in I.objects for j in I.objects})
    i = rng.choice(I.objects)
    return covariant_hom(I, i, identity_vfunctor(I))


@dataclass(frozen=True, eq=False)
class WeightedInstance:
    C: VCategory
    G: VFunctor
    W: VFunctor


def _weight_points(W: VFunctor) -> int:
    return sum(len(X.elements) if isinstance(X, FinSet) else len(X.objects)
               for X in W.on.values())


def cone_hom_estimate(W: VFunctor, G: VFunctor) -> int:
    """Upper bound on the hom-objects of the sub-V-category used by the comma cross-check."""
    C = G.target
    I = W.source
    funcs = [W.on] + [{i: C(a, G.on[i]) for i in I.objects} for a in C.objects]
    worst = 0
    for F in funcs:
        for H in funcs:
            n = 1
            for i in I.objects:
                n *= size(H[i]) ** size(F[i])
            worst = max(worst, n)
    return worst


def conical_estimate(W: VFunctor, G: VFunctor) -> int:
    """Arrows of ``Int C`` raised to the points of ``int W``: the size driving the conical route."""
    C = G.target
    arrows = sum(size(h) for h in C.hom.values())
    return arrows ** max(1, _weight_points(W))


def gen_weighted_instance(cfg: GenConfig, max_points: int = 2,
                          budget: int = 64, conical_budget: int = 49) -> WeightedInstance:
    """A shape, weight and diagram small enough for every route and the cross-check.

    ``max_points`` bounds the objects of ``int W``; ``budget`` and
    ``conical_budget`` bound :func:`cone_hom_estimate` and :func:`conical_estimate`.
    """
    rng = cfg.rng("weighted")
    for attempt in range(16):
        small = GenConfig(cfg.seed * 16 + attempt, cfg.cosmos, min(cfg.max_objects, 3),
                          cfg.max_cells, cfg.weights)
        C = gen_vcategory(small)
        I = gen_shape(cfg, rng)
        W = gen_weight(cfg, I, rng)
        if _weight_points(W) > max_points:
            continue
        G = gen_vfunctor(cfg, I, C, rng)
        if cone_hom_estimate(W, G) <= budget and conical_estimate(W, G) <= conical_budget:
            return WeightedInstance(C, G, W)
    C = unit_vcat(cfg.V)
    I = unit_vcat(cfg.V)
    return WeightedInstance(C, constant_vfunctor(I, C, "0"), gen_weight(cfg, I, random.Random(0)))
