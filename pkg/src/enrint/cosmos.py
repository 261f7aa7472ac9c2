"""Finite base categories: finite sets and finite categories.

Both instances share one interface.  Every universal construction returns a
single canonical representative with a stable ordering, so two maps are equal
exactly when their tables are equal.

Labels are arbitrary hashable values.  Constructions build new labels out of
tuples: a product cell is a tuple of component cells, a coproduct cell is a
pair ``(tag, cell)`` and the point of the terminal object is ``()``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

Label = Hashable


class CosmosError(Exception):
    """Base class for errors raised by the cosmos layer."""


class ValidationError(CosmosError):
    pass


class CompositionError(CosmosError):
    pass


class MediatorError(CosmosError):
    """A cone offered to a universal construction does not commute."""


class FactorizationError(CosmosError):
    pass


# ---------------------------------------------------------------------------
# objects and maps


class FinSet:
    """A finite set given by an ordered tuple of distinct labels."""

    __slots__ = ("elements", "_index", "_hash")
    tag = "finset"

    def __init__(self, elements: Iterable[Label]):
        self.elements = tuple(elements)
        self._index = {x: n for n, x in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise ValidationError("duplicate element labels")
        self._hash = hash(("finset", self.elements))

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, FinSet) and self._hash == other._hash \
            and self.elements == other.elements

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self._index

    def index(self, x) -> int:
        return self._index[x]

    def size(self) -> int:
        return len(self.elements)

    def __repr__(self):
        return f"FinSet({list(self.elements)!r})"


class FinCat:
    """A finite category.

    ``morphisms`` is an ordered tuple of names; ``src``/``tgt`` give their
    boundaries, ``ident`` the identity at each object and ``comp`` the
    composite of each composable pair, read diagrammatically: ``comp[f, g]``
    is "f then g".
    """

    __slots__ = ("objects", "morphisms", "src", "tgt", "ident", "comp",
                 "_oindex", "_mindex", "_hash", "_homs", "_outs")
    tag = "fincat"

    def __init__(self, objects, morphisms, src, tgt, ident, comp):
        self.objects = tuple(objects)
        self.morphisms = tuple(morphisms)
        self.src = dict(src)
        self.tgt = dict(tgt)
        self.ident = dict(ident)
        self.comp = dict(comp)
        self._oindex = {x: n for n, x in enumerate(self.objects)}
        self._mindex = {m: n for n, m in enumerate(self.morphisms)}
        if len(self._oindex) != len(self.objects):
            raise ValidationError("duplicate object labels")
        if len(self._mindex) != len(self.morphisms):
            raise ValidationError("duplicate morphism labels")
        self._hash = hash(("fincat", self.objects, self.morphisms))
        self._homs = None
        self._outs = None

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FinCat) or self._hash != other._hash:
            return False
        if self.objects != other.objects or self.morphisms != other.morphisms:
            return False
        return (self.src == other.src and self.tgt == other.tgt
                and self.ident == other.ident and self.comp == other.comp)

    def __hash__(self):
        return self._hash

    def size(self) -> int:
        return len(self.objects) + len(self.morphisms)

    def hom(self, a, b) -> tuple:
        if self._homs is None:
            homs: dict = {}
            for m in self.morphisms:
                homs.setdefault((self.src[m], self.tgt[m]), []).append(m)
            self._homs = {k: tuple(v) for k, v in homs.items()}
        return self._homs.get((a, b), ())

    def composable(self) -> Iterator[tuple]:
        for f in self.morphisms:
            for g in self.hom_from(self.tgt[f]):
                yield f, g

    def hom_from(self, a) -> tuple:
        if self._outs is None:
            outs: dict = {}
            for m in self.morphisms:
                outs.setdefault(self.src[m], []).append(m)
            self._outs = {k: tuple(v) for k, v in outs.items()}
        return self._outs.get(a, ())

    def __repr__(self):
        return f"FinCat(objects={list(self.objects)!r}, morphisms={list(self.morphisms)!r})"


CosmosObject = FinSet | FinCat


class Map:
    """An arrow of the base category.

    For finite sets ``ob`` is the element table and ``mor`` is ``None``.
    For finite categories ``ob`` and ``mor`` are the object and morphism
    tables of a functor.
    """

    __slots__ = ("dom", "cod", "ob", "mor", "_hash")

    def __init__(self, dom, cod, ob: Mapping, mor: Mapping | None = None):
        self.dom = dom
        self.cod = cod
        self.ob = dict(ob)
        self.mor = None if mor is None else dict(mor)
        self._hash = None

    def __call__(self, x):
        return self.ob[x]

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Map):
            return False
        return (self.dom == other.dom and self.cod == other.cod
                and self.ob == other.ob and self.mor == other.mor)

    def __hash__(self):
        if self._hash is None:
            cells = tuple(self.ob[x] for x in _obs(self.dom))
            if self.mor is not None:
                cells += tuple(self.mor[m] for m in self.dom.morphisms)
            self._hash = hash((self.dom, self.cod, cells))
        return self._hash

    def __repr__(self):
        if self.mor is None:
            return f"Map({self.ob!r})"
        return f"Map(ob={self.ob!r}, mor={self.mor!r})"


def _obs(X) -> tuple:
    return X.elements if isinstance(X, FinSet) else X.objects


@dataclass(frozen=True)
class Product:
    obj: object
    projections: tuple

    @property
    def p0(self):
        return self.projections[0]

    @property
    def p1(self):
        return self.projections[1]


@dataclass(frozen=True)
class Pullback:
    obj: object
    p0: Map
    p1: Map
    f: Map
    g: Map


@dataclass(frozen=True)
class Equalizer:
    obj: object
    incl: Map


@dataclass(frozen=True)
class TaggedCoproduct:
    """A coproduct whose cells are pairs ``(label, cell)``."""

    labels: tuple
    summands: tuple
    obj: object
    injections: tuple

    def summand(self, label):
        return self.summands[self.labels.index(label)]

    def injection(self, label) -> Map:
        return self.injections[self.labels.index(label)]

    def family(self) -> dict:
        return dict(zip(self.labels, self.summands))


@dataclass(frozen=True)
class Exponential:
    obj: object
    eval: Map
    base: object
    target: object


@dataclass(frozen=True)
class Fiber:
    obj: object
    leg: Map         # Y_i -> Y
    component: Map   # Y_i -> X_i


@dataclass(frozen=True)
class Decomposition:
    coproduct: TaggedCoproduct
    fibers: dict
    iso: Map         # copairing of the legs, from the coproduct of fibers to Y


@dataclass(frozen=True)
class ConservativeFamily:
    probes: tuple


@dataclass(frozen=True)
class Sections:
    """The subobject of ``Z x [X, Y]`` of pairs ``(z, h)`` with ``p h = q(-, z)``."""

    obj: object
    proj: Map        # to Z
    eval: Map        # X x obj -> Y
    base: object
    param: object


# ---------------------------------------------------------------------------
# the shared interface


class Cosmos:
    tag = "abstract"
    _CACHE_LIMIT = 4096

    def __init__(self):
        self._products: dict = {}
        self._exponentials: dict = {}

    def _memo(self, table: dict, key, build):
        hit = table.get(key)
        if hit is None:
            if len(table) >= self._CACHE_LIMIT:
                table.clear()
            hit = table[key] = build()
        return hit

    def product_family(self, factors) -> Product:
        """Canonical product of a finite family; cells are tuples of cells."""
        key = tuple(factors)
        return self._memo(self._products, key, lambda: self._build_product(key))

    def exponential(self, X, Y) -> Exponential:
        return self._memo(self._exponentials, (X, Y), lambda: self._build_exponential(X, Y))

    # objects -----------------------------------------------------------
    def terminal(self):
        return self.product_family(()).obj

    def is_terminal_object(self, X) -> bool:
        return self.is_iso(self.bang(X))

    # plumbing over tables ---------------------------------------------
    def identity(self, X) -> Map:
        raise NotImplementedError

    def compose(self, f: Map, *gs: Map) -> Map:
        """Diagrammatic composite: ``compose(f, g)`` is "f then g"."""
        out = f
        for g in gs:
            out = self._compose2(out, g)
        return out

    def map_equal(self, f: Map, g: Map) -> bool:
        if f.dom != g.dom or f.cod != g.cod:
            raise CompositionError("map_equal needs matching boundaries")
        return f.ob == g.ob and f.mor == g.mor

    def global_elements(self, X) -> list:
        return [self.point(X, x) for x in _obs(X)]

    def point(self, X, x) -> Map:
        raise NotImplementedError

    def point_label(self, p: Map):
        return p.ob[()]

    def bang(self, X) -> Map:
        return self.product_family(()).pair((), X)

    def const(self, X, p: Map) -> Map:
        """The composite ``X -> * -> Y`` for a point ``p: * -> Y``."""
        return self.compose(self.bang(X), p)

    def apply(self, f: Map, p: Map) -> Map:
        return self.compose(p, f)

    # binary helpers on top of the n-ary product ------------------------
    def product(self, X, Y) -> Product:
        return self.product_family((X, Y))

    def pair(self, *fs: Map) -> Map:
        if not fs:
            raise CompositionError("pair needs a domain; use bang")
        P = self.product_family(tuple(f.cod for f in fs))
        return P.pair(fs)

    def times(self, *fs: Map) -> Map:
        """The product map ``f0 x f1 x ...`` between canonical products."""
        src = self.product_family(tuple(f.dom for f in fs))
        return self.pair(*(self.compose(src.projections[n], f) for n, f in enumerate(fs)))

    def proj(self, factors: Sequence, n: int) -> Map:
        return self.product_family(tuple(factors)).projections[n]

    def unit_right(self, X) -> Map:
        """Canonical ``X -> X x *``."""
        return self.pair(self.identity(X), self.bang(X))

    def unit_left(self, X) -> Map:
        """Canonical ``X -> * x X``."""
        return self.pair(self.bang(X), self.identity(X))

    def assoc(self, X, Y, Z) -> Map:
        """Canonical ``(X x Y) x Z -> X x (Y x Z)``."""
        XY = self.product(X, Y)
        src = self.product(XY.obj, Z)
        a = src.p0
        return self.pair(self.compose(a, XY.p0),
                         self.pair(self.compose(a, XY.p1), src.p1))

    def assoc_inv(self, X, Y, Z) -> Map:
        """Canonical ``X x (Y x Z) -> (X x Y) x Z``."""
        YZ = self.product(Y, Z)
        src = self.product(X, YZ.obj)
        b = src.p1
        return self.pair(self.pair(src.p0, self.compose(b, YZ.p0)),
                         self.compose(b, YZ.p1))

    def swap(self, X, Y) -> Map:
        P = self.product(X, Y)
        return self.pair(P.p1, P.p0)

    # coproducts ---------------------------------------------------------
    def copair(self, coproduct: TaggedCoproduct, maps: Mapping, target=None) -> Map:
        raise NotImplementedError

    def indexed_coproduct_map(self, source: TaggedCoproduct, target: TaggedCoproduct,
                              alpha: Mapping, components: Mapping) -> Map:
        """The map induced by ``g_i: X_i -> Y_alpha(i)`` between tagged coproducts."""
        missing = [l for l in source.labels if l not in components or l not in alpha]
        if missing:
            raise ValidationError(f"missing components for {missing!r}")
        legs = {}
        for l in source.labels:
            g = components[l]
            if g.dom != source.summand(l) or g.cod != target.summand(alpha[l]):
                raise ValidationError(f"component {l!r} has the wrong boundary")
            legs[l] = self.compose(g, target.injection(alpha[l]))
        return self.copair(source, legs, target.obj)

    def fiber_decompose(self, g: Map, coproduct: TaggedCoproduct) -> Decomposition:
        """Split ``g: Y -> total`` along the summands of ``coproduct``."""
        if g.cod != coproduct.obj:
            raise ValidationError("codomain is not the total of the coproduct")
        fibers = {}
        for l, inj in zip(coproduct.labels, coproduct.injections):
            pb = self.pullback(g, inj)
            fibers[l] = Fiber(pb.obj, pb.p0, pb.p1)
        fam = self.coproduct([(l, fibers[l].obj) for l in coproduct.labels])
        iso = self.copair(fam, {l: fibers[l].leg for l in coproduct.labels}, g.dom)
        return Decomposition(fam, fibers, iso)

    def extensive_factor(self, f: Map, source: TaggedCoproduct, target: TaggedCoproduct,
                         alpha: Mapping, square=None) -> dict:
        """The unique family ``f_i: W_i -> Z_alpha(i)`` with ``f = coprod_alpha f_i``.

        ``square`` optionally carries ``(h, k, lower)`` where ``h`` and ``k``
        are dicts of components of the vertical coproduct maps and ``lower`` is
        the bottom map; the square is checked before factoring.
        """
        if f.dom != source.obj or f.cod != target.obj:
            raise FactorizationError("f does not run between the given coproducts")
        if square is not None:
            h, k, lower, mid_src, mid_tgt = square
            left = self.copair(source, {l: self.compose(h[l], mid_src.injection(l))
                                        for l in source.labels}, mid_src.obj)
            right = self.copair(target, {l: self.compose(k[l], mid_tgt.injection(l))
                                         for l in target.labels}, mid_tgt.obj)
            if not self.map_equal(self.compose(f, right), self.compose(left, lower)):
                raise FactorizationError("input square does not commute")
        out = {}
        for l, inj in zip(source.labels, source.injections):
            j = alpha[l]
            restricted = self.compose(inj, f)
            try:
                out[l] = self.factor_through(restricted, target.injection(j))
            except MediatorError as exc:
                raise FactorizationError(f"summand {l!r} does not land in {j!r}") from exc
        return out

    def factor_through(self, f: Map, mono: Map) -> Map:
        """The unique ``u`` with ``u ; mono = f`` for a monomorphism ``mono``."""
        raise NotImplementedError

    def is_mono(self, f: Map) -> bool:
        raise NotImplementedError

    # exponentials -------------------------------------------------------
    def curry(self, f: Map, X, Z=None) -> Map:
        """Transpose ``f: X x Z -> Y`` to ``Z -> [X, Y]``."""
        raise NotImplementedError

    def uncurry(self, g: Map, exp: Exponential) -> Map:
        """Transpose ``g: Z -> [X, Y]`` back to ``X x Z -> Y``."""
        return self.uncurry_into(g, exp.base, exp.target)

    def point_to_map(self, exp: Exponential, p: Map) -> Map:
        """Read a point ``* -> [X, Y]`` as the map ``X -> Y`` it names."""
        X = exp.base
        return self.compose(self.pair(self.identity(X), self.const(X, p)), exp.eval)

    def name(self, h: Map) -> Map:
        """The point ``* -> [X, Y]`` naming ``h: X -> Y``."""
        X = h.dom
        P = self.product(X, self.terminal())
        return self.curry(self.compose(P.p0, h), X, self.terminal())

    # conservativity ------------------------------------------------------
    def generators(self) -> ConservativeFamily:
        raise NotImplementedError

    def hom_set(self, X, Y) -> list:
        """All maps ``X -> Y`` in canonical order."""
        exp = self.exponential(X, Y)
        return [self.point_to_map(exp, p) for p in self.global_elements(exp.obj)]


# ---------------------------------------------------------------------------
# finite sets


def _join(X_cells, f_of, Y_cells, g_of):
    """Ordered sub-product of pairs with matching keys, by hash join."""
    groups: dict = {}
    for y in Y_cells:
        groups.setdefault(g_of(y), []).append(y)
    out = []
    for x in X_cells:
        for y in groups.get(f_of(x), ()):
            out.append((x, y))
    return out


@dataclass(frozen=True)
class _SetProduct(Product):
    cosmos: "FinSetCosmos" = field(default=None, compare=False, repr=False)

    def pair(self, fs: Sequence[Map], dom=None) -> Map:
        if not fs:
            if dom is None:
                raise CompositionError("empty pairing needs a domain")
            return Map(dom, self.obj, {x: () for x in dom.elements})
        dom = fs[0].dom
        for f in fs:
            if f.dom != dom:
                raise CompositionError("pairing maps with different domains")
        tables = [f.ob for f in fs]
        return Map(dom, self.obj, {x: tuple(t[x] for t in tables) for x in dom.elements})


class FinSetCosmos(Cosmos):
    tag = "finset"

    def obj(self, elements) -> FinSet:
        return FinSet(elements)

    def make_map(self, dom: FinSet, cod: FinSet, table: Mapping | Callable) -> Map:
        if callable(table):
            table = {x: table(x) for x in dom.elements}
        return Map(dom, cod, table)

    def validate_object(self, X) -> list:
        if not isinstance(X, FinSet):
            return ["not a finite set"]
        return []

    def validate_map(self, f: Map) -> list:
        errs = []
        for x in f.dom.elements:
            if x not in f.ob:
                errs.append(f"undefined at {x!r}")
            elif f.ob[x] not in f.cod:
                errs.append(f"{x!r} lands outside the codomain")
        if set(f.ob) - set(f.dom.elements):
            errs.append("table has entries outside the domain")
        return errs

    def identity(self, X) -> Map:
        return Map(X, X, {x: x for x in X.elements})

    def _compose2(self, f: Map, g: Map) -> Map:
        if f.cod != g.dom:
            raise CompositionError("codomain and domain differ")
        gt = g.ob
        return Map(f.dom, g.cod, {x: gt[y] for x, y in f.ob.items()})

    def is_iso(self, f: Map) -> bool:
        return len(f.dom) == len(f.cod) and len(set(f.ob.values())) == len(f.cod)

    def is_mono(self, f: Map) -> bool:
        return len(set(f.ob.values())) == len(f.dom)

    def inverse(self, f: Map) -> Map:
        if not self.is_iso(f):
            raise CosmosError("map is not invertible")
        return Map(f.cod, f.dom, {y: x for x, y in f.ob.items()})

    def initial(self) -> FinSet:
        return FinSet(())

    def point(self, X, x) -> Map:
        if x not in X:
            raise ValidationError(f"{x!r} is not an element")
        return Map(self.terminal(), X, {(): x})

    def _build_product(self, factors) -> _SetProduct:
        factors = tuple(factors)
        cells = list(itertools.product(*(X.elements for X in factors)))
        P = FinSet(cells)
        projs = tuple(Map(P, X, {c: c[n] for c in cells}) for n, X in enumerate(factors))
        return _SetProduct(P, projs, cosmos=self)

    def pullback(self, f: Map, g: Map) -> Pullback:
        if f.cod != g.cod:
            raise CompositionError("cospan legs have different codomains")
        cells = _join(f.dom.elements, f.ob.__getitem__, g.dom.elements, g.ob.__getitem__)
        P = FinSet(cells)
        return _SetPullback(P, Map(P, f.dom, {c: c[0] for c in cells}),
                            Map(P, g.dom, {c: c[1] for c in cells}), f, g)

    def equalizer(self, f: Map, g: Map) -> Equalizer:
        if f.dom != g.dom or f.cod != g.cod:
            raise CompositionError("parallel pair expected")
        cells = [x for x in f.dom.elements if f.ob[x] == g.ob[x]]
        E = FinSet(cells)
        return _SetEqualizer(E, Map(E, f.dom, {x: x for x in cells}))

    def subobject(self, X, keep: Callable) -> Equalizer:
        """Ordered subobject of the cells satisfying ``keep``."""
        cells = [x for x in X.elements if keep(x)]
        E = FinSet(cells)
        return _SetEqualizer(E, Map(E, X, {x: x for x in cells}))

    def coproduct(self, family) -> TaggedCoproduct:
        family = list(family.items()) if isinstance(family, Mapping) else list(family)
        labels = tuple(l for l, _ in family)
        if len(set(labels)) != len(labels):
            raise ValidationError("duplicate coproduct labels")
        cells = [(l, x) for l, X in family for x in X.elements]
        T = FinSet(cells)
        injs = tuple(Map(X, T, {x: (l, x) for x in X.elements}) for l, X in family)
        return TaggedCoproduct(labels, tuple(X for _, X in family), T, injs)

    def copair(self, coproduct: TaggedCoproduct, maps: Mapping, target=None) -> Map:
        if target is None:
            target = next(iter(maps.values())).cod
        table = {}
        for l in coproduct.labels:
            m = maps[l]
            if m.cod != target:
                raise CompositionError("copairing maps with different codomains")
            for x, y in m.ob.items():
                table[(l, x)] = y
        return Map(coproduct.obj, target, table)

    def factor_through(self, f: Map, mono: Map) -> Map:
        back = {y: x for x, y in mono.ob.items()}
        try:
            return Map(f.dom, mono.dom, {x: back[y] for x, y in f.ob.items()})
        except KeyError as exc:
            raise MediatorError("map does not factor through the subobject") from exc

    def _build_exponential(self, X: FinSet, Y: FinSet) -> Exponential:
        funcs = list(itertools.product(Y.elements, repeat=len(X)))
        E = FinSet(funcs)
        P = self.product(X, E).obj
        ev = Map(P, Y, {(x, h): h[X.index(x)] for x, h in P.elements})
        return Exponential(E, ev, X, Y)

    def curry(self, f: Map, X, Z=None) -> Map:
        P = f.dom
        Z = self._second_factor(P, X) if Z is None else Z
        E = self._exp_obj(X, f.cod)
        xs = X.elements
        table = {z: tuple(f.ob[(x, z)] for x in xs) for z in Z.elements}
        return Map(Z, E, table)

    def _exp_obj(self, X, Y):
        return self.exponential(X, Y).obj

    def uncurry_into(self, g: Map, X, Y) -> Map:
        Z = g.dom
        P = self.product(X, Z).obj
        return Map(P, Y, {(x, z): g.ob[z][X.index(x)] for x, z in P.elements})

    def _second_factor(self, P: FinSet, X: FinSet) -> FinSet:
        if not len(X):
            raise CosmosError("cannot recover the parameter object from an empty product")
        x0 = X.elements[0]
        return FinSet([z for x, z in P.elements if x == x0])

    def sections(self, q: Map, p: Map, X, Z) -> Sections:
        """Pairs ``(z, h)`` with ``h: X -> Y`` and ``p(h(x)) = q(x, z)``, in canonical order."""
        Y = p.dom
        fib: dict = {}
        for y in Y.elements:
            fib.setdefault(p.ob[y], []).append(y)
        cells = []
        for z in Z.elements:
            choices = [fib.get(q.ob[(x, z)], ()) for x in X.elements]
            for h in itertools.product(*choices):
                cells.append((z, h))
        S = FinSet(cells)
        proj = Map(S, Z, {c: c[0] for c in cells})
        P = self.product(X, S).obj
        ev = Map(P, Y, {(x, c): c[1][X.index(x)] for x, c in P.elements})
        return Sections(S, proj, ev, X, Z)

    def sections_induce(self, S: Sections, u: Map, v: Map) -> Map:
        """The map ``W -> S`` with parameter ``u: W -> Z`` and transpose ``v: X x W -> Y``."""
        xs = S.base.elements
        table = {}
        for w in u.dom.elements:
            c = (u.ob[w], tuple(v.ob[(x, w)] for x in xs))
            if c not in S.obj:
                raise MediatorError(f"no section through {w!r}")
            table[w] = c
        return Map(u.dom, S.obj, table)

    def pointwise_equalizer(self, Z, equations) -> Equalizer:
        """Subobject of ``Z`` where each pair of maps ``X x Z -> Y`` agree for all ``x``."""
        keep = []
        for z in Z.elements:
            ok = True
            for X, u, v in equations:
                for x in X.elements:
                    if u.ob[(x, z)] != v.ob[(x, z)]:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                keep.append(z)
        E = FinSet(keep)
        return _SetEqualizer(E, Map(E, Z, {z: z for z in keep}))

    def generators(self) -> ConservativeFamily:
        return ConservativeFamily((self.terminal(),))


@dataclass(frozen=True)
class _SetPullback(Pullback):
    def induce(self, u: Map, v: Map) -> Map:
        if u.dom != v.dom:
            raise MediatorError("cone legs have different domains")
        table = {}
        for x in u.dom.elements:
            a, b = u.ob[x], v.ob[x]
            if self.f.ob[a] != self.g.ob[b]:
                raise MediatorError(f"cone does not commute at {x!r}")
            table[x] = (a, b)
        return Map(u.dom, self.obj, table)


@dataclass(frozen=True)
class _SetEqualizer(Equalizer):
    def induce(self, u: Map) -> Map:
        table = {}
        for x, y in u.ob.items():
            if y not in self.obj:
                raise MediatorError(f"cone does not commute at {x!r}")
            table[x] = y
        return Map(u.dom, self.obj, table)


# ---------------------------------------------------------------------------
# finite categories


def _cat_from_cells(objects, morphisms, src, tgt, ident, comp) -> FinCat:
    return FinCat(objects, morphisms, src, tgt, ident, comp)


@dataclass(frozen=True)
class _CatProduct(Product):
    cosmos: "FinCatCosmos" = field(default=None, compare=False, repr=False)

    def pair(self, fs: Sequence[Map], dom=None) -> Map:
        if not fs:
            if dom is None:
                raise CompositionError("empty pairing needs a domain")
            return Map(dom, self.obj, {x: () for x in dom.objects},
                       {m: () for m in dom.morphisms})
        dom = fs[0].dom
        for f in fs:
            if f.dom != dom:
                raise CompositionError("pairing maps with different domains")
        return Map(dom, self.obj,
                   {x: tuple(f.ob[x] for f in fs) for x in dom.objects},
                   {m: tuple(f.mor[m] for f in fs) for m in dom.morphisms})


class FinCatCosmos(Cosmos):
    tag = "fincat"

    def obj(self, objects, morphisms, identities, composition) -> FinCat:
        """Build from records ``(name, src, tgt)`` and a composition table."""
        names, src, tgt = [], {}, {}
        for name, s, t in morphisms:
            names.append(name)
            src[name] = s
            tgt[name] = t
        return FinCat(objects, names, src, tgt, identities, composition)

    def discrete(self, labels) -> FinCat:
        labels = tuple(labels)
        return FinCat(labels, labels, {x: x for x in labels}, {x: x for x in labels},
                      {x: x for x in labels}, {(x, x): x for x in labels})

    def make_map(self, dom: FinCat, cod: FinCat, on_objects, on_morphisms) -> Map:
        return Map(dom, cod, on_objects, on_morphisms)

    def validate_object(self, X) -> list:
        if not isinstance(X, FinCat):
            return ["not a finite category"]
        errs = []
        obs = set(X.objects)
        for m in X.morphisms:
            if X.src.get(m) not in obs or X.tgt.get(m) not in obs:
                errs.append(f"morphism {m!r} has an unknown boundary")
        if errs:
            return errs
        for x in X.objects:
            i = X.ident.get(x)
            if i is None or i not in X._mindex:
                errs.append(f"object {x!r} has no identity")
            elif X.src[i] != x or X.tgt[i] != x:
                errs.append(f"identity of {x!r} is not an endomorphism of it")
        if errs:
            return errs
        for f, g in X.composable():
            h = X.comp.get((f, g))
            if h is None:
                errs.append(f"composite {f!r};{g!r} is missing")
            elif h not in X._mindex or X.src[h] != X.src[f] or X.tgt[h] != X.tgt[g]:
                errs.append(f"composite {f!r};{g!r} has the wrong boundary")
        for (f, g) in X.comp:
            if f not in X._mindex or g not in X._mindex or X.tgt[f] != X.src[g]:
                errs.append(f"composition entry {f!r};{g!r} is not a composable pair")
        if errs:
            return errs
        for m in X.morphisms:
            if X.comp[(X.ident[X.src[m]], m)] != m or X.comp[(m, X.ident[X.tgt[m]])] != m:
                errs.append(f"unit law fails at {m!r}")
        for f, g in X.composable():
            fg = X.comp[(f, g)]
            for h in X.hom_from(X.tgt[g]):
                if X.comp[(fg, h)] != X.comp[(f, X.comp[(g, h)])]:
                    errs.append(f"associativity fails at ({f!r},{g!r},{h!r})")
        return errs

    def validate_map(self, f: Map) -> list:
        X, Y = f.dom, f.cod
        errs = []
        if f.mor is None:
            return ["functor lacks a morphism table"]
        for x in X.objects:
            if f.ob.get(x) not in Y._oindex:
                errs.append(f"object {x!r} is not sent to an object")
        for m in X.morphisms:
            if f.mor.get(m) not in Y._mindex:
                errs.append(f"morphism {m!r} is not sent to a morphism")
        if errs:
            return errs
        for m in X.morphisms:
            n = f.mor[m]
            if Y.src[n] != f.ob[X.src[m]] or Y.tgt[n] != f.ob[X.tgt[m]]:
                errs.append(f"boundary of {m!r} is not preserved")
        for x in X.objects:
            if f.mor[X.ident[x]] != Y.ident[f.ob[x]]:
                errs.append(f"identity at {x!r} is not preserved")
        if errs:
            return errs
        for (a, b), c in X.comp.items():
            if f.mor[c] != Y.comp[(f.mor[a], f.mor[b])]:
                errs.append(f"composite {a!r};{b!r} is not preserved")
        return errs

    def identity(self, X) -> Map:
        return Map(X, X, {x: x for x in X.objects}, {m: m for m in X.morphisms})

    def _compose2(self, f: Map, g: Map) -> Map:
        if f.cod != g.dom:
            raise CompositionError("codomain and domain differ")
        go, gm = g.ob, g.mor
        return Map(f.dom, g.cod, {x: go[y] for x, y in f.ob.items()},
                   {m: gm[n] for m, n in f.mor.items()})

    def is_iso(self, f: Map) -> bool:
        X, Y = f.dom, f.cod
        return (len(X.objects) == len(Y.objects) and len(X.morphisms) == len(Y.morphisms)
                and len(set(f.ob.values())) == len(Y.objects)
                and len(set(f.mor.values())) == len(Y.morphisms))

    def is_mono(self, f: Map) -> bool:
        return (len(set(f.ob.values())) == len(f.dom.objects)
                and len(set(f.mor.values())) == len(f.dom.morphisms))

    def inverse(self, f: Map) -> Map:
        if not self.is_iso(f):
            raise CosmosError("functor is not invertible")
        return Map(f.cod, f.dom, {y: x for x, y in f.ob.items()},
                   {n: m for m, n in f.mor.items()})

    def initial(self) -> FinCat:
        return FinCat((), (), {}, {}, {}, {})

    def point(self, X, x) -> Map:
        if x not in X._oindex:
            raise ValidationError(f"{x!r} is not an object")
        return Map(self.terminal(), X, {(): x}, {(): X.ident[x]})

    def arrow(self) -> FinCat:
        """The free-living morphism ``0 -> 1``."""
        return self.obj(("0", "1"), [("id0", "0", "0"), ("f", "0", "1"), ("id1", "1", "1")],
                        {"0": "id0", "1": "id1"},
                        {("id0", "id0"): "id0", ("id0", "f"): "f", ("f", "id1"): "f",
                         ("id1", "id1"): "id1"})

    def _build_product(self, factors) -> _CatProduct:
        factors = tuple(factors)
        obs = list(itertools.product(*(X.objects for X in factors)))
        mors = list(itertools.product(*(X.morphisms for X in factors)))
        src = {m: tuple(X.src[c] for X, c in zip(factors, m)) for m in mors}
        tgt = {m: tuple(X.tgt[c] for X, c in zip(factors, m)) for m in mors}
        ident = {x: tuple(X.ident[c] for X, c in zip(factors, x)) for x in obs}
        comp = {}
        comps = [X.comp for X in factors]
        for f in mors:
            for g in self._hom_from_product(factors, tgt[f]):
                comp[(f, g)] = tuple(c[(a, b)] for c, a, b in zip(comps, f, g))
        P = FinCat(obs, mors, src, tgt, ident, comp)
        projs = tuple(Map(P, X, {x: x[n] for x in obs}, {m: m[n] for m in mors})
                      for n, X in enumerate(factors))
        return _CatProduct(P, projs, cosmos=self)

    @staticmethod
    def _hom_from_product(factors, obj):
        return itertools.product(*(X.hom_from(o) for X, o in zip(factors, obj)))

    def _sub(self, X: FinCat, obs, mors) -> FinCat:
        mset = set(mors)
        comp = {(f, g): h for (f, g), h in X.comp.items() if f in mset and g in mset}
        return FinCat(obs, mors, {m: X.src[m] for m in mors}, {m: X.tgt[m] for m in mors},
                      {x: X.ident[x] for x in obs}, comp)

    def pullback(self, f: Map, g: Map) -> Pullback:
        if f.cod != g.cod:
            raise CompositionError("cospan legs have different codomains")
        A, B = f.dom, g.dom
        obs = _join(A.objects, f.ob.__getitem__, B.objects, g.ob.__getitem__)
        mors = _join(A.morphisms, f.mor.__getitem__, B.morphisms, g.mor.__getitem__)
        src = {m: (A.src[m[0]], B.src[m[1]]) for m in mors}
        tgt = {m: (A.tgt[m[0]], B.tgt[m[1]]) for m in mors}
        ident = {x: (A.ident[x[0]], B.ident[x[1]]) for x in obs}
        by_src: dict = {}
        for m in mors:
            by_src.setdefault(src[m], []).append(m)
        comp = {}
        for m in mors:
            for n in by_src.get(tgt[m], ()):
                comp[(m, n)] = (A.comp[(m[0], n[0])], B.comp[(m[1], n[1])])
        P = FinCat(obs, mors, src, tgt, ident, comp)
        return _CatPullback(P, Map(P, A, {x: x[0] for x in obs}, {m: m[0] for m in mors}),
                            Map(P, B, {x: x[1] for x in obs}, {m: m[1] for m in mors}), f, g)

    def equalizer(self, f: Map, g: Map) -> Equalizer:
        if f.dom != g.dom or f.cod != g.cod:
            raise CompositionError("parallel pair expected")
        X = f.dom
        obs = [x for x in X.objects if f.ob[x] == g.ob[x]]
        mors = [m for m in X.morphisms if f.mor[m] == g.mor[m]]
        E = self._sub(X, obs, mors)
        return _CatEqualizer(E, Map(E, X, {x: x for x in obs}, {m: m for m in mors}))

    def subobject(self, X, keep_ob: Callable, keep_mor: Callable) -> Equalizer:
        obs = [x for x in X.objects if keep_ob(x)]
        oset = set(obs)
        mors = [m for m in X.morphisms
                if X.src[m] in oset and X.tgt[m] in oset and keep_mor(m)]
        E = self._sub(X, obs, mors)
        return _CatEqualizer(E, Map(E, X, {x: x for x in obs}, {m: m for m in mors}))

    def coproduct(self, family) -> TaggedCoproduct:
        family = list(family.items()) if isinstance(family, Mapping) else list(family)
        labels = tuple(l for l, _ in family)
        if len(set(labels)) != len(labels):
            raise ValidationError("duplicate coproduct labels")
        obs, mors, src, tgt, ident, comp = [], [], {}, {}, {}, {}
        for l, X in family:
            for x in X.objects:
                obs.append((l, x))
                ident[(l, x)] = (l, X.ident[x])
            for m in X.morphisms:
                mors.append((l, m))
                src[(l, m)] = (l, X.src[m])
                tgt[(l, m)] = (l, X.tgt[m])
            for (a, b), c in X.comp.items():
                comp[((l, a), (l, b))] = (l, c)
        T = FinCat(obs, mors, src, tgt, ident, comp)
        injs = tuple(Map(X, T, {x: (l, x) for x in X.objects}, {m: (l, m) for m in X.morphisms})
                     for l, X in family)
        return TaggedCoproduct(labels, tuple(X for _, X in family), T, injs)

    def copair(self, coproduct: TaggedCoproduct, maps: Mapping, target=None) -> Map:
        if target is None:
            target = next(iter(maps.values())).cod
        ob, mor = {}, {}
        for l in coproduct.labels:
            m = maps[l]
            if m.cod != target:
                raise CompositionError("copairing maps with different codomains")
            for x, y in m.ob.items():
                ob[(l, x)] = y
            for a, b in m.mor.items():
                mor[(l, a)] = b
        return Map(coproduct.obj, target, ob, mor)

    def factor_through(self, f: Map, mono: Map) -> Map:
        bo = {y: x for x, y in mono.ob.items()}
        bm = {y: x for x, y in mono.mor.items()}
        try:
            return Map(f.dom, mono.dom, {x: bo[y] for x, y in f.ob.items()},
                       {m: bm[n] for m, n in f.mor.items()})
        except KeyError as exc:
            raise MediatorError("functor does not factor through the subobject") from exc

    # functor categories ---------------------------------------------------
    def functors(self, X: FinCat, Y: FinCat, ob_choices=None, mor_choices=None) -> list:
        """All functors ``X -> Y`` as labels ``(objects, morphisms)``, canonically ordered.

        Optional per-cell candidate lists restrict the search; the result is
        the ordered subset of the unrestricted enumeration.
        """
        if ob_choices is None:
            ob_choices = [Y.objects] * len(X.objects)
        oi = X._oindex
        mi = X._mindex
        out = []
        nm = len(X.morphisms)
        checks = [[] for _ in range(nm)]
        for (f, g), h in X.comp.items():
            k = max(mi[f], mi[g], mi[h])
            checks[k].append((mi[f], mi[g], mi[h]))
        for obs in itertools.product(*ob_choices):
            cands = []
            for k, m in enumerate(X.morphisms):
                a, b = obs[oi[X.src[m]]], obs[oi[X.tgt[m]]]
                base = Y.hom(a, b)
                if mor_choices is not None:
                    allowed = mor_choices[k]
                    base = [n for n in base if n in allowed]
                if m == X.ident[X.src[m]]:
                    idn = Y.ident[a]
                    base = [idn] if idn in base else []
                cands.append(base)
            if any(not c for c in cands):
                continue
            assign = [None] * nm

            def extend(k):
                if k == nm:
                    out.append((obs, tuple(assign)))
                    return
                for n in cands[k]:
                    assign[k] = n
                    ok = True
                    for a, b, c in checks[k]:
                        if Y.comp[(assign[a], assign[b])] != assign[c]:
                            ok = False
                            break
                    if ok:
                        extend(k + 1)
                assign[k] = None

            extend(0)
        return out

    def naturals(self, X: FinCat, Y: FinCat, F, G, comp_choices=None) -> list:
        """Natural transformations ``F => G`` as component tuples, canonically ordered."""
        oi = X._oindex
        Fo, Fm = F
        Go, Gm = G
        mi = X._mindex
        choices = []
        for k, x in enumerate(X.objects):
            base = Y.hom(Fo[k], Go[k])
            if comp_choices is not None:
                base = [n for n in base if n in comp_choices[k]]
            if not base:
                return []
            choices.append(base)
        out = []
        for comps in itertools.product(*choices):
            ok = True
            for m in X.morphisms:
                a, b = oi[X.src[m]], oi[X.tgt[m]]
                if Y.comp[(Fm[mi[m]], comps[b])] != Y.comp[(comps[a], Gm[mi[m]])]:
                    ok = False
                    break
            if ok:
                out.append(comps)
        return out

    def _functor_cat(self, X: FinCat, Y: FinCat, functors) -> FinCat:
        mors, src, tgt = [], {}, {}
        for F in functors:
            for G in functors:
                for comps in self.naturals(X, Y, F, G):
                    m = (F, G, comps)
                    mors.append(m)
                    src[m] = F
                    tgt[m] = G
        ident = {F: (F, F, tuple(Y.ident[o] for o in F[0])) for F in functors}
        by_src: dict = {}
        for m in mors:
            by_src.setdefault(m[0], []).append(m)
        comp = {}
        for m in mors:
            for n in by_src.get(m[1], ()):
                comp[(m, n)] = (m[0], n[1], tuple(Y.comp[(a, b)] for a, b in zip(m[2], n[2])))
        return FinCat(functors, mors, src, tgt, ident, comp)

    def _build_exponential(self, X: FinCat, Y: FinCat) -> Exponential:
        E = self._functor_cat(X, Y, self.functors(X, Y))
        P = self.product(X, E).obj
        oi, mi = X._oindex, X._mindex
        ob = {(x, F): F[0][oi[x]] for x, F in P.objects}
        mor = {}
        for m, a in P.morphisms:
            F, G, comps = a
            mor[(m, a)] = Y.comp[(F[1][mi[m]], comps[oi[X.tgt[m]]])]
        return Exponential(E, Map(P, Y, ob, mor), X, Y)

    def curry(self, f: Map, X, Z=None) -> Map:
        P = f.dom
        Z = self._second_factor(P, X) if Z is None else Z
        Y = f.cod
        E = self.exponential(X, Y).obj
        return self._curry_into(f, X, Z, E)

    def _curry_into(self, f: Map, X, Z, E) -> Map:
        ob = {}
        for z in Z.objects:
            idz = Z.ident[z]
            ob[z] = (tuple(f.ob[(x, z)] for x in X.objects),
                     tuple(f.mor[(m, idz)] for m in X.morphisms))
        mor = {}
        for n in Z.morphisms:
            comps = tuple(f.mor[(X.ident[x], n)] for x in X.objects)
            mor[n] = (ob[Z.src[n]], ob[Z.tgt[n]], comps)
        return Map(Z, E, ob, mor)

    def uncurry_into(self, g: Map, X, Y) -> Map:
        Z = g.dom
        P = self.product(X, Z).obj
        oi, mi = X._oindex, X._mindex
        ob = {(x, z): g.ob[z][0][oi[x]] for x, z in P.objects}
        mor = {}
        for m, n in P.morphisms:
            F, G, comps = g.mor[n]
            mor[(m, n)] = Y.comp[(F[1][mi[m]], comps[oi[X.tgt[m]]])]
        return Map(P, Y, ob, mor)

    def _second_factor(self, P: FinCat, X: FinCat) -> FinCat:
        if not X.objects:
            raise CosmosError("cannot recover the parameter object from an empty product")
        x0 = X.objects[0]
        idx0 = X.ident[x0]
        obs = [z for x, z in P.objects if x == x0]
        mors = [n for m, n in P.morphisms if m == idx0]
        return FinCat(obs, mors, {n: P.src[(idx0, n)][1] for n in mors},
                      {n: P.tgt[(idx0, n)][1] for n in mors},
                      {z: P.ident[(x0, z)][1] for z in obs},
                      {(a, b): P.comp[((idx0, a), (idx0, b))][1]
                       for a in mors for b in mors if P.tgt[(idx0, a)] == P.src[(idx0, b)]})

    def sections(self, q: Map, p: Map, X: FinCat, Z: FinCat) -> Sections:
        """Pairs ``(z, h)`` with ``h: X -> Y`` a functor and ``p h = q(-, z)``.

        Cells come out in the order of the corresponding subobject of
        ``Z x [X, Y]``.
        """
        Y = p.dom
        fo: dict = {}
        for y in Y.objects:
            fo.setdefault(p.ob[y], []).append(y)
        fm: dict = {}
        for n in Y.morphisms:
            fm.setdefault(p.mor[n], []).append(n)
        obs = []
        per_z: dict = {}
        for z in Z.objects:
            idz = Z.ident[z]
            oc = [fo.get(q.ob[(x, z)], ()) for x in X.objects]
            mc = [set(fm.get(q.mor[(m, idz)], ())) for m in X.morphisms]
            hs = self.functors(X, Y, oc, mc)
            per_z[z] = hs
            obs.extend((z, h) for h in hs)
        mors, src, tgt = [], {}, {}
        for n in Z.morphisms:
            a, b = Z.src[n], Z.tgt[n]
            cc = [set(fm.get(q.mor[(X.ident[x], n)], ())) for x in X.objects]
            for F in per_z[a]:
                for G in per_z[b]:
                    for comps in self.naturals(X, Y, F, G, cc):
                        m = (n, (F, G, comps))
                        mors.append(m)
                        src[m] = (a, F)
                        tgt[m] = (b, G)
        ident = {(z, h): (Z.ident[z], (h, h, tuple(Y.ident[o] for o in h[0])))
                 for z, h in obs}
        by_src: dict = {}
        for m in mors:
            by_src.setdefault(src[m], []).append(m)
        comp = {}
        for m in mors:
            for k in by_src.get(tgt[m], ()):
                comp[(m, k)] = (Z.comp[(m[0], k[0])],
                                (m[1][0], k[1][1],
                                 tuple(Y.comp[(u, v)] for u, v in zip(m[1][2], k[1][2]))))
        S = FinCat(obs, mors, src, tgt, ident, comp)
        proj = Map(S, Z, {c: c[0] for c in obs}, {m: m[0] for m in mors})
        P = self.product(X, S).obj
        oi, mi = X._oindex, X._mindex
        ev_ob = {(x, c): c[1][0][oi[x]] for x, c in P.objects}
        ev_mor = {}
        for m, k in P.morphisms:
            F, G, comps = k[1]
            ev_mor[(m, k)] = Y.comp[(F[1][mi[m]], comps[oi[X.tgt[m]]])]
        return Sections(S, proj, Map(P, Y, ev_ob, ev_mor), X, Z)

    def sections_induce(self, S: Sections, u: Map, v: Map) -> Map:
        """The functor ``W -> S`` with parameter ``u: W -> Z`` and transpose ``v: X x W -> Y``."""
        X, W, T = S.base, u.dom, S.obj
        ob, mor = {}, {}
        for w in W.objects:
            idw = W.ident[w]
            c = (u.ob[w], (tuple(v.ob[(x, w)] for x in X.objects),
                           tuple(v.mor[(m, idw)] for m in X.morphisms)))
            if c not in T._oindex:
                raise MediatorError(f"no section through {w!r}")
            ob[w] = c
        for n in W.morphisms:
            c = (u.mor[n], (ob[W.src[n]][1], ob[W.tgt[n]][1],
                            tuple(v.mor[(X.ident[x], n)] for x in X.objects)))
            if c not in T._mindex:
                raise MediatorError(f"no section through {n!r}")
            mor[n] = c
        return Map(W, T, ob, mor)

    def pointwise_equalizer(self, Z, equations) -> Equalizer:
        """Subobject of ``Z`` where the transposes of maps ``X x Z -> Y`` agree."""
        keep_ob = []
        for z in Z.objects:
            idz = Z.ident[z]
            ok = True
            for X, u, v in equations:
                if any(u.ob[(x, z)] != v.ob[(x, z)] for x in X.objects) or \
                        any(u.mor[(m, idz)] != v.mor[(m, idz)] for m in X.morphisms):
                    ok = False
                    break
            if ok:
                keep_ob.append(z)
        oset = set(keep_ob)
        keep_mor = []
        for n in Z.morphisms:
            if Z.src[n] not in oset or Z.tgt[n] not in oset:
                continue
            if all(u.mor[(X.ident[x], n)] == v.mor[(X.ident[x], n)]
                   for X, u, v in equations for x in X.objects):
                keep_mor.append(n)
        E = self._sub(Z, keep_ob, keep_mor)
        return _CatEqualizer(E, Map(E, Z, {z: z for z in keep_ob}, {n: n for n in keep_mor}))

    def generators(self) -> ConservativeFamily:
        return ConservativeFamily((self.arrow(),))


@dataclass(frozen=True)
class _CatPullback(Pullback):
    def induce(self, u: Map, v: Map) -> Map:
        if u.dom != v.dom:
            raise MediatorError("cone legs have different domains")
        f, g = self.f, self.g
        ob, mor = {}, {}
        for x in u.dom.objects:
            a, b = u.ob[x], v.ob[x]
            if f.ob[a] != g.ob[b]:
                raise MediatorError(f"cone does not commute at object {x!r}")
            ob[x] = (a, b)
        for m in u.dom.morphisms:
            a, b = u.mor[m], v.mor[m]
            if f.mor[a] != g.mor[b]:
                raise MediatorError(f"cone does not commute at morphism {m!r}")
            mor[m] = (a, b)
        return Map(u.dom, self.obj, ob, mor)


@dataclass(frozen=True)
class _CatEqualizer(Equalizer):
    def induce(self, u: Map) -> Map:
        E = self.obj
        for x, y in u.ob.items():
            if y not in E._oindex:
                raise MediatorError(f"cone does not commute at object {x!r}")
        for m, n in u.mor.items():
            if n not in E._mindex:
                raise MediatorError(f"cone does not commute at morphism {m!r}")
        return Map(u.dom, E, u.ob, u.mor)


FINSET = FinSetCosmos()
FINCAT = FinCatCosmos()


def cosmos_for(tag: str) -> Cosmos:
    try:
        return {"finset": FINSET, "fincat": FINCAT}[tag]
    except KeyError:
        raise ValidationError(f"unknown cosmos {tag!r}") from None


def cosmos_of(X) -> Cosmos:
    return FINSET if isinstance(X, FinSet) else FINCAT


def cells(X) -> tuple:
    """Every cell of an object: elements, or objects followed by morphisms."""
    if isinstance(X, FinSet):
        return X.elements
    return X.objects + X.morphisms


def size(X) -> int:
    return len(X.elements) if isinstance(X, FinSet) else len(X.objects) + len(X.morphisms)


def from_empty(X, Y) -> Map:
    """The unique map out of an object with no cells."""
    if size(X):
        raise CosmosError("source is not empty")
    return Map(X, Y, {}, None if isinstance(X, FinSet) else {})
