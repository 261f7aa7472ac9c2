"""Batch front end: JSON instance documents in, deterministic reports out.

Cells are encoded as JSON strings, or as arrays for tuple cells.  Where a
cell has to be a JSON object key, a tuple cell is written as the compact JSON
text of its array, so ``("a", ())`` becomes the key ``["a",[]]``.  Labels
that are plain strings must therefore not start with ``[``.

Exit codes: 0 when every verdict is true, 1 when some verdict is false, 2 on
input errors, unmet hypotheses of an explicitly requested route, or routes
that disagree.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .cosmos import FINCAT, FINSET, CosmosError, FinSet, Map, cells, cosmos_for, from_empty, size
from .enriched import (VCategory, VFunctor, VNat, VPresheaf, covariant_hom, find_representations,
                       identity_vfunctor, representable, validate_presheaf, validate_vcategory,
                       validate_vfunctor, validate_vnat)
from .grothendieck import counit_epsilon, groth, is_valid_groth, unit_eta
from .internal import (InternalCategory, InternalFunctor, cst, internalize,
                       is_discrete_fibration, validate_internal, validate_internal_functor)
from .limits import (REPRESENTABILITY_ROUTES, WEIGHTED_ROUTES, HypothesisNotMet, Outcome,
                     WeightedLimitProblem, find_v_tensor, has_internal_tensors,
                     representability_report, tensor_bridge_terminal, weighted_limit_report)

SECTIONS = ("objects", "maps", "vcategories", "presheaves", "vfunctors", "vnats", "internal",
            "problems")
PROBLEM_KINDS = ("representability", "weighted-limit", "tensor", "terminal")


class DocumentError(Exception):
    """A parse, reference or validation failure, located by a field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class RunError(Exception):
    pass


# ---------------------------------------------------------------------------
# cell codec


def encode_cell(c):
    if isinstance(c, tuple):
        return [encode_cell(x) for x in c]
    if isinstance(c, str):
        if c.startswith("["):
            raise DocumentError("", f"label {c!r} starts with '['")
        return c
    raise DocumentError("", f"cannot encode label {c!r}")


def decode_cell(v, path=""):
    if isinstance(v, list):
        return tuple(decode_cell(x, path) for x in v)
    if isinstance(v, str):
        return v
    raise DocumentError(path, f"a label must be a string or an array, got {v!r}")


def cell_key(c) -> str:
    if isinstance(c, str):
        encode_cell(c)
        return c
    return json.dumps(encode_cell(c), separators=(",", ":"), ensure_ascii=False)


def parse_key(k: str, path=""):
    if k.startswith("["):
        try:
            return decode_cell(json.loads(k), path)
        except json.JSONDecodeError as exc:
            raise DocumentError(path, f"bad tuple key {k!r}") from exc
    return k


def _label_key(*labels) -> str:
    return ",".join(labels)


# ---------------------------------------------------------------------------
# maps forced by the axioms


def forced_map(V, dom, cod) -> Map | None:
    """The only map out of an empty object or into a point, if either applies."""
    if size(dom) == 0:
        return from_empty(dom, cod)
    if V.is_terminal_object(cod):
        return V.const(dom, V.global_elements(cod)[0])
    return None


def _is_point(V, X) -> bool:
    return size(X) > 0 and V.is_terminal_object(X)


def forced_comp(C_hom, V, a, b, c):
    return forced_map(V, V.product(C_hom[(a, b)], C_hom[(b, c)]).obj, C_hom[(a, c)])


def forced_ident(V, hom_aa):
    return forced_map(V, V.terminal(), hom_aa)


def forced_presheaf_ev(V, C: VCategory, on, a, b):
    h = C(a, b)
    f = forced_map(V, V.product(h, on[b]).obj, on[a])
    if f is None and a == b and _is_point(V, h):
        f = V.proj((h, on[b]), 1)
    return f


def forced_functor_hom(V, C: VCategory, D: VCategory, on, a, b):
    h = C(a, b)
    f = forced_map(V, h, D(on[a], on[b]))
    if f is None and a == b and _is_point(V, h):
        f = V.const(h, D.ident[on[a]])
    return f


def forced_weight_ev(V, I: VCategory, on, i, j):
    h = I(i, j)
    f = forced_map(V, V.product(on[i], h).obj, on[j])
    if f is None and i == j and _is_point(V, h):
        f = V.proj((on[i], h), 0)
    return f


# ---------------------------------------------------------------------------
# documents


@dataclass
class InstanceDocument:
    cosmos: object
    objects: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    vcategories: dict = field(default_factory=dict)
    presheaves: dict = field(default_factory=dict)
    vfunctors: dict = field(default_factory=dict)
    vnats: dict = field(default_factory=dict)
    internal: dict = field(default_factory=dict)    # name -> InternalCategory | InternalFunctor
    problems: dict = field(default_factory=dict)    # name -> resolved problem dict
    raw_internal: dict = field(default_factory=dict)
    raw_problems: dict = field(default_factory=dict)

    def same_entities(self, other: "InstanceDocument") -> bool:
        return all(getattr(self, s) == getattr(other, s)
                   for s in ("objects", "maps", "vcategories", "presheaves", "vfunctors",
                             "vnats", "internal", "raw_problems")) and self.cosmos is other.cosmos


def _require(cond, path, message):
    if not cond:
        raise DocumentError(path, message)


def _dict(v, path) -> dict:
    _require(isinstance(v, dict), path, "expected an object")
    return v


def _list(v, path) -> list:
    _require(isinstance(v, list), path, "expected an array")
    return v


def _no_problems(report, path, what):
    if report:
        raise DocumentError(path, f"invalid {what}: " + "; ".join(report))


class _Loader:
    def __init__(self, data: dict, V):
        self.data = data
        self.V = V
        self.cache: dict = {}
        self.busy: set = set()
        self.groths: dict = {}

    def named(self, section: str, name, path: str):
        table = self.data.get(section) or {}
        if not isinstance(name, str) or name not in table:
            raise DocumentError(path, f"unresolved reference {name!r} in {section}")
        key = (section, name)
        if key in self.cache:
            return self.cache[key]
        if key in self.busy:
            raise DocumentError(path, f"cyclic reference to {name!r}")
        self.busy.add(key)
        value = getattr(self, "_build_" + section)(table[name], f"{section}.{name}")
        self.busy.discard(key)
        self.cache[key] = value
        return value

    # objects --------------------------------------------------------------
    def obj(self, ref, path):
        if isinstance(ref, str):
            return self.named("objects", ref, path)
        ref = _dict(ref, path)
        if "product" in ref:
            factors = _list(ref["product"], path + ".product")
            return self.V.product_family(tuple(self.obj(r, f"{path}.product.{n}")
                                               for n, r in enumerate(factors))).obj
        return self._build_objects(ref, path)

    def _build_objects(self, spec, path):
        spec = _dict(spec, path)
        V = self.V
        if V is FINSET:
            _require("elements" in spec, path, "a finite set needs 'elements'")
            elts = [decode_cell(e, f"{path}.elements") for e in _list(spec["elements"], path)]
            try:
                X = FinSet(elts)
            except CosmosError as exc:
                raise DocumentError(path, str(exc)) from None
        else:
            for k in ("objects", "morphisms", "identities"):
                _require(k in spec, path, f"a finite category needs {k!r}")
            obs = [decode_cell(o, f"{path}.objects") for o in _list(spec["objects"], path)]
            mors = []
            for n, m in enumerate(_list(spec["morphisms"], path + ".morphisms")):
                m = _dict(m, f"{path}.morphisms.{n}")
                for k in ("name", "src", "tgt"):
                    _require(k in m, f"{path}.morphisms.{n}", f"missing {k!r}")
                mors.append(tuple(decode_cell(m[k], f"{path}.morphisms.{n}.{k}")
                                  for k in ("name", "src", "tgt")))
            names = {m[0] for m in mors}
            ident = {parse_key(k, path): decode_cell(v, f"{path}.identities.{k}")
                     for k, v in _dict(spec["identities"], path + ".identities").items()}
            comp = {}
            for k, v in _dict(spec.get("composition", {}), path + ".composition").items():
                comp[self._pair_key(k, names, f"{path}.composition")] = \
                    decode_cell(v, f"{path}.composition.{k}")
            src = {m[0]: m[1] for m in mors}
            tgt = {m[0]: m[2] for m in mors}
            for x, i in ident.items():
                for m in names:
                    if src.get(m) == x:
                        comp.setdefault((i, m), m)
                    if tgt.get(m) == x:
                        comp.setdefault((m, i), m)
            try:
                X = V.obj(obs, mors, ident, comp)
            except CosmosError as exc:
                raise DocumentError(path, str(exc)) from None
        _no_problems(V.validate_object(X), path, "object")
        return X

    @staticmethod
    def _pair_key(k, names, path):
        for n, ch in enumerate(k):
            if ch != ";":
                continue
            try:
                f, g = parse_key(k[:n], path), parse_key(k[n + 1:], path)
            except DocumentError:
                continue
            if f in names and g in names:
                return f, g
        raise DocumentError(path, f"cannot read {k!r} as a pair of morphisms")

    # maps -----------------------------------------------------------------
    def map(self, ref, path):
        if isinstance(ref, str):
            return self.named("maps", ref, path)
        return self._build_maps(ref, path)

    def _build_maps(self, spec, path):
        spec = _dict(spec, path)
        V = self.V
        if "identity" in spec:
            return V.identity(self.obj(spec["identity"], path + ".identity"))
        if "bang" in spec:
            return V.bang(self.obj(spec["bang"], path + ".bang"))
        if "from_empty" in spec:
            X, Y = _list(spec["from_empty"], path + ".from_empty")
            X, Y = self.obj(X, path + ".from_empty.0"), self.obj(Y, path + ".from_empty.1")
            _require(size(X) == 0, path, "from_empty needs an empty source")
            return from_empty(X, Y)
        if "projection" in spec:
            factors, n = _list(spec["projection"], path + ".projection")
            fs = tuple(self.obj(r, f"{path}.projection.0.{k}")
                       for k, r in enumerate(_list(factors, path)))
            _require(isinstance(n, int) and 0 <= n < len(fs), path, "bad projection index")
            return V.proj(fs, n)
        if "compose" in spec:
            parts = [self.map(r, f"{path}.compose.{n}")
                     for n, r in enumerate(_list(spec["compose"], path + ".compose"))]
            _require(parts, path, "compose needs at least one map")
            try:
                return V.compose(*parts)
            except CosmosError as exc:
                raise DocumentError(path, str(exc)) from None
        for k in ("dom", "cod"):
            _require(k in spec, path, f"a map needs {k!r}")
        dom, cod = self.obj(spec["dom"], path + ".dom"), self.obj(spec["cod"], path + ".cod")
        return self.table_map(dom, cod, spec, path)

    def table_map(self, dom, cod, spec, path):
        V = self.V
        if V is FINSET:
            on = _dict(spec.get("on", {}), path + ".on")
            f = Map(dom, cod, {parse_key(k, path): decode_cell(v, f"{path}.on.{k}")
                               for k, v in on.items()})
        else:
            ob = _dict(spec.get("on_objects", {}), path + ".on_objects")
            mor = _dict(spec.get("on_morphisms", {}), path + ".on_morphisms")
            f = Map(dom, cod,
                    {parse_key(k, path): decode_cell(v, f"{path}.on_objects.{k}")
                     for k, v in ob.items()},
                    {parse_key(k, path): decode_cell(v, f"{path}.on_morphisms.{k}")
                     for k, v in mor.items()})
        _no_problems(V.validate_map(f), path, "map")
        return f

    def boundary_map(self, ref, dom, cod, path):
        """A map reference whose boundary is known from context; tables may omit it."""
        if isinstance(ref, dict) and "dom" not in ref and ("on" in ref or "on_objects" in ref):
            return self.table_map(dom, cod, ref, path)
        f = self.map(ref, path)
        _require(f.dom == dom and f.cod == cod, path, "map has the wrong domain or codomain")
        return f

    def entry(self, table, key, dom, cod, forced, path):
        if key in table:
            return self.boundary_map(table[key], dom, cod, f"{path}.{key}")
        _require(forced is not None, f"{path}.{key}", "entry is missing and not determined")
        return forced

    # V-categories, presheaves, functors ------------------------------------
    def vcat(self, ref, path):
        return self.named("vcategories", ref, path)

    def _labels(self, v, path):
        out = []
        for n, a in enumerate(_list(v, path)):
            _require(isinstance(a, str) and a and "," not in a and not a.startswith("["),
                     f"{path}.{n}", "object labels are non-empty strings without commas")
            out.append(a)
        _require(len(set(out)) == len(out), path, "duplicate labels")
        return tuple(out)

    def _build_vcategories(self, spec, path):
        spec = _dict(spec, path)
        V = self.V
        obs = self._labels(spec.get("objects"), path + ".objects")
        homs = _dict(spec.get("hom"), path + ".hom")
        hom = {}
        for a in obs:
            for b in obs:
                k = _label_key(a, b)
                _require(k in homs, f"{path}.hom.{k}", "missing hom-object")
                hom[(a, b)] = self.obj(homs[k], f"{path}.hom.{k}")
        extra = set(homs) - {_label_key(a, b) for a in obs for b in obs}
        _require(not extra, path + ".hom", f"unknown entries {sorted(extra)}")
        comps = _dict(spec.get("comp", {}), path + ".comp")
        comp = {}
        for a in obs:
            for b in obs:
                for c in obs:
                    dom = V.product(hom[(a, b)], hom[(b, c)]).obj
                    comp[(a, b, c)] = self.entry(comps, _label_key(a, b, c), dom, hom[(a, c)],
                                                 forced_comp(hom, V, a, b, c), path + ".comp")
        ids = _dict(spec.get("id", {}), path + ".id")
        ident = {a: self.entry(ids, a, V.terminal(), hom[(a, a)], forced_ident(V, hom[(a, a)]),
                               path + ".id") for a in obs}
        C = VCategory(V, obs, hom, comp, ident)
        _no_problems(validate_vcategory(C), path, "V-category")
        return C

    def presheaf(self, ref, path):
        return self.named("presheaves", ref, path)

    def _object_of(self, C, a, path):
        _require(a in C.objects, path, f"unknown object {a!r}")
        return a

    def _build_presheaves(self, spec, path):
        spec = _dict(spec, path)
        V = self.V
        if "representable" in spec:
            Cref, c = _list(spec["representable"], path + ".representable")
            C = self.vcat(Cref, path + ".representable.0")
            return representable(C, self._object_of(C, c, path + ".representable.1"))
        C = self.vcat(spec.get("base"), path + ".base")
        ons = _dict(spec.get("on"), path + ".on")
        on = {}
        for a in C.objects:
            _require(a in ons, f"{path}.on.{a}", "missing value")
            on[a] = self.obj(ons[a], f"{path}.on.{a}")
        evs = _dict(spec.get("ev", {}), path + ".ev")
        ev = {}
        for a in C.objects:
            for b in C.objects:
                dom = V.product(C(a, b), on[b]).obj
                ev[(a, b)] = self.entry(evs, _label_key(a, b), dom, on[a],
                                        forced_presheaf_ev(V, C, on, a, b), path + ".ev")
        F = VPresheaf(C, on, ev)
        _no_problems(validate_presheaf(F), path, "presheaf")
        return F

    def vfunctor(self, ref, path):
        return self.named("vfunctors", ref, path)

    def _build_vfunctors(self, spec, path):
        spec = _dict(spec, path)
        V = self.V
        if "identity" in spec:
            return identity_vfunctor(self.vcat(spec["identity"], path + ".identity"))
        if "covariant_hom" in spec:
            Cref, a, Gref = _list(spec["covariant_hom"], path + ".covariant_hom")
            C = self.vcat(Cref, path + ".covariant_hom.0")
            G = self.vfunctor(Gref, path + ".covariant_hom.2")
            _require(G.target == C, path, "the functor does not land in the category")
            return covariant_hom(C, self._object_of(C, a, path + ".covariant_hom.1"), G)
        I = self.vcat(spec.get("source"), path + ".source")
        D = None if spec.get("target") is None else self.vcat(spec["target"], path + ".target")
        ons = _dict(spec.get("on"), path + ".on")
        on = {}
        for i in I.objects:
            _require(i in ons, f"{path}.on.{i}", "missing value")
            if D is None:
                on[i] = self.obj(ons[i], f"{path}.on.{i}")
            else:
                on[i] = self._object_of(D, ons[i], f"{path}.on.{i}")
        homs, ev = {}, {}
        table = _dict(spec.get("ev" if D is None else "homs", {}), path)
        for i in I.objects:
            for j in I.objects:
                k = _label_key(i, j)
                if D is None:
                    dom = V.product(on[i], I(i, j)).obj
                    ev[(i, j)] = self.entry(table, k, dom, on[j],
                                            forced_weight_ev(V, I, on, i, j), path + ".ev")
                else:
                    homs[(i, j)] = self.entry(table, k, I(i, j), D(on[i], on[j]),
                                              forced_functor_hom(V, I, D, on, i, j),
                                              path + ".homs")
        F = VFunctor(I, D, on, homs=homs, ev=ev)
        _no_problems(validate_vfunctor(F), path, "V-functor")
        return F

    def _functorish(self, ref, path):
        if isinstance(ref, str) and ref in (self.data.get("presheaves") or {}):
            return self.presheaf(ref, path)
        return self.vfunctor(ref, path)

    def _build_vnats(self, spec, path):
        spec = _dict(spec, path)
        F = self._functorish(spec.get("source"), path + ".source")
        G = self._functorish(spec.get("target"), path + ".target")
        comps = _dict(spec.get("components"), path + ".components")
        base = F.base if isinstance(F, VPresheaf) else F.source
        out = {}
        for a in base.objects:
            _require(a in comps, f"{path}.components.{a}", "missing component")
            out[a] = self.boundary_map(comps[a], F.on[a], G.on[a], f"{path}.components.{a}")
        alpha = VNat(F, G, out)
        _no_problems(validate_vnat(alpha), path, "transformation")
        return alpha

    # internal categories and functors ---------------------------------------
    def groth_of(self, ref, path):
        F = self.presheaf(ref, path)
        if ref not in self.groths:
            self.groths[ref] = groth(F.base, F)
        return self.groths[ref]

    def internal(self, ref, path):
        return self.named("internal", ref, path)

    def internal_category(self, ref, path):
        A = self.internal(ref, path)
        _require(isinstance(A, InternalCategory), path, f"{ref!r} is not an internal category")
        return A

    def _build_internal(self, spec, path):
        spec = _dict(spec, path)
        _require(len(spec) == 1, path, "an internal entry has exactly one constructor")
        (kind, arg), = spec.items()
        p = f"{path}.{kind}"
        if kind == "cst":
            return cst(self.obj(arg, p), self.V)
        if kind == "int":
            return internalize(self.vcat(arg, p))
        if kind == "groth":
            return self.groth_of(arg, p).total
        if kind == "projection":
            return self.groth_of(arg, p).projection
        if kind == "functor":
            arg = _dict(arg, p)
            A = self.internal_category(arg.get("source"), p + ".source")
            B = self.internal_category(arg.get("target"), p + ".target")
            H0 = self.boundary_map(arg.get("H0"), A.A0, B.A0, p + ".H0")
            H1 = self.boundary_map(arg.get("H1"), A.A1, B.A1, p + ".H1")
            H = InternalFunctor(A, B, H0, H1)
            _no_problems(validate_internal_functor(H), p, "internal functor")
            return H
        raise DocumentError(path, f"unknown internal constructor {kind!r}")

    # problems -----------------------------------------------------------------
    def _build_problems(self, spec, path):
        spec = _dict(spec, path)
        kind = spec.get("kind")
        _require(kind in PROBLEM_KINDS, path + ".kind", f"kind must be one of {PROBLEM_KINDS}")
        V = self.V
        out = {"kind": kind}
        if kind == "representability":
            F = self.presheaf(spec.get("presheaf"), path + ".presheaf")
            out["presheaf"] = F
            if "object" in spec:
                c = self._object_of(F.base, spec["object"], path + ".object")
                _require("element" in spec, path, "an object needs an element")
                x = decode_cell(spec["element"], path + ".element")
                _require(x in cells(F.on[c]) and x in _points(F.on[c]), path + ".element",
                         f"{x!r} is not an element of the value at {c!r}")
                out["object"], out["element"] = c, V.point(F.on[c], x)
        elif kind == "weighted-limit":
            C = self.vcat(spec.get("vcategory"), path + ".vcategory")
            G = self.vfunctor(spec.get("diagram"), path + ".diagram")
            W = self.vfunctor(spec.get("weight"), path + ".weight")
            _require(G.target == C, path + ".diagram", "the diagram does not land in the category")
            _require(W.into_v and W.source == G.source, path + ".weight",
                     "the weight must be a functor into V on the shape of the diagram")
            L = self._object_of(C, spec.get("apex"), path + ".apex")
            out.update(C=C, G=G, W=W, L=L, lam=None)
            if "cone" in spec:
                cone = _dict(spec["cone"], path + ".cone")
                lam = {}
                for i in W.source.objects:
                    _require(i in cone, f"{path}.cone.{i}", "missing cone component")
                    lam[i] = self.boundary_map(cone[i], W.on[i], C(L, G.on[i]),
                                               f"{path}.cone.{i}")
                try:
                    out["lam"] = WeightedLimitProblem(C, G, W, L, lam).lam
                except CosmosError as exc:
                    raise DocumentError(path + ".cone", str(exc)) from None
        elif kind == "tensor":
            X = self.obj(spec.get("by"), path + ".by")
            out["by"] = X
            if "internal" in spec:
                out["internal"] = self.internal_category(spec["internal"], path + ".internal")
            else:
                C = self.vcat(spec.get("vcategory"), path + ".vcategory")
                out["vcategory"] = C
                out["object"] = self._object_of(C, spec.get("object"), path + ".object")
        elif kind == "terminal":
            A = self.internal_category(spec.get("internal"), path + ".internal")
            x = decode_cell(spec.get("element"), path + ".element")
            _require(x in _points(A.A0), path + ".element", f"{x!r} is not an object of A0")
            out["internal"], out["element"] = A, x
        return out


def _points(X) -> tuple:
    return X.elements if isinstance(X, FinSet) else X.objects


def parse(text: str) -> InstanceDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    data = _dict(data, "document")
    unknown = set(data) - set(SECTIONS) - {"cosmos"}
    _require(not unknown, "document", f"unknown keys {sorted(unknown)}")
    try:
        V = cosmos_for(data.get("cosmos"))
    except CosmosError as exc:
        raise DocumentError("cosmos", str(exc)) from None
    for s in SECTIONS:
        if s in data:
            _dict(data[s], s)
    ld = _Loader(data, V)
    doc = InstanceDocument(V)
    for section, attr in zip(SECTIONS, ("objects", "maps", "vcategories", "presheaves",
                                        "vfunctors", "vnats", "internal", "problems")):
        for name in data.get(section) or {}:
            getattr(doc, attr)[name] = ld.named(section, name, f"{section}.{name}")
    doc.raw_internal = dict(data.get("internal") or {})
    doc.raw_problems = dict(data.get("problems") or {})
    return doc


# ---------------------------------------------------------------------------
# emitting documents


class _Emitter:
    def __init__(self, doc: InstanceDocument):
        self.doc = doc
        self.V = doc.cosmos
        self.names = {}
        for name, X in sorted(doc.objects.items()):
            self.names.setdefault(X, name)

    def obj_spec(self, X) -> dict:
        if isinstance(X, FinSet):
            return {"elements": [encode_cell(x) for x in X.elements]}
        ids = {X.ident[o] for o in X.objects}
        return {"objects": [encode_cell(o) for o in X.objects],
                "morphisms": [{"name": encode_cell(m), "src": encode_cell(X.src[m]),
                               "tgt": encode_cell(X.tgt[m])} for m in X.morphisms],
                "identities": {cell_key(o): encode_cell(X.ident[o]) for o in X.objects},
                "composition": {f"{cell_key(f)};{cell_key(g)}": encode_cell(h)
                                for (f, g), h in X.comp.items()
                                if f not in ids and g not in ids}}

    def obj(self, X):
        return self.names.get(X) or self.obj_spec(X)

    def table(self, f: Map) -> dict:
        if f.mor is None:
            return {"on": {cell_key(x): encode_cell(f.ob[x]) for x in f.dom.elements}}
        return {"on_objects": {cell_key(x): encode_cell(f.ob[x]) for x in f.dom.objects},
                "on_morphisms": {cell_key(m): encode_cell(f.mor[m]) for m in f.dom.morphisms}}

    def map(self, f: Map) -> dict:
        return {"dom": self.obj(f.dom), "cod": self.obj(f.cod), **self.table(f)}

    @staticmethod
    def _entries(table: dict, forced) -> dict:
        """Entries that the parser could not recover by itself."""
        return {k: v for k, v in table.items() if forced(k) is None or forced(k) != v}

    def vcat(self, C: VCategory) -> dict:
        V = self.V
        comp = self._entries(C.comp, lambda k: forced_comp(C.hom, V, *k))
        ident = self._entries(C.ident, lambda a: forced_ident(V, C(a, a)))
        return {"objects": list(C.objects),
                "hom": {_label_key(*k): self.obj(h) for k, h in C.hom.items()},
                "comp": {_label_key(*k): self.table(f) for k, f in comp.items()},
                "id": {a: self.table(f) for a, f in ident.items()}}

    def ref(self, section: str, entity) -> str:
        for name, e in sorted(getattr(self.doc, section).items()):
            if e == entity:
                return name
        raise DocumentError(section, "an entity refers to something without a name")

    def presheaf(self, F: VPresheaf) -> dict:
        V, C = self.V, F.base
        ev = self._entries(F.ev, lambda k: forced_presheaf_ev(V, C, F.on, *k))
        return {"base": self.ref("vcategories", C),
                "on": {a: self.obj(X) for a, X in F.on.items()},
                "ev": {_label_key(*k): self.table(f) for k, f in ev.items()}}

    def vfunctor(self, F: VFunctor) -> dict:
        V, I = self.V, F.source
        out = {"source": self.ref("vcategories", I)}
        if F.into_v:
            ev = self._entries(F.ev, lambda k: forced_weight_ev(V, I, F.on, *k))
            out.update(target=None, on={i: self.obj(X) for i, X in F.on.items()},
                       ev={_label_key(*k): self.table(f) for k, f in ev.items()})
        else:
            D = F.target
            homs = self._entries(F.homs, lambda k: forced_functor_hom(V, I, D, F.on, *k))
            out.update(target=self.ref("vcategories", D), on=dict(F.on),
                       homs={_label_key(*k): self.table(f) for k, f in homs.items()})
        return out

    def vnat(self, alpha: VNat) -> dict:
        def side(F):
            return self.ref("presheaves" if isinstance(F, VPresheaf) else "vfunctors", F)
        return {"source": side(alpha.source), "target": side(alpha.target),
                "components": {a: self.table(f) for a, f in alpha.components.items()}}

    def document(self) -> dict:
        d = self.doc
        return {"cosmos": self.V.tag,
                "objects": {n: self.obj_spec(X) for n, X in d.objects.items()},
                "maps": {n: self.map(f) for n, f in d.maps.items()},
                "vcategories": {n: self.vcat(C) for n, C in d.vcategories.items()},
                "presheaves": {n: self.presheaf(F) for n, F in d.presheaves.items()},
                "vfunctors": {n: self.vfunctor(F) for n, F in d.vfunctors.items()},
                "vnats": {n: self.vnat(a) for n, a in d.vnats.items()},
                "internal": d.raw_internal,
                "problems": d.raw_problems}


def emit_document(doc: InstanceDocument) -> str:
    """Canonical JSON text; ``parse`` of it reproduces every entity of ``doc``."""
    return json.dumps(_Emitter(doc).document(), sort_keys=True, indent=2,
                      ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# reports


def emit(report: dict, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    lines = []

    def walk(prefix, v):
        if isinstance(v, dict) and v:
            for k in sorted(v):
                walk(f"{prefix}.{k}" if prefix else str(k), v[k])
        else:
            lines.append(f"{prefix}: {_scalar(v)}")
    walk("", report)
    return "\n".join(lines) + "\n"


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"), ensure_ascii=False) \
            if v else "none"
    return str(v)


def _probe_name(V, X, n) -> str:
    if V.is_terminal_object(X):
        return "terminal"
    if V is FINCAT and X == FINCAT.arrow():
        return "arrow"
    return f"probe{n}"


def _outcomes(outcomes: dict) -> tuple:
    """Route table, the agreed verdict, and whether the applicable routes agree."""
    table = {k: v.value for k, v in outcomes.items()}
    applicable = {v for v in outcomes.values() if v is not Outcome.NOT_APPLICABLE}
    if len(applicable) != 1:
        return table, None, bool(not applicable)
    return table, applicable.pop() is Outcome.TRUE, True


def _route_verdict(result: dict, outcomes: dict, methods) -> dict:
    table, verdict, agree = _outcomes(outcomes)
    result["routes"] = table
    if not agree:
        result["error"] = "routes disagree"
    elif verdict is None:
        result["error"] = "no requested route is applicable: " + ", ".join(sorted(table))
    else:
        result["verdict"] = verdict
    return result


def run_representability(p: dict, methods=None, search=False) -> dict:
    F = p["presheaf"]
    V = F.base.cosmos
    if search or "object" not in p:
        reps = find_representations(F)
        result = {"mode": "search",
                  "representations": [[e.obj, cell_key(V.point_label(e.point))] for e in reps],
                  "verdict": bool(reps)}
        result["summary"] = "no representation" if not reps else "represented by " + ", ".join(
            f"{c} at {x}" for c, x in result["representations"])
        return result
    c, x = p["object"], p["element"]
    result = {"mode": "candidate", "object": c, "element": cell_key(V.point_label(x))}
    return _route_verdict(result, representability_report(F, c, x, methods), methods)


def _cone_table(lam: dict) -> dict:
    return {i: {cell_key(w): cell_key(f.ob[w]) for w in _points(f.dom)}
            for i, f in lam.items()}


def run_weighted_limit(p: dict, methods=None, search=False) -> dict:
    from .testkit import cones_at
    C, G, W, L = p["C"], p["G"], p["W"], p["L"]
    if p["lam"] is not None and not search:
        prob = WeightedLimitProblem(C, G, W, L, p["lam"])
        result = {"mode": "candidate", "apex": L, "cone": _cone_table(p["lam"])}
        return _route_verdict(result, weighted_limit_report(prob, methods), methods)
    cones = cones_at(W, G, L)
    per_route = {name: [] for name in methods or WEIGHTED_ROUTES}
    limiting = []
    for n, lam in enumerate(cones):
        report = weighted_limit_report(WeightedLimitProblem(C, G, W, L, lam), methods)
        for name, o in report.items():
            per_route[name].append(o)
        _, verdict, agree = _outcomes(report)
        if not agree:
            return {"mode": "search", "apex": L, "error": f"routes disagree on cone {n}"}
        if verdict:
            limiting.append(n)
    outcomes = {}
    for name, os_ in per_route.items():
        if os_ and all(o is Outcome.NOT_APPLICABLE for o in os_):
            outcomes[name] = Outcome.NOT_APPLICABLE
        else:
            outcomes[name] = Outcome.TRUE if Outcome.TRUE in os_ else Outcome.FALSE
    result = {"mode": "search", "apex": L, "cones": len(cones)}
    if limiting:
        result["cone"] = _cone_table(cones[limiting[0]])
    return _route_verdict(result, outcomes, methods)


def run_tensor(p: dict) -> dict:
    X = p["by"]
    if "internal" in p:
        found = has_internal_tensors(p["internal"], X)
        return {"scope": "internal", "verdict": found.holds,
                "diagrams": len(found.witnesses),
                "missing": sum(w is None for w in found.witnesses.values())}
    C, c = p["vcategory"], p["object"]
    w = find_v_tensor(C, c, X)
    result = {"scope": "enriched", "object": c, "verdict": w is not None}
    if w is not None:
        result["tensor"] = w.candidate
        result["unit"] = {cell_key(x): cell_key(w.unit.ob[x]) for x in _points(X)}
    return result


def run_terminal(p: dict) -> dict:
    A, x = p["internal"], p["element"]
    V = A.cosmos
    b = tensor_bridge_terminal(A, V.point(A.A0, x))
    probes = list(V.generators().probes)
    name = {X: _probe_name(V, X, n) for n, X in enumerate(probes)}
    return {"element": cell_key(x),
            "internal_terminal": b.internal,
            "v_terminal_in_und": b.und,
            "shifted": {name[X]: v for X, v in b.shifted.items()},
            "tensor_hypotheses": {name[X]: v for X, v in b.hypotheses.items()},
            "expected_divergence": b.expected_divergence,
            "violation": b.violation,
            "verdict": b.internal}


def run_problem(p: dict, methods=None, search=False) -> dict:
    kind = p["kind"]
    try:
        if kind == "representability":
            out = run_representability(p, methods, search)
        elif kind == "weighted-limit":
            out = run_weighted_limit(p, methods, search)
        elif kind == "tensor":
            out = run_tensor(p)
        else:
            out = run_terminal(p)
    except HypothesisNotMet as exc:
        out = {"error": f"hypothesis not met: {exc}"}
    out["kind"] = kind
    return out


# ---------------------------------------------------------------------------
# commands


def _select(doc: InstanceDocument, kind: str | None, name: str | None) -> dict:
    if name is not None:
        if name not in doc.problems:
            raise RunError(f"no problem named {name!r}")
        if kind is not None and doc.problems[name]["kind"] != kind:
            raise RunError(f"problem {name!r} is not of kind {kind!r}")
        return {name: doc.problems[name]}
    chosen = {n: p for n, p in doc.problems.items() if p["kind"] == kind}
    if not chosen:
        raise RunError(f"the document has no {kind} problems")
    return chosen


def _methods(arg, table) -> tuple | None:
    if arg in (None, "all"):
        return None
    if arg not in table:
        raise RunError(f"unknown method {arg!r}")
    return (arg,)


def _named(table: dict, name, what) -> dict:
    if name is None:
        return dict(table)
    if name not in table:
        raise RunError(f"no {what} named {name!r}")
    return {name: table[name]}


def _functors(doc: InstanceDocument, name) -> dict:
    fs = {n: H for n, H in doc.internal.items() if isinstance(H, InternalFunctor)}
    chosen = _named(fs, name, "internal functor")
    if not chosen:
        raise RunError("the document has no internal functors")
    return chosen


def cmd_validate(doc, args) -> dict:
    counts = {s: len(getattr(doc, s)) for s in ("objects", "maps", "vcategories", "presheaves",
                                                "vfunctors", "vnats", "internal", "problems")}
    problems = {}
    for name, A in doc.internal.items():
        rep = validate_internal(A) if isinstance(A, InternalCategory) \
            else validate_internal_functor(A)
        if rep:
            problems[name] = rep
    return {"entities": counts, "results": {"document": {
        "verdict": not problems, **({"errors": problems} if problems else {})}}}


def cmd_groth(doc, args) -> dict:
    results = {}
    for name, F in _named(doc.presheaves, args.presheaf, "presheaf").items():
        g = groth(F.base, F)
        valid = not is_valid_groth(g)
        fib = is_discrete_fibration(g.projection).certificate
        results[name] = {"objects": size(g.total.A0), "arrows": size(g.total.A1),
                         "valid": valid, "projection_is_fibration": fib, "verdict": valid and fib}
    return {"results": results}


def cmd_fibration(doc, args) -> dict:
    results = {}
    for name, H in _functors(doc, args.functor).items():
        packet = is_discrete_fibration(H, dual=args.dual)
        results[name] = {"verdict": packet.certificate, "over_int": packet.fibers is not None,
                         "variant": "opfibration" if args.dual else "fibration"}
    return {"results": results}


def cmd_fiber(doc, args) -> dict:
    results = {}
    for name, H in _functors(doc, args.functor).items():
        packet = is_discrete_fibration(H)
        r = {"verdict": packet.certificate}
        if packet.fibers is not None:
            r["fibers"] = {a: [cell_key(x) for x in cells(X)]
                           for a, (X, _) in packet.fibers.items()
                           if args.object is None or a == args.object}
        elif packet.certificate:
            r["error"] = "fibers need a target of the form Int C"
        results[name] = r
    return {"results": results}


def cmd_roundtrip(doc, args) -> dict:
    results = {}
    for name, F in _named(doc.presheaves, args.presheaf, "presheaf").items():
        g = groth(F.base, F)
        eta = unit_eta(F, g)
        eps = counit_epsilon(is_discrete_fibration(g.projection), g)
        results[name] = {"unit": eta.certificate, "counit": eps.certificate,
                         "verdict": eta.certificate and eps.certificate}
    return {"results": results}


def _problem_command(kind, methods_table=None):
    def run(doc, args):
        methods = _methods(getattr(args, "method", None), methods_table) if methods_table else None
        chosen = _select(doc, kind, args.problem)
        return {"results": {n: run_problem(p, methods, getattr(args, "search", False))
                            for n, p in chosen.items()}}
    return run


def cmd_check(doc, args) -> dict:
    if args.problem is None:
        raise RunError("check needs --problem")
    p = _select(doc, None, args.problem)[args.problem]
    table = REPRESENTABILITY_ROUTES if p["kind"] == "representability" else WEIGHTED_ROUTES
    methods = _methods(args.method, table) if p["kind"] in ("representability",
                                                            "weighted-limit") else None
    return {"results": {args.problem: run_problem(p, methods, args.search)}}


HELP = {
    "validate": "check every entity of a document against its laws",
    "groth": "build the internal category of elements of a presheaf",
    "fibration": "test whether an internal functor is a discrete fibration",
    "fiber": "list the fibers of a discrete fibration",
    "terminal": "compare internal and enriched terminality of an element",
    "representable": "decide representability problems route by route",
    "weighted-limit": "decide weighted-limit problems route by route",
    "tensor": "search for tensors by an object",
    "roundtrip": "check the unit and counit between presheaves and fibrations",
    "check": "run one named problem of any kind",
    "gen": "emit a generated document",
}

COMMANDS = {
    "validate": cmd_validate,
    "groth": cmd_groth,
    "fibration": cmd_fibration,
    "fiber": cmd_fiber,
    "terminal": _problem_command("terminal"),
    "representable": _problem_command("representability", REPRESENTABILITY_ROUTES),
    "weighted-limit": _problem_command("weighted-limit", WEIGHTED_ROUTES),
    "tensor": _problem_command("tensor"),
    "roundtrip": cmd_roundtrip,
    "check": cmd_check,
}


def exit_code(report: dict) -> int:
    results = report.get("results", {}).values()
    if any("error" in r for r in results):
        return 2
    return 0 if all(r.get("verdict") for r in results) else 1


def run(command: str, doc: InstanceDocument, args) -> dict:
    report = COMMANDS[command](doc, args)
    report["command"] = command
    report["cosmos"] = doc.cosmos.tag
    verdicts = [r.get("verdict") for r in report["results"].values()]
    report["verdict"] = "error" if exit_code(report) == 2 else \
        ("true" if all(verdicts) else "false")
    return report


# ---------------------------------------------------------------------------
# generated documents


def generated_document(seed: int, cap: int, cosmos: str) -> InstanceDocument:
    from .testkit import GenConfig, gen_presheaf, gen_vcategory
    cfg = GenConfig(seed, cosmos, max_cells=cap)
    C = gen_vcategory(cfg)
    F = gen_presheaf(cfg, C)
    doc = InstanceDocument(cfg.V)
    seen = []
    for X in list(C.hom.values()) + list(F.on.values()):
        if X not in seen:
            seen.append(X)
    doc.objects = {f"X{n}": X for n, X in enumerate(seen)}
    doc.vcategories = {"C": C}
    doc.presheaves = {"F": F}
    doc.raw_problems = {"rep:F": {"kind": "representability", "presheaf": "F"}}
    doc.problems = {"rep:F": {"kind": "representability", "presheaf": F}}
    return doc


# ---------------------------------------------------------------------------
# entry point


def fixtures_dir() -> Path:
    return Path(str(resources.files("enrint") / "fixtures"))


def resolve_document(path: str, fixtures: str | None) -> Path:
    p = Path(path)
    candidates = [p, p.with_name(p.name + ".json")]
    base = Path(fixtures) if fixtures else fixtures_dir()
    candidates += [base / p.name, base / (p.name + ".json")]
    for c in candidates:
        if c.is_file():
            return c
    raise RunError(f"cannot find document {path!r}")


def load(path: str, fixtures: str | None = None) -> InstanceDocument:
    return parse(resolve_document(path, fixtures).read_text(encoding="utf-8"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="enrint", description="Finite enriched and internal "
                                 "category theory: deciders and constructions.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", choices=("json", "text"), default="text")
    common.add_argument("--fixtures", default=None, help="directory searched for documents")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common], help=HELP[name])
        sp.add_argument("document")
        sp.add_argument("--problem")
        if name in ("representable", "weighted-limit", "check"):
            choices = (tuple(WEIGHTED_ROUTES) if name != "representable"
                       else tuple(REPRESENTABILITY_ROUTES)) + ("all",)
            sp.add_argument("--method", choices=choices, default="all")
            sp.add_argument("--search", action="store_true",
                            help="ignore a given candidate and search all of them")
        if name in ("groth", "roundtrip"):
            sp.add_argument("--presheaf")
        if name in ("fibration", "fiber"):
            sp.add_argument("--functor")
        if name == "fibration":
            sp.add_argument("--dual", action="store_true", help="test for a discrete opfibration")
        if name == "fiber":
            sp.add_argument("--object")
    gp = sub.add_parser("gen", parents=[common], help=HELP["gen"])
    gp.add_argument("--seed", type=int, default=0)
    gp.add_argument("--cap", type=int, default=6, help="most cells per generated object")
    gp.add_argument("--cosmos", choices=("finset", "fincat"), default="finset")
    rp = sub.add_parser("roundtrip-document", parents=[common],
                        help="re-emit a document in canonical form")
    rp.add_argument("document")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout
    try:
        if args.command == "gen":
            out.write(emit_document(generated_document(args.seed, args.cap, args.cosmos)))
            return 0
        doc = load(args.document, args.fixtures)
        if args.command == "roundtrip-document":
            out.write(emit_document(doc))
            return 0
        report = run(args.command, doc, args)
    except (DocumentError, RunError, CosmosError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out.write(emit(report, args.report))
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
