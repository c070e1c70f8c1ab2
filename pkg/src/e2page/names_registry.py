"""Classical chart names and cell names ``a[n]`` bound to computed classes.

Fixture lines look like::

    name | complex | s | t | selector | provenance

``selector`` is one of

* ``unique``: the bidegree is one-dimensional; the name is its nonzero class.
* ``product h_2*n``: a product of other names (any monomial syntax works).
* ``mod h_0^4h_5, ...``: an indecomposable known only modulo the listed
  classes; the bidegree must be exactly one dimension bigger than their span.
* ``indecomposable``: the bidegree is one dimension bigger than the span of
  all products landing in it; the name is that quotient line.
* ``coords 0110``: explicit coordinates in the canonical basis.
* ``word (9) 3 5 7``: a Lambda cocycle, resolved in the Lambda model.

Sphere monomials such as ``h_0^2h_2h_5`` or ``Ph_1^2h_5`` are parsed by
longest match against registered names; ``Ph_1^k`` means ``Ph_1·h_1^{k-1}``.
A name ``a[n]`` on a complex is the class detected by ``a`` on cell ``n``,
reduced against the lower filtration.
"""
from __future__ import annotations

import difflib
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import complexes as cx
from .ext_engine import (ExtClass, ExtEngine, LambdaExt, ah_lift, gf2_rank, in_span, make_class,
                         rref)
from .products import Products

PROVENANCES = ("published", "curated-fixture", "derived")


class UnknownName(KeyError):
    pass


class AmbiguousName(ValueError):
    pass


@dataclass(frozen=True)
class NameEntry:
    name: str
    complex: cx.ComplexSpec
    s: int
    t: int
    selector: str
    provenance: str
    line: int = 0

    @property
    def stem(self) -> int:
        return self.t - self.s


@dataclass
class Resolved:
    """A named class: canonical vector plus the span it is only defined modulo."""

    name: str
    cls: ExtClass
    ambiguity: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        return self.cls.vector

    def elements(self) -> list:
        rows = self.ambiguity
        out = []
        for mask in range(1 << len(rows)):
            v = self.vector.copy()
            for k in range(len(rows)):
                if mask >> k & 1:
                    v ^= rows[k]
            out.append(v)
        return out

    def contains(self, vec) -> bool:
        diff = np.asarray(vec, np.uint8) ^ self.vector
        return in_span(self.ambiguity, diff) if len(self.ambiguity) else not diff.any()


# ---------------------------------------------------------------------------
# fixture files


def parse_fixture(text: str, source: str = "<fixture>") -> list[NameEntry]:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 6:
            raise ValueError(f"{source}:{lineno}: expected 6 fields, got {len(parts)}")
        name, complex_name, s, t, selector, prov = parts
        if prov not in PROVENANCES:
            raise ValueError(f"{source}:{lineno}: provenance must be one of {PROVENANCES}")
        try:
            spec = cx.builtin(complex_name)
        except cx.ComplexSpecError as exc:
            raise ValueError(f"{source}:{lineno}: {exc}") from None
        entries.append(NameEntry(name, spec, int(s), int(t), selector, prov, lineno))
    return entries


def default_fixture() -> list[NameEntry]:
    text = resources.files("e2page").joinpath("data/names.txt").read_text()
    return parse_fixture(text, "names.txt")


def load_fixture(path) -> list[NameEntry]:
    return parse_fixture(Path(path).read_text(), str(path))


_AH = re.compile(r"^(?P<base>.+)\[(?P<cell>\d+)\]$")
_EXP = re.compile(r"\^(\{(\d+)\}|(\d+))")


class Registry:
    def __init__(self, engine: ExtEngine, entries=None, products: Products | None = None):
        self.engine = engine
        self.products = products or Products(engine)
        self.entries = list(default_fixture() if entries is None else entries)
        self._by_name: dict = {}
        self.duplicates: list = []
        for e in self.entries:
            key = (e.name, e.complex)
            if key in self._by_name:
                self.duplicates.append(e)
            else:
                self._by_name[key] = e
        self._cache: dict = {}
        self._lambda: dict = {}
        self._busy: set = set()

    # -- lookup ----------------------------------------------------------
    def names(self, spec=None) -> list[str]:
        return [e.name for e in self.entries if spec is None or e.complex == spec]

    def entry(self, name: str, spec=None) -> NameEntry | None:
        return self._by_name.get((name, spec or cx.sphere(0)))

    def resolve(self, name: str, spec: cx.ComplexSpec | None = None) -> ExtClass:
        """Canonical class named ``name`` (on the sphere unless ``spec`` is given)."""
        return self.resolve_coset(name, spec).cls

    def resolve_coset(self, name: str, spec: cx.ComplexSpec | None = None) -> Resolved:
        spec = spec or cx.sphere(0)
        key = (name, spec)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if key in self._busy:
            raise AmbiguousName(f"name {name!r} is defined in terms of itself")
        self._busy.add(key)
        try:
            res = self._resolve(name, spec)
        finally:
            self._busy.discard(key)
        self._cache[key] = res
        return res

    def _resolve(self, name, spec) -> Resolved:
        entry = self._by_name.get((name, spec))
        if entry is not None:
            return self._from_entry(entry)
        m = _AH.match(name)
        if m and spec.kind != cx.SPHERE:
            return self.cell_name(m.group("base"), int(m.group("cell")), spec)
        if spec.kind == cx.SPHERE and spec.shift == 0:
            return self.monomial(name)
        if m and spec.kind == cx.SPHERE and int(m.group("cell")) == spec.shift:
            return self.cell_name(m.group("base"), spec.shift, spec)
        raise UnknownName(self._unknown(name, spec))

    def _unknown(self, name, spec) -> str:
        near = difflib.get_close_matches(name, self.names(), n=4)
        hint = f"; close matches: {', '.join(near)}" if near else ""
        return f"unknown name {name!r} on {spec.label}{hint}"

    # -- selectors ---------------------------------------------------------
    def _from_entry(self, e: NameEntry) -> Resolved:
        dim = self.engine.ext_dim(e.complex, e.s, e.t)
        kind, _, arg = e.selector.partition(" ")
        arg = arg.strip()
        empty = np.zeros((0, dim), np.uint8)
        if kind == "unique":
            if dim != 1:
                raise AmbiguousName(
                    f"{e.name}: bidegree (s,t)=({e.s},{e.t}) of {e.complex.label} has dimension {dim}, "
                    "so 'unique' does not pick a class")
            return self._named(e.name, e.complex, e.s, e.t, np.ones(1, np.uint8), empty)
        if kind == "product":
            r = None
            for part in arg.split("*"):
                f = self.monomial(part.strip(), spec=e.complex, exclude=e.name)
                r = f if r is None else self._times(r, f)
            self._check_bidegree(e, r.cls)
            return Resolved(e.name, _rename(r.cls, e.name), r.ambiguity)
        if kind == "mod":
            dec = []
            for part in arg.split(","):
                r = self.monomial(part.strip(), spec=e.complex, exclude=e.name)
                self._check_bidegree(e, r.cls)
                dec.extend([r.vector, *r.ambiguity])
            span = rref(np.array(dec, np.uint8)) if dec else empty
            span = span[span.any(axis=1)] if len(span) else empty
            if dim != len(span) + 1:
                raise AmbiguousName(
                    f"{e.name}: bidegree (s,t)=({e.s},{e.t}) has dimension {dim} but the listed "
                    f"classes span {len(span)}; the name needs a one-dimensional quotient")
            for k in range(dim):
                v = np.eye(dim, dtype=np.uint8)[k]
                if not in_span(span, v):
                    return self._named(e.name, e.complex, e.s, e.t, _reduce_rows(span, v), span)
        if kind == "indecomposable":
            span = self.decomposables(e.s, e.t)
            if dim != len(span) + 1:
                raise AmbiguousName(
                    f"{e.name}: bidegree (s,t)=({e.s},{e.t}) has dimension {dim} with "
                    f"{len(span)} decomposable dimensions; no single indecomposable")
            for k in range(dim):
                v = np.eye(dim, dtype=np.uint8)[k]
                if not in_span(span, v):
                    return self._named(e.name, e.complex, e.s, e.t, _reduce_rows(span, v), span)
        if kind == "coords":
            bits = np.array([int(c) for c in arg], np.uint8)
            if len(bits) != dim:
                raise AmbiguousName(f"{e.name}: {len(bits)} coordinates for a {dim}-dimensional group")
            return self._named(e.name, e.complex, e.s, e.t, bits, empty)
        if kind == "word":
            return self._from_word(e, arg)
        raise ValueError(f"{e.name}: unknown selector {e.selector!r}")

    def _named(self, name, spec, s, t, vec, amb) -> Resolved:
        return Resolved(name, make_class(spec, s, t, vec, name=name), amb)

    @staticmethod
    def _check_bidegree(e: NameEntry, cls: ExtClass) -> None:
        if (cls.s, cls.t) != (e.s, e.t):
            raise AmbiguousName(f"{e.name}: selector lands in ({cls.s},{cls.t}), entry says ({e.s},{e.t})")

    def _from_word(self, e: NameEntry, text: str) -> Resolved:
        model = self._lambda.get(e.complex)
        if model is None:
            model = self._lambda[e.complex] = LambdaExt(e.complex)
        c = cx.cochain(e.complex, text)
        if (c.s, c.t) != (e.s, e.t):
            raise AmbiguousName(f"{e.name}: word lies in ({c.s},{c.t}), entry says ({e.s},{e.t})")
        coords = model.class_of(c)
        if coords is None:
            raise AmbiguousName(f"{e.name}: {text} is not a cocycle")
        cls = ExtClass(e.complex, e.s, e.t, tuple(int(v) for v in coords),
                       ah_filtration=c.leading_cell, name=e.name, representative=c)
        return Resolved(e.name, cls, np.zeros((0, len(coords)), np.uint8))

    def decomposables(self, s: int, t: int) -> np.ndarray:
        """RREF basis of all products landing in Ext^{s,t}(S^0)."""
        sphere = cx.sphere(0)
        dim = self.engine.ext_dim(sphere, s, t)
        rows = []
        for s1 in range(1, s // 2 + 1):
            for t1 in range(s1, t - s1 + 1):
                s2, t2 = s - s1, t - t1
                if t2 < s2:
                    continue
                n1 = self.engine.ext_dim(sphere, s1, t1)
                n2 = self.engine.ext_dim(sphere, s2, t2)
                for i in range(n1):
                    a = make_class(sphere, s1, t1, np.eye(n1, dtype=np.uint8)[i])
                    for j in range(n2):
                        b = make_class(sphere, s2, t2, np.eye(n2, dtype=np.uint8)[j])
                        v = self.products.multiply(a, b).vector
                        if v.any():
                            rows.append(v)
        if not rows:
            return np.zeros((0, dim), np.uint8)
        span = rref(np.array(rows, np.uint8))
        return span[span.any(axis=1)]

    # -- monomials -----------------------------------------------------------
    def tokenize(self, text: str, spec=None, exclude=None) -> list[tuple[str, int]]:
        spec = spec or cx.sphere(0)
        atoms = sorted({e.name for e in self.entries if e.complex == spec and e.name != exclude},
                       key=len, reverse=True)
        out, i = [], 0
        while i < len(text):
            for a in atoms:
                if text.startswith(a, i):
                    i += len(a)
                    m = _EXP.match(text, i)
                    k = 1
                    if m:
                        k = int(m.group(2) or m.group(3))
                        i = m.end()
                    out.append((a, k))
                    break
            else:
                raise UnknownName(self._unknown(text, spec) + f" (stuck at {text[i:]!r})")
        return out

    def monomial(self, text: str, spec=None, exclude=None) -> Resolved:
        """Evaluate a product of registered sphere names."""
        spec = spec or cx.sphere(0)
        if spec.kind != cx.SPHERE or spec.shift != 0:
            raise UnknownName(f"products are formed on the sphere, not on {spec.label}")
        text = text.strip()
        if text != exclude and (text, spec) in self._by_name:
            return self.resolve_coset(text, spec)
        factors = []
        for atom, k in self.tokenize(text, spec, exclude):
            if atom.startswith("P") and len(atom) > 1 and k > 1:
                # P(a^k) = (Pa)·a^(k-1)
                factors.append(atom)
                factors.extend([atom[1:]] * (k - 1))
            else:
                factors.extend([atom] * k)
        acc = None
        for f in factors:
            r = self.resolve_coset(f, spec)
            acc = r if acc is None else self._times(acc, r)
        return Resolved(text, _rename(acc.cls, text), acc.ambiguity)

    def _times(self, a: Resolved, b: Resolved) -> Resolved:
        mul = self.products.multiply
        prod = mul(a.cls, b.cls)
        rows = []
        for r in a.ambiguity:
            rows.append(mul(_with(a.cls, r), b.cls).vector)
            for q in b.ambiguity:
                rows.append(mul(_with(a.cls, r), _with(b.cls, q)).vector)
        for q in b.ambiguity:
            rows.append(mul(a.cls, _with(b.cls, q)).vector)
        dim = len(prod.coords)
        amb = np.zeros((0, dim), np.uint8)
        if rows and gf2_rank(np.array(rows, np.uint8)):
            amb = rref(np.array(rows, np.uint8))
            amb = amb[amb.any(axis=1)]
        return Resolved(f"{a.name}{b.name}", prod, amb)

    # -- cell names ------------------------------------------------------------
    def cell_name(self, base: str, n: int, spec: cx.ComplexSpec) -> Resolved:
        """Resolve ``base[n]`` on ``spec``; fails if no element of the base coset survives."""
        a = self.monomial(base) if (base, cx.sphere(0)) not in self._by_name else self.resolve_coset(base)
        s, t = a.cls.s, a.cls.t + n
        dim = self.engine.ext_dim(spec, s, t)
        found = []
        for vec in a.elements():
            if not vec.any():
                continue
            lift = ah_lift(self.engine, spec, n, s, t, vec)
            if lift.present:
                found.append(lift)
        if not found:
            raise UnknownName(f"{base}[{n}] is not present in Ext^({s},{t})({spec.label})")
        first = found[0]
        rows = [f.vector ^ first.vector for f in found[1:]] + list(first.lower)
        amb = np.zeros((0, dim), np.uint8)
        if rows and gf2_rank(np.array(rows, np.uint8)):
            amb = rref(np.array(rows, np.uint8))
            amb = amb[amb.any(axis=1)]
        name = f"{base}[{n}]"
        cls = make_class(spec, s, t, first.vector, ah_filtration=n, name=name)
        return Resolved(name, cls, amb)

    def identify(self, cls: ExtClass) -> list[str]:
        """Registered names whose coset contains the class."""
        out = []
        for e in self.entries:
            if e.complex != cls.complex or (e.s, e.t) != (cls.s, cls.t):
                continue
            try:
                r = self.resolve_coset(e.name, e.complex)
            except (UnknownName, AmbiguousName):
                continue
            if r.contains(cls.vector):
                out.append(e.name)
        return out

    # -- audit -----------------------------------------------------------------
    def audit(self, t_max: int | None = None, s_max: int | None = None) -> "AuditReport":
        report = AuditReport()
        for e in self.duplicates:
            report.problems.append((e.name, f"duplicate entry (line {e.line})"))
        for e in self.entries:
            if (t_max is not None and e.t > t_max) or (s_max is not None and e.s > s_max):
                report.skipped.append(e.name)
                continue
            dim = self.engine.ext_dim(e.complex, e.s, e.t)
            if dim == 0:
                report.problems.append((e.name, f"bidegree ({e.s},{e.t}) is empty"))
                continue
            try:
                r = self.resolve_coset(e.name, e.complex)
            except (UnknownName, AmbiguousName, ValueError) as exc:
                report.problems.append((e.name, str(exc)))
                continue
            if r.cls.is_zero():
                report.problems.append((e.name, "resolves to zero"))
                continue
            report.resolved.append(e.name)
            if dim == 1 and e.provenance != "derived":
                report.upgradeable.append(e.name)
        return report


@dataclass
class AuditReport:
    resolved: list = field(default_factory=list)
    problems: list = field(default_factory=list)
    upgradeable: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


def _reduce_rows(rows, v):
    v = v.copy()
    for r in rows:
        p = int(np.flatnonzero(r)[0])
        if v[p]:
            v ^= r
    return v


def _with(cls: ExtClass, vec) -> ExtClass:
    return make_class(cls.complex, cls.s, cls.t, vec)


def _rename(cls: ExtClass, name: str) -> ExtClass:
    return ExtClass(cls.complex, cls.s, cls.t, cls.coords, cls.ah_filtration, name, cls.representative)
