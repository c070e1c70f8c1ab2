"""Cell-filtered cochain complexes built on the Lambda algebra.

Basis symbols are pairs ``(cell, word)`` with ``word`` an admissible index
tuple; a symbol sits in bidegree ``s = len(word)``, ``t = cell + s + sum(word)``.

* sphere ``S^n``: one cell, differential of the word.
* stunted projective ``P_lo^hi``: every cell ``n`` in range; the differential
  straightens ``λ_n · word`` keeping the leading index and regroups by it,
  dropping cells below ``lo``.
* twisted cells: one sphere copy per cell plus ``(p; twist·word)`` for every
  twist from cell ``n`` down to cell ``p``.

The same spec also yields the Steenrod module used by the resolution engine.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import amodules
from . import lambda_core as lam
from .f2_linalg import BitMatrix, pack_rows

SPHERE, PROJECTIVE, CELLS = "sphere", "projective", "cells"


class ComplexSpecError(ValueError):
    pass


@dataclass(frozen=True)
class ComplexSpec:
    kind: str
    shift: int = 0
    lower: int = 1
    upper: int | None = None
    cells: tuple = ()
    # (from_cell, to_cell, frozenset of words); from_cell > to_cell
    twists: tuple = ()
    name: str = ""

    def __post_init__(self):
        if self.kind == PROJECTIVE:
            if self.lower < 1 or (self.upper is not None and self.upper < self.lower):
                raise ComplexSpecError(
                    f"stunted projective range needs 1 <= lower <= upper, got {self.lower}..{self.upper}")
        elif self.kind == CELLS:
            if not self.cells or min(self.cells) < 0 or len(set(self.cells)) != len(self.cells):
                raise ComplexSpecError("cell list must be nonempty, distinct and nonnegative")
            for src, dst, words in self.twists:
                if src not in self.cells or dst not in self.cells:
                    raise ComplexSpecError(f"twist {src}->{dst} references a missing cell")
                if dst >= src:
                    raise ComplexSpecError(f"twist {src}->{dst} must lower the cell")
                for w in words:
                    if lam.bidegree(w)[1] != src - dst:
                        raise ComplexSpecError(
                            f"twist {src}->{dst}: word {lam.format_word(w)} has internal degree "
                            f"{lam.bidegree(w)[1]}, expected {src - dst}")
                    if len(w) != 1:
                        raise ComplexSpecError(
                            f"twist {src}->{dst}: only single-step twists λ_i are supported")
        elif self.kind == SPHERE:
            if self.shift < 0:
                raise ComplexSpecError("sphere dimension must be nonnegative")
        else:
            raise ComplexSpecError(f"unknown complex kind {self.kind!r}")

    # -- cells -----------------------------------------------------------
    def has_cell(self, n: int) -> bool:
        if self.kind == SPHERE:
            return n == self.shift
        if self.kind == PROJECTIVE:
            return n >= self.lower and (self.upper is None or n <= self.upper)
        return n in self.cells

    def cell_list(self, upto: int) -> list[int]:
        if self.kind == SPHERE:
            return [self.shift] if self.shift <= upto else []
        if self.kind == PROJECTIVE:
            top = upto if self.upper is None else min(upto, self.upper)
            return list(range(self.lower, top + 1))
        return sorted(c for c in self.cells if c <= upto)

    @property
    def bottom(self) -> int:
        if self.kind == SPHERE:
            return self.shift
        if self.kind == PROJECTIVE:
            return self.lower
        return min(self.cells)

    @property
    def top(self) -> int | None:
        if self.kind == SPHERE:
            return self.shift
        if self.kind == PROJECTIVE:
            return self.upper
        return max(self.cells)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == SPHERE:
            return f"S^{self.shift}"
        if self.kind == PROJECTIVE:
            return f"P_{self.lower}^{'inf' if self.upper is None else self.upper}"
        return "cells(" + ",".join(map(str, sorted(self.cells))) + ")"

    def twist_map(self) -> dict[int, list[tuple[int, frozenset]]]:
        out: dict[int, list] = {}
        for src, dst, words in self.twists:
            out.setdefault(src, []).append((dst, frozenset(words)))
        return out

    # -- sub/quotient ----------------------------------------------------
    def restrict(self, lower: int, upper: int | None) -> "ComplexSpec":
        """The subquotient on cells in [lower, upper] (same kind)."""
        if self.kind == SPHERE:
            if not (lower <= self.shift and (upper is None or self.shift <= upper)):
                raise ComplexSpecError("restriction removes the only cell")
            return self
        if self.kind == PROJECTIVE:
            lo = max(lower, self.lower)
            if self.upper is None:
                hi = upper
            else:
                hi = self.upper if upper is None else min(upper, self.upper)
            if lo == hi:
                return sphere(lo)
            return ComplexSpec(PROJECTIVE, lower=lo, upper=hi)
        cells = tuple(c for c in self.cells if c >= lower and (upper is None or c <= upper))
        if not cells:
            raise ComplexSpecError("restriction removes every cell")
        if len(cells) == 1:
            return sphere(cells[0])
        tw = tuple(t for t in self.twists if t[0] in cells and t[1] in cells)
        return ComplexSpec(CELLS, cells=cells, twists=tw)

    # -- Steenrod module -------------------------------------------------
    def module(self):
        if self.kind == SPHERE:
            return amodules.SphereModule(self.shift)
        if self.kind == PROJECTIVE:
            return amodules.ProjectiveModule(self.lower, self.upper)
        twists = []
        for src, dst, words in self.twists:
            for w in words:
                i = w[0]
                if (i + 1) & i:
                    raise ComplexSpecError(
                        f"twist λ_{i} is not primary (needs i = 2^k - 1) for the module model")
                twists.append(amodules.Twist(dst, src))
        return amodules.TwistedCellModule(self.cells, twists, name=self.label)

    def module_key(self):
        if self.kind == SPHERE:
            return ("sphere",)
        if self.kind == PROJECTIVE:
            return ("projective", self.lower, self.upper)
        return ("cells", tuple(sorted(self.cells)),
                tuple(sorted((a, b, tuple(sorted(w))) for a, b, w in self.twists)))


def sphere(n: int = 0) -> ComplexSpec:
    return ComplexSpec(SPHERE, shift=n)


def projective(lower: int, upper: int | None = None) -> ComplexSpec:
    if upper is not None and upper == lower:
        return sphere(lower)
    return ComplexSpec(PROJECTIVE, lower=lower, upper=upper)


def twisted(cells, twists: dict, name: str = "") -> ComplexSpec:
    """``twists`` maps (from_cell, to_cell) to word text or a list of words."""
    tw = []
    for (src, dst), value in sorted(twists.items()):
        texts = [value] if isinstance(value, str) else list(value)
        words = set()
        for text in texts:
            cell, w = lam.parse_word(str(text))
            if cell is not None:
                raise ComplexSpecError("twist words carry no cell prefix")
            words ^= {w}
        tw.append((src, dst, frozenset(words)))
    return ComplexSpec(CELLS, cells=tuple(sorted(cells)), twists=tuple(tw), name=name)


BUILTINS = {
    "sphere": lambda: sphere(0),
    "P1-inf": lambda: projective(1, None),
    "P1-9": lambda: projective(1, 9),
    "P7-9": lambda: projective(7, 9),
    "C-eta-7": lambda: twisted([7, 9], {(9, 7): "1"}, name="Σ^7Cη"),
}


def builtin(name: str) -> ComplexSpec:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ComplexSpecError(f"unknown builtin complex {name!r}; choose from {sorted(BUILTINS)}")


def parse_spec(data: dict) -> ComplexSpec:
    """Build a spec from a parsed mapping (see docs/formats.md for the grammar)."""
    if not isinstance(data, dict) or "kind" not in data:
        raise ComplexSpecError("complex spec needs a 'kind' field")
    kind = data["kind"]
    name = str(data.get("name", ""))
    if kind == SPHERE:
        return ComplexSpec(SPHERE, shift=int(data.get("shift", 0)), name=name)
    if kind == PROJECTIVE:
        upper = data.get("upper")
        if upper in ("inf", "infinity", None):
            upper = None
        return ComplexSpec(PROJECTIVE, lower=int(data.get("lower", 1)),
                           upper=None if upper is None else int(upper), name=name)
    if kind == CELLS:
        cells = [int(c) for c in data.get("cells", [])]
        twists = {}
        for entry in data.get("twists", []) or []:
            try:
                twists[(int(entry["from"]), int(entry["to"]))] = entry["word"]
            except (KeyError, TypeError) as exc:
                raise ComplexSpecError(f"bad twist entry {entry!r}") from exc
        return twisted(cells, twists, name=name)
    raise ComplexSpecError(f"unknown complex kind {kind!r}")


def load_spec(source: str | Path) -> ComplexSpec:
    """A builtin name or a path to a YAML complex-spec file."""
    if str(source) in BUILTINS:
        return builtin(str(source))
    path = Path(source)
    if not path.exists():
        raise ComplexSpecError(f"no such complex spec file or builtin: {source}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ComplexSpecError(f"cannot parse {path}: {exc}") from exc
    return parse_spec(data)


# ---------------------------------------------------------------------------
# cochains


@dataclass(frozen=True)
class Cochain:
    spec: ComplexSpec
    s: int
    t: int
    terms: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        for cell, word in self.terms:
            if len(word) != self.s or cell + len(word) + sum(word) != self.t:
                raise ValueError(f"term ({cell}; {word}) not in bidegree ({self.s},{self.t})")

    def __add__(self, other: "Cochain") -> "Cochain":
        return Cochain(self.spec, self.s, self.t, self.terms ^ other.terms)

    def __bool__(self):
        return bool(self.terms)

    @property
    def leading_cell(self) -> int | None:
        return max((c for c, _ in self.terms), default=None)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(lam.format_word(w, c) for c, w in sorted(self.terms))


def symbol_differential(spec: ComplexSpec, cell: int, word: tuple) -> frozenset:
    """Total differential of one basis symbol, as a set of (cell, word)."""
    acc = {(cell, w) for w in lam.d_tuple(word)}
    if spec.kind == PROJECTIVE:
        for a, b in lam.d_generator(cell):
            if not spec.has_cell(a):
                continue
            for w in lam.prepend(b, word):
                acc ^= {(a, w)}
    elif spec.kind == CELLS:
        for dst, words in spec.twist_map().get(cell, ()):
            for tw in words:
                for w in lam.normalize_tuple(tw + word):
                    acc ^= {(dst, w)}
    return frozenset(acc)


def total_differential(c: Cochain) -> Cochain:
    acc: set = set()
    for cell, word in c.terms:
        acc ^= symbol_differential(c.spec, cell, word)
    return Cochain(c.spec, c.s + 1, c.t, frozenset(acc))


def cochain(spec: ComplexSpec, text: str) -> Cochain:
    """Parse ``"(n) i_1 ... + (m) j_1 ..."`` into a cochain (sphere: no cell)."""
    terms: set = set()
    bideg = None
    for part in text.split("+"):
        cell, word = lam.parse_word(part)
        if cell is None:
            if spec.kind != SPHERE:
                raise ValueError("cell-bearing complexes need '(n)' prefixes")
            cell = spec.shift
        if not spec.has_cell(cell):
            raise ValueError(f"cell {cell} is not in {spec.label}")
        terms ^= {(cell, word)}
        b = (len(word), cell + len(word) + sum(word))
        if bideg is not None and b != bideg:
            raise ValueError("terms of mixed bidegree")
        bideg = b
    if bideg is None:
        raise ValueError("empty cochain")
    return Cochain(spec, bideg[0], bideg[1], frozenset(terms))


# ---------------------------------------------------------------------------
# basis tables


class LambdaComplex:
    """Graded basis tables and differential matrices of a spec."""

    def __init__(self, spec: ComplexSpec):
        self.spec = spec
        self._basis: dict[tuple[int, int], tuple] = {}
        self._index: dict[tuple[int, int], dict] = {}

    def basis(self, s: int, t: int) -> tuple:
        key = (s, t)
        hit = self._basis.get(key)
        if hit is not None:
            return hit
        out = []
        if s >= 0:
            for cell in self.spec.cell_list(t - s):
                out.extend((cell, w) for w in lam.admissible_words(s, t - cell))
        res = tuple(out)
        self._basis[key] = res
        self._index[key] = {sym: i for i, sym in enumerate(res)}
        return res

    def index(self, s: int, t: int) -> dict:
        self.basis(s, t)
        return self._index[(s, t)]

    def size(self, s: int, t: int) -> int:
        if s < 0:
            return 0
        return sum(lam.count_admissible(s, t - c) for c in self.spec.cell_list(t - s))

    def vector(self, c: Cochain) -> np.ndarray:
        idx = self.index(c.s, c.t)
        out = np.zeros(len(self.basis(c.s, c.t)), dtype=np.uint8)
        for sym in c.terms:
            out[idx[sym]] ^= 1
        return out

    def cochain_of(self, s: int, t: int, coords) -> Cochain:
        basis = self.basis(s, t)
        return Cochain(self.spec, s, t, frozenset(basis[i] for i in np.flatnonzero(coords)))

    def matrix(self, s: int, t: int) -> BitMatrix:
        """Rows: basis of (s,t); columns: basis of (s+1,t); row i = d(basis_i)."""
        src = self.basis(s, t)
        tgt_idx = self.index(s + 1, t)
        dense = np.zeros((len(src), len(tgt_idx)), dtype=np.uint8)
        for r, (cell, word) in enumerate(src):
            for sym in symbol_differential(self.spec, cell, word):
                dense[r, tgt_idx[sym]] ^= 1
        if not len(src):
            return BitMatrix.zeros(0, len(tgt_idx))
        return BitMatrix(len(src), len(tgt_idx), pack_rows(dense))


# ---------------------------------------------------------------------------
# chain maps between Lambda complexes


@dataclass
class LambdaChainMap:
    """Cellwise chain map: keeps symbols whose cell lies in ``target``."""

    source: ComplexSpec
    target: ComplexSpec

    def apply(self, c: Cochain) -> Cochain:
        return Cochain(self.target, c.s, c.t,
                       frozenset(sym for sym in c.terms if self.target.has_cell(sym[0])))

    def matrix(self, s: int, t: int) -> np.ndarray:
        src = LambdaComplex(self.source).basis(s, t)
        tgt = LambdaComplex(self.target).index(s, t)
        out = np.zeros((len(src), len(tgt)), dtype=np.uint8)
        for r, sym in enumerate(src):
            if sym in tgt:
                out[r, tgt[sym]] = 1
        return out

    def verify(self, s: int, t: int) -> bool:
        """f∘d = d∘f on (s,t) as matrices."""
        f0 = self.matrix(s, t)
        f1 = self.matrix(s + 1, t)
        d_src = LambdaComplex(self.source).matrix(s, t).to_dense().astype(np.int64)
        d_tgt = LambdaComplex(self.target).matrix(s, t).to_dense().astype(np.int64)
        lhs = (d_src @ f1) % 2 if d_src.size else np.zeros((f0.shape[0], f1.shape[1]), np.int64)
        rhs = (f0 @ d_tgt) % 2 if d_tgt.size else np.zeros((f0.shape[0], f1.shape[1]), np.int64)
        return bool(np.array_equal(lhs, rhs))


def _verify_map(m: "LambdaChainMap", t_max: int) -> None:
    for t in range(0, t_max + 1):
        for s in range(0, t + 1):
            if not m.verify(s, t):
                raise ComplexSpecError(
                    f"{m.source.label} -> {m.target.label} is not a chain map at ({s},{t})")


def cell_truncation_maps(spec: ComplexSpec, lower: int, upper: int | None, t_max: int = 12):
    """Chain maps for a cell range ``[lower, upper]`` of ``spec``.

    A bottom segment is a subcomplex: returns (its inclusion, projection onto
    the remaining top cells).  A top segment is a quotient: returns
    (inclusion of the remaining bottom cells, projection onto it).  The full
    range gives identities.  A missing piece is ``None``.  Ranges in the
    middle are neither and raise.  Maps are verified through ``t_max``.
    """
    bottom, top = spec.bottom, spec.top
    reaches_top = upper is None or (top is not None and upper >= top)
    if lower <= bottom and reaches_top:
        ident = LambdaChainMap(spec, spec)
        return ident, ident
    if lower <= bottom:
        sub = spec.restrict(bottom, upper)
        rest = [c for c in spec.cell_list(10 ** 4 if top is None else top) if c > upper]
        quo = spec.restrict(upper + 1, None) if rest else None
    elif reaches_top:
        below = spec.cell_list(lower - 1)
        sub = spec.restrict(bottom, lower - 1) if below else None
        quo = spec.restrict(lower, None)
    else:
        raise ComplexSpecError(
            f"cells {lower}..{upper} of {spec.label} are neither a subcomplex nor a quotient")
    inc = LambdaChainMap(sub, spec) if sub is not None else None
    proj = LambdaChainMap(spec, quo) if quo is not None else None
    for m in (inc, proj):
        if m is not None:
            _verify_map(m, t_max)
    return inc, proj


def subcomplex_map(sub: ComplexSpec, total: ComplexSpec, t_max: int = 12) -> "LambdaChainMap":
    """Inclusion of a cell subset that is closed under the differential."""
    m = LambdaChainMap(sub, total)
    _verify_map(m, t_max)
    return m


def transfer_cochain(c: Cochain) -> Cochain:
    """(n; I) ↦ normalize(λ_n I) on the sphere."""
    acc: set = set()
    for cell, word in c.terms:
        for w in lam.prepend(cell, word):
            acc ^= {(0, w)}
    return Cochain(sphere(0), c.s + 1, c.t + 1, frozenset(acc))


# ---------------------------------------------------------------------------
# d² = 0 checks


@dataclass
class SquareZeroReport:
    spec_label: str
    t_max: int
    method: str
    checked: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def check_square_zero(spec: ComplexSpec, t_max: int, s_max: int | None = None) -> SquareZeroReport:
    """Exhaustive d∘d = 0 on every basis symbol with t ≤ t_max."""
    failures = []
    n = 0
    cx = LambdaComplex(spec)
    for t in range(0, t_max + 1):
        for s in range(0, t + 1 if s_max is None else min(t, s_max) + 1):
            for cell, word in cx.basis(s, t):
                acc: set = set()
                for sym in symbol_differential(spec, cell, word):
                    acc ^= symbol_differential(spec, *sym)
                n += 1
                if acc:
                    failures.append((cell, word))
    return SquareZeroReport(spec.label, t_max, "exhaustive", n, failures)


def sample_square_zero(spec: ComplexSpec, t_lo: int, t_hi: int, samples: int, seed: int = 0,
                       s_max: int | None = None) -> SquareZeroReport:
    """d∘d = 0 on random basis symbols with t_lo ≤ t ≤ t_hi."""
    rng = random.Random(seed)
    failures = []
    cx = LambdaComplex(spec)
    for _ in range(samples):
        t = rng.randint(t_lo, t_hi)
        s = rng.randint(1, min(t, s_max or t))
        cells = spec.cell_list(t - s)
        if not cells:
            continue
        cell = rng.choice(cells)
        word = random_admissible(s, t - cell, rng)
        if word is None:
            continue
        acc: set = set()
        for sym in symbol_differential(spec, cell, word):
            acc ^= symbol_differential(spec, *sym)
        if acc:
            failures.append((cell, word))
    return SquareZeroReport(cx.spec.label, t_hi, f"sampled t in [{t_lo},{t_hi}]", samples, failures)


def random_admissible(s: int, t: int, rng: random.Random):
    """Uniformly random admissible word of length s and degree t (or None)."""
    total = t - s
    if s < 0 or total < 0:
        return None
    n = lam._count(s, total, total)
    if n == 0:
        return None
    k = rng.randrange(n)
    word = []
    cap = total
    rem = total
    for pos in range(s, 0, -1):
        for first in range(0, min(cap, rem) + 1):
            c = lam._count(pos - 1, rem - first, 2 * first)
            if k < c:
                word.append(first)
                rem -= first
                cap = 2 * first
                break
            k -= c
    return tuple(word)


@dataclass
class Certificate:
    """Structural argument for d∘d = 0 through internal degree t_max.

    The Lambda algebra is the quotient of the free algebra on the λ_i by the
    pair relations, and d is a derivation.  Over GF(2) d∘d is again a
    derivation, so it vanishes once (a) the relations define a confluent
    rewriting system (admissible words are a basis), (b) d maps relations into
    the relation ideal, and (c) d∘d kills every generator.  A cell complex is
    a free right module on its cells with d(cell) given by the attaching data,
    so (d) d∘d on each bare cell symbol finishes the argument for it.
    """

    t_max: int
    overlaps: int = 0
    relations: int = 0
    generators: int = 0
    cells: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def square_zero_certificate(t_max: int, specs=()) -> Certificate:
    cert = Certificate(t_max)
    # (a) confluence on overlaps λ_i λ_j λ_k with both pairs inadmissible
    for i in range(0, t_max):
        for j in range(2 * i + 1, t_max):
            for k in range(2 * j + 1, t_max):
                if i + j + k + 3 > t_max:
                    break
                cert.overlaps += 1
                w = (i, j, k)
                if lam.normalize_leftmost(w) != lam.normalize_tuple(w):
                    cert.failures.append(("overlap", w))
    # (b) d respects every relation λ_i λ_j = Σ λ_a λ_b
    for i in range(0, t_max):
        for j in range(2 * i + 1, t_max):
            if i + j + 2 > t_max:
                break
            cert.relations += 1
            lhs = set(lam.d_free((i, j)))
            for a, b in lam.relation(i, j):
                lhs ^= set(lam.d_free((a, b)))
            if lhs:
                cert.failures.append(("relation", (i, j)))
    # (c) d∘d on generators
    for n in range(0, t_max):
        cert.generators += 1
        if lam.d_set(lam.d_tuple((n,))):
            cert.failures.append(("generator", n))
    # (d) d∘d on bare cells of each complex
    for spec in specs:
        bad = []
        for cell in spec.cell_list(t_max):
            acc: set = set()
            for sym in symbol_differential(spec, cell, ()):
                acc ^= symbol_differential(spec, *sym)
            if acc:
                bad.append(cell)
        cert.cells[spec.label] = len(spec.cell_list(t_max))
        cert.failures.extend(("cell", spec.label, c) for c in bad)
    return cert
