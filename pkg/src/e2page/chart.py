"""Chart assembly and export: plain text, structured JSON and SVG."""
from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from xml.sax.saxutils import escape

import numpy as np

from . import complexes as cx
from .ext_engine import ExtEngine, LambdaExt, gf2_rank, make_class
from .names_registry import Registry, Resolved

FORMAT_VERSION = 1


@dataclass
class ChartRecord:
    s: int
    t: int
    dim: int
    names: list = field(default_factory=list)
    filtrations: list = field(default_factory=list)
    representatives: list = field(default_factory=list)

    @property
    def stem(self) -> int:
        return self.t - self.s


@dataclass
class Chart:
    complex: str
    s_max: int
    t_max: int
    records: list

    def at(self, s, t) -> ChartRecord | None:
        for r in self.records:
            if (r.s, r.t) == (s, t):
                return r
        return None


_PREFIX = re.compile(r"^h_(\d)(?:\^(\d+))?")


def _times_name(i: int, name: str) -> str:
    """Name of h_i * name, merging a leading power of h_i."""
    if name == "1":
        return f"h_{i}"
    m = _PREFIX.match(name)
    if m and int(m.group(1)) == i:
        k = int(m.group(2) or 1) + 1
        return f"h_{i}^{k}{name[m.end():]}"
    return f"h_{i}{name}"


def _key(v) -> tuple:
    return tuple(int(x) for x in v)


class SphereNamer:
    """Names for classes of Ext(S^0): registry names first, then h_i * (named class)."""

    def __init__(self, registry: Registry, generators=range(6)):
        self.registry = registry
        self.engine = registry.engine
        self.products = registry.products
        self.generators = tuple(generators)
        self._memo: dict = {}
        self._sphere = cx.sphere(0)

    def _table(self, s, t) -> dict:
        hit = self._memo.get((s, t))
        if hit is not None:
            return hit
        table: dict = {}
        self._memo[(s, t)] = table
        if s < 0 or t < s or self.engine.ext_dim(self._sphere, s, t) == 0:
            return table
        if (s, t) == (0, 0):
            table[(1,)] = "1"
            return table
        for e in self.registry.entries:
            if e.complex == self._sphere and (e.s, e.t) == (s, t):
                try:
                    r = self.registry.resolve_coset(e.name)
                except (ValueError, KeyError):
                    continue
                if len(r.ambiguity) == 0:
                    table.setdefault(_key(r.vector), e.name)
        for i in self.generators:
            src = self._table(s - 1, t - (1 << i))
            if not src:
                continue
            g = make_class(self._sphere, 1, 1 << i, np.ones(1, np.uint8))
            for y_vec, y_name in sorted(src.items(), key=lambda kv: (len(kv[1]), kv[1])):
                y = make_class(self._sphere, s - 1, t - (1 << i), np.array(y_vec, np.uint8))
                prod = self.products.multiply(y, g).vector
                if prod.any():
                    table.setdefault(_key(prod), _times_name(i, y_name))
        return table

    def name(self, s, t, vec, ambiguity=None) -> str:
        table = self._table(s, t)
        cands = [np.asarray(vec, np.uint8)]
        if ambiguity is not None and len(ambiguity):
            cands = Resolved("", make_class(self._sphere, s, t, vec), ambiguity).elements()
        found = [table[_key(v)] for v in cands if _key(v) in table]
        return min(found, key=lambda n: (len(n), n)) if found else ""


def _basis_label(registry, namer, spec, ah, vec) -> str:
    names = registry.identify(make_class(spec, ah.s, ah.t, vec))
    if names:
        return names[0]
    if spec.kind == cx.SPHERE:
        return namer.name(ah.s, ah.t - spec.shift, vec)
    n, (a, indet) = ah.label_of(vec)
    base = namer.name(ah.s, ah.t - n, a, indet)
    return f"{base}[{n}]" if base else ""


def build_chart(engine: ExtEngine, spec: cx.ComplexSpec, s_max: int, t_max: int,
                registry: Registry | None = None, stems=None, rep_t_max: int = 20) -> Chart:
    """Nonzero bidegrees with dimensions, names and small-degree Lambda representatives.

    Names come from the registry, from h_i * (named class) on the sphere,
    and from cell labels a[n] on complexes.  A basis
    vector with no name gets an empty string.  Representatives are a Lambda-model
    basis of the same group, listed when t ≤ rep_t_max.
    """
    dims = engine.chart(spec, s_max, t_max, stems)
    lx = LambdaExt(spec) if rep_t_max else None
    namer = SphereNamer(registry) if registry is not None else None
    records = []
    for (s, t) in sorted(dims, key=lambda k: (k[1] - k[0], k[0])):
        dim = dims[(s, t)]
        ah = engine.ah_data(spec, s, t)
        names = [_basis_label(registry, namer, spec, ah, row) for row in ah.basis] \
            if registry is not None else [""] * dim
        reps = []
        if lx is not None and t <= rep_t_max:
            reps = [str(c.representative) for c in lx.group(s, t).basis]
        records.append(ChartRecord(s, t, dim, names, list(ah.filtration), reps))
    return Chart(spec.label, s_max, t_max, records)


def to_text(chart: Chart) -> str:
    lines = [f"# {chart.complex}  s <= {chart.s_max}  t <= {chart.t_max}",
             "# stem s t dim | names | representatives"]
    for r in chart.records:
        names = ", ".join(n or "•" for n in r.names)
        reps = " ; ".join(r.representatives)
        lines.append(f"{r.stem} {r.s} {r.t} {r.dim} | {names} | {reps}".rstrip(" |"))
    return "\n".join(lines) + "\n"


def to_structured(chart: Chart) -> str:
    data = {"version": FORMAT_VERSION, "complex": chart.complex, "s_max": chart.s_max,
            "t_max": chart.t_max,
            "records": [dict(asdict(r), stem=r.stem) for r in chart.records]}
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def from_structured(text: str) -> Chart:
    data = json.loads(text)
    if data.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported chart version {data.get('version')}")
    recs = [ChartRecord(r["s"], r["t"], r["dim"], r["names"], r["filtrations"], r["representatives"])
            for r in data["records"]]
    return Chart(data["complex"], data["s_max"], data["t_max"], recs)


def to_svg(chart: Chart, cell: int = 28, labels: bool = True) -> str:
    if chart.records:
        x_lo = min(r.stem for r in chart.records)
        x_hi = max(r.stem for r in chart.records)
    else:
        x_lo = x_hi = 0
    y_hi = max([r.s for r in chart.records], default=0)
    pad = 36
    width = (x_hi - x_lo + 1) * cell + 2 * pad
    height = (y_hi + 1) * cell + 2 * pad
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'font-family="monospace" font-size="7">',
           f'<title>{escape(chart.complex)}</title>',
           f'<rect width="{width}" height="{height}" fill="white"/>']

    def pos(stem, s, k=0, n=1):
        x = pad + (stem - x_lo) * cell + cell / 2 + (k - (n - 1) / 2) * 6
        y = height - pad - s * cell - cell / 2
        return x, y

    for stem in range(x_lo, x_hi + 1):
        x, _ = pos(stem, 0)
        out.append(f'<text x="{x:.1f}" y="{height - pad / 3:.1f}" text-anchor="middle">{stem}</text>')
        out.append(f'<line x1="{x:.1f}" y1="{pad}" x2="{x:.1f}" y2="{height - pad}" '
                   f'stroke="#eee" stroke-width="0.5"/>')
    for s in range(0, y_hi + 1):
        _, y = pos(x_lo, s)
        out.append(f'<text x="{pad / 3:.1f}" y="{y + 2:.1f}" text-anchor="middle">{s}</text>')
    for r in chart.records:
        for k in range(r.dim):
            x, y = pos(r.stem, r.s, k, r.dim)
            out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="2.2" fill="black"/>')
            if labels and k < len(r.names) and r.names[k]:
                out.append(f'<text x="{x + 3:.1f}" y="{y - 3 - 7 * (k % 2):.1f}">'
                           f'{escape(r.names[k])}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render(chart: Chart, fmt: str) -> str:
    if fmt == "text":
        return to_text(chart)
    if fmt == "structured":
        return to_structured(chart)
    if fmt == "svg":
        return to_svg(chart)
    raise ValueError(f"unknown format {fmt!r}")


def permuted_dims(spec: cx.ComplexSpec, s: int, t: int, seed: int) -> int:
    """dim H^{s,t} of the Lambda complex recomputed with shuffled basis order."""
    lc = cx.LambdaComplex(spec)
    n = lc.size(s, t)
    if n == 0:
        return 0
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    out = lc.matrix(s, t).to_dense()[perm]
    r_out = gf2_rank(out) if out.size else 0
    r_in = 0
    if s > 0 and lc.size(s - 1, t):
        inc = lc.matrix(s - 1, t).to_dense()[:, perm]
        inc = inc[rng.permutation(len(inc))]
        r_in = gf2_rank(inc)
    return n - r_out - r_in


__all__ = ["Chart", "ChartRecord", "build_chart", "to_text", "to_structured", "from_structured",
           "to_svg", "render", "permuted_dims"]
