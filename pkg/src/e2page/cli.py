"""Command line: charts, queries on Ext, and the claim verifier."""
from __future__ import annotations

import logging
import os
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np

from . import complexes as cx
from .chart import build_chart, render
from .ext_engine import EngineConfig, ExtEngine, make_class, rref
from .names_registry import AmbiguousName, Registry, UnknownName, load_fixture
from .products import Products
from .verifier import VerifyConfig, Verifier

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPUTE = 4
CACHE_ENV = "E2PAGE_CACHE"

_TRIPLE = re.compile(r"^\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)$")


@dataclass
class RunConfig:
    complex: str = "sphere"
    s_max: int = 9
    t_max: int = 56
    cache_dir: str | None = None
    threads: int = 1
    format: str = "text"
    strict: bool = False

    def validate(self):
        if self.s_max < 0 or self.t_max <= 0:
            raise click.BadParameter("--smax must be >= 0 and --tmax > 0")
        if self.threads < 1:
            raise click.BadParameter("--threads must be positive")
        if self.cache_dir:
            path = Path(self.cache_dir)
            try:
                path.mkdir(parents=True, exist_ok=True)
            except OSError as exc:
                raise click.BadParameter(f"cache directory {path} is not writable: {exc}")
            if not os.access(path, os.W_OK):
                raise click.BadParameter(f"cache directory {path} is not writable")

    def engine(self) -> ExtEngine:
        if self.threads > 1:
            logging.getLogger(__name__).info("kernels run serially; --threads %d has no effect",
                                             self.threads)
        return ExtEngine(EngineConfig(s_max=self.s_max, t_max=self.t_max, cache_dir=self.cache_dir,
                                      keep_qi_below=70))


def _default_cache() -> str | None:
    return os.environ.get(CACHE_ENV) or None


def _common(f):
    opts = [
        click.option("--smax", "s_max", type=int, default=None, help="largest Adams filtration s"),
        click.option("--tmax", "t_max", type=int, default=None, help="largest internal degree t"),
        click.option("--cache", "cache_dir", type=click.Path(file_okay=False), default=None,
                     help=f"resolution cache directory (default ${CACHE_ENV})"),
        click.option("--threads", type=int, default=1, show_default=True,
                     help="threads for the numeric kernels"),
        click.option("-v", "--verbose", count=True, help="log progress (-vv for debug)"),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def _config(s_max, t_max, cache_dir, threads, verbose, defaults=(9, 56), **kw) -> RunConfig:
    logging.basicConfig(level=[logging.WARNING, logging.INFO, logging.DEBUG][min(verbose, 2)],
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = RunConfig(s_max=defaults[0] if s_max is None else s_max,
                    t_max=defaults[1] if t_max is None else t_max,
                    cache_dir=cache_dir or _default_cache(), threads=threads, **kw)
    cfg.validate()
    return cfg


def _fail(code, message):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Adams E_2-pages of the sphere, stunted projective spectra and small cell complexes."""


# -- chart --------------------------------------------------------------------
def _parse_stems(text):
    if not text:
        return None
    out = set()
    for part in text.split(","):
        lo, _, hi = part.partition("-")
        out.update(range(int(lo), int(hi or lo) + 1))
    return out


@main.command()
@click.argument("complex_spec", default="sphere")
@_common
@click.option("--format", "fmt", type=click.Choice(["text", "structured", "svg", "all"]),
              default="text", show_default=True)
@click.option("--stems", default=None, help="stem filter, e.g. 46-47 or 0,3,7")
@click.option("-o", "--output", type=click.Path(), default=None,
              help="output file (a directory for --format all)")
@click.option("--fixture", type=click.Path(exists=True, dir_okay=False), default=None,
              help="names fixture replacing the bundled one")
@click.option("--reps-tmax", type=int, default=20, show_default=True,
              help="list Lambda representatives for t up to this bound")
def chart(complex_spec, s_max, t_max, cache_dir, threads, verbose, fmt, stems, output, fixture,
          reps_tmax):
    """Compute and export the chart of COMPLEX_SPEC (a builtin name or a YAML spec file)."""
    try:
        cfg = _config(s_max, t_max, cache_dir, threads, verbose, defaults=(6, 20),
                      complex=complex_spec, format=fmt)
        spec = cx.load_spec(complex_spec)
        stem_set = _parse_stems(stems)
        entries = load_fixture(fixture) if fixture else None
    except (click.BadParameter, cx.ComplexSpecError, ValueError) as exc:
        _fail(EXIT_CONFIG, exc)
    if fmt == "all" and not output:
        _fail(EXIT_CONFIG, "--format all needs --output DIRECTORY")
    try:
        engine = cfg.engine()
        reg = Registry(engine, entries)
        ch = build_chart(engine, spec, cfg.s_max, cfg.t_max, reg, stem_set, reps_tmax)
    except (ArithmeticError, RuntimeError, MemoryError) as exc:
        _fail(EXIT_COMPUTE, exc)
    if fmt == "all":
        out = Path(output)
        out.mkdir(parents=True, exist_ok=True)
        stem = re.sub(r"[^A-Za-z0-9_-]+", "_", complex_spec if complex_spec in cx.BUILTINS
                      else Path(complex_spec).stem)
        for kind, ext in (("text", "txt"), ("structured", "json"), ("svg", "svg")):
            (out / f"{stem}.{ext}").write_text(render(ch, kind), encoding="utf-8")
        click.echo(f"wrote {stem}.txt, {stem}.json, {stem}.svg to {out}")
    elif output:
        Path(output).write_text(render(ch, fmt), encoding="utf-8")
    else:
        click.echo(render(ch, fmt), nl=False)


# -- query --------------------------------------------------------------------
class _Session:
    def __init__(self, cfg, spec):
        self.engine = cfg.engine()
        self.products = Products(self.engine)
        self.registry = Registry(self.engine, None, self.products)
        self.spec = spec

    def ref(self, text, spec=None):
        """A class by registry name or by an (s,t,index) triple; returns (class, ambiguity rows)."""
        spec = spec or self.spec
        m = _TRIPLE.match(text)
        if m:
            s, t, k = map(int, m.groups())
            dim = self.engine.ext_dim(spec, s, t)
            if k >= dim:
                raise click.BadParameter(f"{text}: Ext^({s},{t})({spec.label}) has dimension {dim}")
            return make_class(spec, s, t, np.eye(dim, dtype=np.uint8)[k]), np.zeros((0, dim), np.uint8)
        r = self.registry.resolve_coset(text, spec)
        return r.cls, r.ambiguity

    def describe(self, cls, ambiguity=None) -> str:
        names = self.registry.identify(cls) if not cls.is_zero() else []
        label = "0" if cls.is_zero() else (" = ".join(names) if names else "unnamed")
        amb = "" if ambiguity is None or not len(ambiguity) else \
            " mod {" + ", ".join(str(list(map(int, r))) for r in ambiguity) + "}"
        return f"{cls.describe()}{amb}  [{label}]"


def _coset_span(session, cls, amb, op):
    """Images of every element of a coset under op, as (first image, difference rows)."""
    imgs = []
    for k in range(1 << len(amb)):
        v = cls.vector.copy()
        for j in range(len(amb)):
            if k >> j & 1:
                v ^= amb[j]
        imgs.append(op(make_class(cls.complex, cls.s, cls.t, v)))
    rows = [i.vector ^ imgs[0].vector for i in imgs[1:] if (i.vector ^ imgs[0].vector).any()]
    amb_out = rref(np.array(rows, np.uint8)) if rows else np.zeros((0, len(imgs[0].vector)), np.uint8)
    return imgs[0], amb_out[amb_out.any(axis=1)] if len(amb_out) else amb_out


@main.command()
@click.argument("expression", nargs=-1, required=True)
@_common
@click.option("--complex", "complex_spec", default="sphere", show_default=True,
              help="complex for the first operand (transfer defaults to P1-inf)")
def query(expression, s_max, t_max, cache_dir, threads, verbose, complex_spec):
    """Evaluate a query: ext S T | mul A B | massey A B C | transfer X | divide X by G.

    Classes are registry names (h_1, gn, h_1t[9]) or (s,t,index) triples.
    """
    words = list(expression)
    op = words[0] if words else ""
    try:
        cfg = _config(s_max, t_max, cache_dir, threads, verbose, defaults=(9, 56))
        if op == "transfer" and complex_spec == "sphere":
            complex_spec = "P1-inf"
        spec = cx.load_spec(complex_spec)
        session = _Session(cfg, spec)
    except (click.BadParameter, cx.ComplexSpecError) as exc:
        _fail(EXIT_CONFIG, exc)
    try:
        click.echo(_run_query(session, op, words[1:]))
    except (click.BadParameter, UnknownName, AmbiguousName) as exc:
        _fail(EXIT_CONFIG, str(exc).strip("'\""))
    except ValueError as exc:
        _fail(EXIT_COMPUTE, exc)
    except (ArithmeticError, RuntimeError, MemoryError) as exc:
        _fail(EXIT_COMPUTE, exc)


def _run_query(session, op, args) -> str:
    sphere = cx.sphere(0)
    if op == "ext":
        if len(args) != 2:
            raise click.BadParameter("usage: ext S T")
        s, t = map(int, args)
        group = session.engine.group(session.spec, s, t)
        lines = [f"Ext^({s},{t})({session.spec.label}) has dimension {group.dim}"]
        if group.dim and session.spec.kind != cx.SPHERE:
            ah = session.engine.ah_data(session.spec, s, t)
            for row, n in zip(ah.basis, ah.filtration):
                lines.append(f"  {list(map(int, row))} filtration {n}")
        else:
            for k, c in enumerate(group.basis):
                names = session.registry.identify(c)
                lines.append(f"  ({s},{t},{k}) {', '.join(names) or 'unnamed'}")
        return "\n".join(lines)
    if op == "mul":
        if len(args) != 2:
            raise click.BadParameter("usage: mul A B")
        a, amb_a = session.ref(args[0])
        b, amb_b = session.ref(args[1], sphere)
        first, amb1 = _coset_span(session, a, amb_a, lambda x: session.products.multiply(x, b))
        rows = list(amb1) + [session.products.multiply(a, make_class(sphere, b.s, b.t, r)).vector
                             for r in amb_b]
        rows = [r for r in rows if r.any()]
        amb = rref(np.array(rows, np.uint8)) if rows else None
        amb = amb[amb.any(axis=1)] if amb is not None else None
        return session.describe(first, amb)
    if op == "massey":
        if len(args) != 3:
            raise click.BadParameter("usage: massey A B C")
        a, b, c = (session.ref(x, sphere)[0] for x in args)
        res = session.products.massey(a, b, c)
        zero = "zero indeterminacy" if res.zero_indeterminacy else \
            f"indeterminacy of dimension {len(res.indeterminacy)}"
        return f"{session.describe(res.value, res.indeterminacy)}; {zero}"
    if op == "transfer":
        if len(args) != 1:
            raise click.BadParameter("usage: transfer X")
        x, amb = session.ref(args[0])
        if session.spec != cx.projective(1, None):
            raise click.BadParameter("transfer is defined on P1-inf")
        img, amb_out = _coset_span(session, x, amb, session.engine.transfer)
        return session.describe(img, amb_out)
    if op == "divide":
        if len(args) != 3 or args[1] != "by":
            raise click.BadParameter("usage: divide X by G")
        x, _ = session.ref(args[0])
        g, _ = session.ref(args[2], sphere)
        y = session.products.divisibility(x, g)
        if y is None:
            return f"{args[0]} is not divisible by {args[2]}"
        return f"{args[0]} = ({session.describe(y)}) * {args[2]}"
    raise click.BadParameter(f"unknown query {op!r}; use ext, mul, massey, transfer or divide")


# -- verify --------------------------------------------------------------------
@main.command()
@_common
@click.option("--format", "fmt", type=click.Choice(["text", "structured"]), default="text",
              show_default=True)
@click.option("--strict", is_flag=True, help="exit nonzero when any claim is skipped")
@click.option("--claims", default=None, help="comma-separated claim ids, e.g. C9,C12")
@click.option("--fixture", type=click.Path(exists=True, dir_okay=False), default=None,
              help="names fixture replacing the bundled one")
@click.option("--evidence", is_flag=True, help="print evidence for passing claims")
@click.option("--timings", is_flag=True, help="include per-claim timings (breaks byte-identity)")
def verify(s_max, t_max, cache_dir, threads, verbose, fmt, strict, claims, fixture, evidence, timings):
    """Run the claim verifier and report PASS/FAIL/AXIOM/OUT-OF-SCOPE/SKIPPED per claim."""
    try:
        cfg = _config(s_max, t_max, cache_dir, threads, verbose, defaults=(16, 97),
                      format=fmt, strict=strict)
        vcfg = VerifyConfig(s_max=cfg.s_max, t_max=cfg.t_max, cache_dir=cfg.cache_dir,
                            fixture=fixture)
        engine = ExtEngine(EngineConfig(s_max=min(cfg.s_max, 9), t_max=min(cfg.t_max, 57),
                                        cache_dir=cfg.cache_dir, keep_qi_below=70))
        verifier = Verifier(vcfg, engine=engine)
        ids = [c.strip() for c in claims.split(",") if c.strip()] if claims else None
        if ids:
            unknown = sorted(set(ids) - set(verifier.ids()))
            if unknown:
                raise click.BadParameter(f"unknown claim ids {', '.join(unknown)}; "
                                         f"known: {', '.join(verifier.ids())}")
    except (click.BadParameter, ValueError) as exc:
        _fail(EXIT_CONFIG, exc)
    try:
        report = verifier.run(ids)
    except (ArithmeticError, RuntimeError, MemoryError) as exc:
        _fail(EXIT_COMPUTE, exc)
    click.echo(report.to_json(timings) if fmt == "structured" else report.to_text(evidence))
    sys.exit(report.exit_code(strict))


if __name__ == "__main__":
    main()
