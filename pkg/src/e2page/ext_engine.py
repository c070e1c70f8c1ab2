"""Ext groups of cell complexes, maps between them, and the transfer.

Two models are available:

* :class:`LambdaExt` computes homology of the Lambda cochain complexes with
  explicit cochain representatives.  Exact, but only practical in small
  internal degrees.
* :class:`ExtEngine` uses minimal resolutions of the cohomology modules.  On a
  minimal resolution every cochain is a cocycle and no cochain is a boundary,
  so a class *is* its coordinate vector over the generators of ``F_s`` in
  degree ``t``; the coset of boundaries is zero.

Maps induced by cell inclusions and projections, connecting homomorphisms,
the transfer ``Ext(P_1^inf) -> Ext(S^0)`` and Atiyah-Hirzebruch filtrations
are computed by lifting module maps to chain maps between resolutions.
"""
from __future__ import annotations

import hashlib
import io
import json
import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import amodules, complexes as cx
from . import steenrod as st
from .chainmaps import extension_initial, module_map_initial, shifted
from .f2_linalg import QuasiInverse, Subspace, echelon, pack_rows, unpack_rows
from .resolution import Resolution

log = logging.getLogger(__name__)

CACHE_VERSION = 1


# ---------------------------------------------------------------------------
# small dense GF(2) helpers on uint8 arrays


def gf2_rank(mat: np.ndarray) -> int:
    mat = np.atleast_2d(np.asarray(mat, dtype=np.uint8))
    if mat.size == 0:
        return 0
    return len(echelon(pack_rows(mat), mat.shape[1]))


def gf2_kernel(mat: np.ndarray) -> np.ndarray:
    """Basis (rows, RREF) of {y : mat @ y = 0}."""
    mat = np.atleast_2d(np.asarray(mat, dtype=np.uint8))
    n = mat.shape[1]
    if n == 0:
        return np.zeros((0, 0), dtype=np.uint8)
    if mat.shape[0] == 0:
        return np.eye(n, dtype=np.uint8)
    aug = np.concatenate([mat.T, np.eye(n, dtype=np.uint8)], axis=1)
    packed = pack_rows(aug)
    piv = echelon(packed, mat.shape[0])
    rest = unpack_rows(packed[len(piv):], aug.shape[1])[:, mat.shape[0]:]
    return rref(rest)


def rref(rows: np.ndarray) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(rows, dtype=np.uint8))
    if rows.shape[0] == 0:
        return rows.reshape(0, rows.shape[1] if rows.ndim == 2 else 0)
    sub = Subspace.span(rows.shape[1], pack_rows(rows))
    return unpack_rows(sub.basis, rows.shape[1])


def gf2_solve(mat: np.ndarray, rhs: np.ndarray):
    """Some y with mat @ y = rhs (mod 2), or None."""
    mat = np.atleast_2d(np.asarray(mat, dtype=np.uint8))
    rhs = np.asarray(rhs, dtype=np.uint8) & 1
    m, n = mat.shape
    if n == 0:
        return np.zeros(0, np.uint8) if not rhs.any() else None
    aug = np.concatenate([mat.T, np.eye(n, dtype=np.uint8)], axis=1)
    packed = pack_rows(aug)
    piv = echelon(packed, m)
    rows = unpack_rows(packed[: len(piv)], m + n)
    y = np.concatenate([rhs, np.zeros(n, np.uint8)])
    for r, c in zip(rows, piv):
        if y[c]:
            y ^= r
    if y[:m].any():
        return None
    return y[m:]


def in_span(rows: np.ndarray, vec: np.ndarray) -> bool:
    rows = np.atleast_2d(np.asarray(rows, dtype=np.uint8))
    if rows.shape[0] == 0:
        return not np.asarray(vec).any()
    return gf2_rank(np.vstack([rows, vec])) == gf2_rank(rows)


# ---------------------------------------------------------------------------
# classes


@dataclass(frozen=True)
class ExtClass:
    """A class in Ext^{s,t} of a complex, by coordinates in the canonical basis."""

    complex: cx.ComplexSpec
    s: int
    t: int
    coords: tuple
    ah_filtration: int | None = None
    name: str | None = None
    representative: object = field(default=None, compare=False, repr=False)

    @property
    def stem(self) -> int:
        return self.t - self.s

    @property
    def label(self) -> str:
        return self.complex.label

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.uint8)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: "ExtClass") -> "ExtClass":
        if (self.complex, self.s, self.t) != (other.complex, other.s, other.t):
            raise ValueError("adding classes of different groups")
        return ExtClass(self.complex, self.s, self.t,
                        tuple(int(a) ^ int(b) for a, b in zip(self.coords, other.coords)))

    def describe(self) -> str:
        label = self.name or "[" + "".join(map(str, self.coords)) + "]"
        return f"{label} in Ext^({self.s},{self.t})({self.label})"


def make_class(spec, s: int, t: int, vec, **kw) -> ExtClass:
    return ExtClass(spec, s, t, tuple(int(v) & 1 for v in np.asarray(vec).ravel()), **kw)


@dataclass
class ExtGroup:
    complex: cx.ComplexSpec
    s: int
    t: int
    dim: int
    basis: list

    @property
    def stem(self) -> int:
        return self.t - self.s


# ---------------------------------------------------------------------------
# Lambda model


class LambdaExt:
    """Homology of a Lambda cochain complex, with cochain representatives.

    Columns are ordered by cell, highest first, so reduced representatives
    have the lowest possible leading cell in their coset.
    """

    def __init__(self, spec: cx.ComplexSpec):
        self.spec = spec
        self.complex = cx.LambdaComplex(spec)
        self._groups: dict = {}

    def _order(self, s, t):
        basis = self.complex.basis(s, t)
        # highest cell first; inside a cell keep lexicographic word order
        return sorted(range(len(basis)), key=lambda i: (-basis[i][0], i))

    def _data(self, s: int, t: int):
        key = (s, t)
        hit = self._groups.get(key)
        if hit is not None:
            return hit
        n = len(self.complex.basis(s, t))
        order = np.array(self._order(s, t), dtype=np.int64)
        if n == 0:
            data = (order, np.zeros((0, 0), np.uint8), np.zeros((0, 0), np.uint8))
            self._groups[key] = data
            return data
        d_out = self.complex.matrix(s, t).to_dense()  # n x m
        cycles = gf2_kernel(d_out.T) if d_out.shape[1] else np.eye(n, dtype=np.uint8)
        if s > 0 and len(self.complex.basis(s - 1, t)):
            bnd = self.complex.matrix(s - 1, t).to_dense()
        else:
            bnd = np.zeros((0, n), np.uint8)
        # permute columns so highest cells come first
        cyc_p = cycles[:, order] if len(cycles) else cycles.reshape(0, n)
        bnd_p = rref(bnd[:, order]) if len(bnd) else bnd
        reps = _quotient_basis(bnd_p, cyc_p)
        data = (order, bnd_p, reps)
        self._groups[key] = data
        return data

    def dim(self, s: int, t: int) -> int:
        return len(self._data(s, t)[2])

    def group(self, s: int, t: int) -> ExtGroup:
        order, _, reps = self._data(s, t)
        basis = []
        for r in reps:
            coords = np.zeros(len(order), np.uint8)
            coords[order] = r
            rep = self.complex.cochain_of(s, t, coords)
            basis.append(make_class(self.spec, s, t,
                                    np.eye(len(reps), dtype=np.uint8)[len(basis)],
                                    ah_filtration=rep.leading_cell, representative=rep))
        return ExtGroup(self.spec, s, t, len(reps), basis)

    def class_of(self, c: cx.Cochain):
        """Coordinates of a cocycle in the canonical basis (None if not a cocycle)."""
        if cx.total_differential(c):
            return None
        order, bnd, reps = self._data(c.s, c.t)
        v = self.complex.vector(c)[order]
        v = _reduce(bnd, v)
        coords = np.zeros(len(reps), np.uint8)
        for k, r in enumerate(reps):
            p = int(np.flatnonzero(r)[0])
            if v[p]:
                v ^= r
                coords[k] = 1
        if v.any():
            raise ArithmeticError("cocycle outside the span of cycles; homology basis is wrong")
        return coords

    def is_boundary(self, c: cx.Cochain) -> bool:
        order, bnd, _ = self._data(c.s, c.t)
        v = self.complex.vector(c)[order]
        return not _reduce(bnd, v).any()


def _reduce(rref_rows: np.ndarray, v: np.ndarray) -> np.ndarray:
    v = v.copy()
    for r in rref_rows:
        p = int(np.flatnonzero(r)[0])
        if v[p]:
            v ^= r
    return v


def _quotient_basis(bnd_rref: np.ndarray, cycles: np.ndarray) -> np.ndarray:
    if len(cycles) == 0:
        return cycles
    red = np.array([_reduce(bnd_rref, z) for z in cycles], dtype=np.uint8)
    red = red[red.any(axis=1)] if len(red) else red
    if len(red) == 0:
        return red.reshape(0, cycles.shape[1])
    return rref(red)


def lambda_transfer(src: LambdaExt, dst: LambdaExt, s: int, t: int) -> np.ndarray:
    """Matrix of (n; I) ↦ λ_n I from Ext^{s,t}(P) to Ext^{s+1,t+1}(S^0)."""
    g = src.group(s, t)
    cols = []
    for c in g.basis:
        img = cx.transfer_cochain(c.representative)
        coords = dst.class_of(img)
        if coords is None:
            raise ArithmeticError("transfer of a cocycle is not a cocycle")
        cols.append(coords)
    if not cols:
        return np.zeros((dst.dim(s + 1, t + 1), 0), np.uint8)
    return np.array(cols, dtype=np.uint8).T


# ---------------------------------------------------------------------------
# resolution model


@dataclass
class EngineConfig:
    s_max: int = 9
    t_max: int = 56
    cache_dir: str | None = None
    m4r: bool = True
    keep_qi_below: int | None = None


class ExtEngine:
    """Lazily built minimal resolutions for the complexes in play."""

    def __init__(self, config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        self._res: dict = {}
        self._maps: dict = {}
        self._lock = threading.RLock()
        self._ah: dict = {}

    # -- resolutions -----------------------------------------------------
    def resolution(self, spec: cx.ComplexSpec, s: int | None = None, t: int | None = None):
        """Resolution of the complex's cohomology module covering Ext^{≤s, ≤t} (module degrees)."""
        s = self.config.s_max if s is None else s
        t = self.config.t_max if t is None else t
        with self._lock:
            if spec.kind == cx.SPHERE:
                base = self._base(("sphere",), amodules.SphereModule(0), s, t - spec.shift)
                return shifted(base, spec.shift)
            return self._base(spec.module_key(), None, s, t, spec)

    def _base(self, key, module, s, t, spec=None):
        res = self._res.get(key)
        if res is not None and res.s_max < s:
            log.info("rebuilding %s with s_max=%d", key, s)
            res = None
            self._maps.clear()
            self._ah.clear()
        if res is None:
            if module is None:
                module = spec.module()
            res = self._load_cached(key, module, s) or Resolution(
                module, max(s, self.config.s_max), module.min_degree - 1,
                keep_qi_below=self.config.keep_qi_below, m4r=self.config.m4r)
            self._res[key] = res
        if res.t_max < t:
            res.extend(res.s_max, t)
            self._store_cached(key, res)
        return res

    def ext_dim(self, spec, s, t) -> int:
        return self.resolution(spec, s, t).ngens(s, t)

    def group(self, spec, s, t) -> ExtGroup:
        dim = self.ext_dim(spec, s, t)
        basis = [make_class(spec, s, t, np.eye(dim, dtype=np.uint8)[i]) for i in range(dim)]
        return ExtGroup(spec, s, t, dim, basis)

    def chart(self, spec, s_max, t_max, stems=None) -> dict:
        res = self.resolution(spec, s_max, t_max)
        out = {}
        for t in range(spec.bottom, t_max + 1):
            for s in range(0, s_max + 1):
                if stems is not None and (t - s) not in stems:
                    continue
                n = res.ngens(s, t)
                if n:
                    out[(s, t)] = n
        return out

    # -- chain maps ------------------------------------------------------
    def map_matrix(self, src: cx.ComplexSpec, tgt: cx.ComplexSpec, s: int, t: int) -> np.ndarray:
        """Matrix of Ext^{s,t}(src) -> Ext^{s,t}(tgt) induced by a cellwise map.

        The map keeps the cells the two complexes share.  Columns index the
        source basis, rows the target basis.
        """
        cm = self._cell_chain_map(src, tgt, s, t)
        return cm.induced_matrix(s, t)

    def _cell_chain_map(self, src, tgt, s, t):
        key = ("cell", src, tgt)
        res_src = self.resolution(src, s, t)
        res_tgt = self.resolution(tgt, s, t)
        cm = self._maps.get(key)
        if cm is None:
            check_cell_map(src, tgt, t)
            # cohomology goes the other way: H*(tgt) -> H*(src)
            cm = module_map_initial(res_tgt, res_src, src.has_cell)
            self._maps[key] = cm
        return cm

    def connecting_matrix(self, sub: cx.ComplexSpec, total: cx.ComplexSpec, quo: cx.ComplexSpec,
                          s: int, t: int) -> np.ndarray:
        """δ: Ext^{s,t}(quo) -> Ext^{s+1,t}(sub) for a cofibration sub -> total -> quo."""
        key = ("delta", sub, total, quo)
        q_res = self.resolution(sub, s + 1, t)
        k_res = self.resolution(quo, s + 1, t)
        cm = self._maps.get(key)
        if cm is None:
            check_cofibration(sub, total, quo, t)
            cm = extension_initial(q_res, k_res, total.module())
            self._maps[key] = cm
        return cm.induced_matrix(s + 1, t)

    def transfer_matrix(self, s: int, t: int) -> np.ndarray:
        """Algebraic transfer Ext^{s,t}(P_1^inf) -> Ext^{s+1,t+1}(S^0)."""
        p_res = self.resolution(cx.projective(1, None), s + 1, t)
        key = ("transfer",)
        cm = self._maps.get(key)
        sphere_res = self.resolution(cx.sphere(0), s + 1, t + 1)
        if cm is None:
            q_res = shifted(sphere_res.base if hasattr(sphere_res, "base") else sphere_res, -1)
            total = amodules.ProjectiveModule(-1, None, drop=(0,))
            cm = extension_initial(q_res, p_res, total)
            self._maps[key] = cm
        return cm.induced_matrix(s + 1, t)

    def transfer(self, x: ExtClass) -> ExtClass:
        m = self.transfer_matrix(x.s, x.t)
        return make_class(cx.sphere(0), x.s + 1, x.t + 1, (m @ x.vector) % 2)

    # -- long exact sequences --------------------------------------------
    def les(self, sub, total, quo, t_range, s_max: int) -> "LESReport":
        return les_report(self, sub, total, quo, t_range, s_max)

    # -- Atiyah-Hirzebruch filtration --------------------------------------
    def ah_data(self, spec: cx.ComplexSpec, s: int, t: int) -> "AHData":
        key = (spec, s, t)
        hit = self._ah.get(key)
        if hit is None:
            hit = ah_filtration_data(self, spec, s, t)
            self._ah[key] = hit
        return hit

    # -- caching -----------------------------------------------------------
    def _cache_path(self, key) -> Path | None:
        if not self.config.cache_dir:
            return None
        tag = hashlib.sha1(repr(key).encode()).hexdigest()[:16]
        return Path(self.config.cache_dir) / f"res-{tag}"

    def _load_cached(self, key, module, s):
        path = self._cache_path(key)
        if path is None or not (path / "meta.json").exists():
            return None
        try:
            res = cache_load(path, module)
        except (ValueError, OSError) as exc:
            log.warning("ignoring cache %s: %s", path, exc)
            return None
        if res.s_max < s:
            return None
        return res

    def _store_cached(self, key, res):
        path = self._cache_path(key)
        if path is not None:
            cache_store(path, res, key)


def check_cell_map(src: cx.ComplexSpec, tgt: cx.ComplexSpec, t_max: int) -> None:
    """The cellwise map H*(tgt) -> H*(src) must commute with the Steenrod action."""
    m_src, m_tgt = src.module(), tgt.module()
    top = t_max
    cells = [c for c in range(min(src.bottom, tgt.bottom), top + 1)
             if m_tgt.has_cell(c)]
    for c in cells:
        for d in range(1, top - c + 1):
            if not (m_src.has_cell(c + d) or m_tgt.has_cell(c + d)):
                continue
            for seq in st.basis(d):
                lhs = m_tgt.has_cell(c + d) and m_tgt.act(seq, c) and m_src.has_cell(c + d)
                rhs = m_src.has_cell(c) and m_src.has_cell(c + d) and m_src.act(seq, c)
                if bool(lhs) != bool(rhs):
                    raise cx.ComplexSpecError(
                        f"cells of {src.label} do not map to {tgt.label}: "
                        f"{st.milnor_name(seq)} on cell {c}")


# ---------------------------------------------------------------------------
# long exact sequences


def check_cofibration(sub, total, quo, t_max: int) -> None:
    """sub and quo must split the cells of total, each side a module map."""
    cells = total.cell_list(t_max)
    a = set(sub.cell_list(t_max))
    b = set(quo.cell_list(t_max))
    if a & b or a | b != set(cells):
        raise cx.ComplexSpecError(f"{sub.label} and {quo.label} do not split the cells of {total.label}")
    check_cell_map(sub, total, t_max)
    check_cell_map(total, quo, t_max)


@dataclass
class LESNode:
    s: int
    t: int
    dims: tuple  # (sub, total, quotient)
    ranks: tuple  # (i, p, delta)
    exact: bool


@dataclass
class LESReport:
    sub: str
    total: str
    quotient: str
    nodes: list

    @property
    def exact(self) -> bool:
        return all(n.exact for n in self.nodes)


def les_report(engine: ExtEngine, sub, total, quo, t_range, s_max) -> LESReport:
    """Check exactness of ... Ext^s(sub) -> Ext^s(total) -> Ext^s(quo) -> Ext^{s+1}(sub) ..."""
    nodes = []
    for t in t_range:
        for s in range(0, s_max):
            i_s = engine.map_matrix(sub, total, s, t)
            p_s = engine.map_matrix(total, quo, s, t)
            d_s = engine.connecting_matrix(sub, total, quo, s, t)
            i_next = engine.map_matrix(sub, total, s + 1, t)
            nodes.append(_les_node(s, t, i_s, p_s, d_s, i_next))
    report = LESReport(sub.label, total.label, quo.label, nodes)
    if not report.exact:
        bad = [(n.s, n.t) for n in nodes if not n.exact]
        raise ArithmeticError(f"long exact sequence fails at {bad[:5]}")
    return report


def _les_node(s, t, i_s, p_s, d_s, i_next) -> LESNode:
    da, dx, dq = i_s.shape[1], i_s.shape[0], p_s.shape[0]
    ri, rp, rd = gf2_rank(i_s), gf2_rank(p_s), gf2_rank(d_s)
    checks = [
        s > 0 or ri == da,  # Ext^0 of the sub injects
        not (p_s @ i_s % 2).any(),
        ri + rp == dx,
        not (d_s @ p_s % 2).any(),
        rp + rd == dq,
        not (i_next @ d_s % 2).any(),
        rd + gf2_rank(i_next) == i_next.shape[1],
    ]
    return LESNode(s, t, (da, dx, dq), (ri, rp, rd), all(checks))


def lambda_les(sub: LambdaExt, total: LambdaExt, quo: LambdaExt, t_range, s_max) -> LESReport:
    """The same exactness check in the Lambda model; δ by the zigzag lift, d, restrict."""
    nodes = []
    for t in t_range:
        for s in range(0, s_max):
            i_s = lambda_map(sub, total, s, t)
            p_s = lambda_map(total, quo, s, t)
            d_s = lambda_connecting(sub, total, quo, s, t)
            i_next = lambda_map(sub, total, s + 1, t)
            nodes.append(_les_node(s, t, i_s, p_s, d_s, i_next))
    report = LESReport(sub.spec.label, total.spec.label, quo.spec.label, nodes)
    if not report.exact:
        bad = [(n.s, n.t) for n in nodes if not n.exact]
        raise ArithmeticError(f"long exact sequence fails at {bad[:5]}")
    return report


def lambda_map(src: LambdaExt, tgt: LambdaExt, s: int, t: int) -> np.ndarray:
    """Induced map of the cellwise chain map src -> tgt, verified on the way."""
    f = cx.LambdaChainMap(src.spec, tgt.spec)
    if not f.verify(s, t) or (s > 0 and not f.verify(s - 1, t)):
        raise ArithmeticError(f"{src.spec.label} -> {tgt.spec.label} is not a chain map at ({s},{t})")
    cols = [tgt.class_of(f.apply(c.representative)) for c in src.group(s, t).basis]
    if not cols:
        return np.zeros((tgt.dim(s, t), 0), np.uint8)
    return np.array(cols, dtype=np.uint8).T.reshape(tgt.dim(s, t), len(cols))


def lambda_connecting(sub: LambdaExt, total: LambdaExt, quo: LambdaExt, s: int, t: int) -> np.ndarray:
    cols = []
    for c in quo.group(s, t).basis:
        lifted = cx.Cochain(total.spec, s, t, c.representative.terms)
        image = cx.total_differential(lifted)
        if any(not sub.spec.has_cell(cell) for cell, _ in image.terms):
            raise ArithmeticError("zigzag image leaves the subcomplex")
        cols.append(sub.class_of(cx.Cochain(sub.spec, s + 1, t, image.terms)))
    n = sub.dim(s + 1, t)
    if not cols:
        return np.zeros((n, 0), np.uint8)
    return np.array(cols, dtype=np.uint8).T.reshape(n, len(cols))


# ---------------------------------------------------------------------------
# Atiyah-Hirzebruch filtration and cell names


@dataclass
class AHData:
    """Filtration-adapted basis of Ext^{s,t}(X) and the cell labels.

    ``basis[k]`` has filtration ``filtration[k]`` (the smallest n such that
    the class comes from the n-skeleton); ``labels[k]`` is the coset of sphere
    classes a in Ext^{s, t-n}(S^0) with the class detected by a[n]:
    ``(representative, indeterminacy rows)``.
    """

    spec: cx.ComplexSpec
    s: int
    t: int
    basis: np.ndarray
    filtration: list
    labels: list

    def filtration_of(self, vec) -> int | None:
        vec = np.asarray(vec, np.uint8)
        if not vec.any():
            return None
        # basis is ordered by filtration; smallest prefix containing vec
        for k in range(1, len(self.basis) + 1):
            if in_span(self.basis[:k], vec):
                return self.filtration[k - 1]
        raise ArithmeticError("vector outside Ext group")

    def label_of(self, vec):
        """(n, coset representative, indeterminacy) for a nonzero class."""
        vec = np.asarray(vec, np.uint8)
        n = self.filtration_of(vec)
        if n is None:
            return None
        return n, self._labeller[n](vec)


def ah_filtration_data(engine: ExtEngine, spec: cx.ComplexSpec, s: int, t: int) -> AHData:
    dim = engine.ext_dim(spec, s, t)
    cells = [c for c in spec.cell_list(t - s)]
    if spec.kind == cx.SPHERE:
        eye = np.eye(dim, dtype=np.uint8)
        data = AHData(spec, s, t, eye, [spec.shift] * dim, [])
        data._labeller = {spec.shift: lambda v: (np.asarray(v, np.uint8), np.zeros((0, dim), np.uint8))}
        data.labels = [data._labeller[spec.shift](eye[k]) for k in range(dim)]
        return data
    # F_n = kernel of Ext(X) -> Ext(X / X^{<=n})
    flags = []
    for n in cells:
        rest = [c for c in spec.cell_list(t) if c > n]
        if not rest:
            kern = np.eye(dim, dtype=np.uint8)
        else:
            quo = spec.restrict(n + 1, None)
            m = engine.map_matrix(spec, quo, s, t)
            kern = gf2_kernel(m) if m.shape[0] else np.eye(dim, dtype=np.uint8)
        flags.append((n, kern))
    basis_rows: list = []
    filt: list = []
    for n, kern in flags:
        for row in kern:
            if not basis_rows or not in_span(np.array(basis_rows), row):
                basis_rows.append(row)
                filt.append(n)
    basis = np.array(basis_rows, dtype=np.uint8).reshape(len(basis_rows), dim)
    labeller = {}
    for n in sorted(set(filt)):
        labeller[n] = _cell_labeller(engine, spec, s, t, n)
    data = AHData(spec, s, t, basis, filt, [])
    data._labeller = labeller
    data.labels = [labeller[filt[k]](basis[k]) for k in range(len(filt))]
    return data


@dataclass
class CellLift:
    """Result of lifting a sphere class a to a class a[n] of a complex."""

    cell: int
    image: np.ndarray  # a pushed into Ext of the piece above cell n-1
    vector: np.ndarray | None  # canonical class in Ext(X), None if a[n] is absent
    lower: np.ndarray  # RREF basis of the lower filtration F_{n-1}

    @property
    def present(self) -> bool:
        return self.vector is not None and self.image.any()


def ah_lift(engine: ExtEngine, spec: cx.ComplexSpec, n: int, s: int, t: int, a) -> CellLift:
    """Classes of Ext^{s,t}(X) detected by a ∈ Ext^{s,t-n}(S^n) on cell n.

    The answer is canonical: reduced against the lower filtration F_{n-1},
    which is the kernel of Ext(X) -> Ext(X/X^{<n}).
    """
    if not spec.has_cell(n):
        raise cx.ComplexSpecError(f"{spec.label} has no cell {n}")
    a = np.asarray(a, np.uint8)
    dim = engine.ext_dim(spec, s, t)
    cell = cx.sphere(n)
    if spec.kind == cx.SPHERE:
        return CellLift(n, a, a.copy(), np.zeros((0, dim), np.uint8))
    piece = spec.restrict(n, None) if n > spec.bottom else spec
    from_cell = engine.map_matrix(cell, piece, s, t)
    image = (from_cell @ a) % 2 if from_cell.size else np.zeros(from_cell.shape[0], np.uint8)
    if piece == spec:
        to_piece = np.eye(dim, dtype=np.uint8)
    else:
        to_piece = engine.map_matrix(spec, piece, s, t)
    lower = gf2_kernel(to_piece) if dim else np.zeros((0, 0), np.uint8)
    lower = lower[lower.any(axis=1)] if len(lower) else lower.reshape(0, dim)
    if not image.any():
        return CellLift(n, image, None, lower)
    x = gf2_solve(to_piece, image) if dim else None
    if x is not None:
        x = _reduce(lower, x.astype(np.uint8))
    return CellLift(n, image, x, lower)


def _cell_labeller(engine, spec, s, t, n):
    """Return vec ↦ (a, indeterminacy) for classes of filtration n."""
    top_piece = spec.restrict(n, None) if n > spec.bottom else spec
    to_top = engine.map_matrix(spec, top_piece, s, t) if top_piece != spec else None
    cell = cx.sphere(n)
    from_cell = engine.map_matrix(cell, top_piece, s, t)  # Ext(S^n) -> Ext(top piece)
    indet = gf2_kernel(from_cell) if from_cell.shape[1] else np.zeros((0, 0), np.uint8)

    def label(vec):
        img = vec if to_top is None else (to_top @ vec) % 2
        a = gf2_solve(from_cell, img)
        if a is None:
            raise ArithmeticError(f"class of filtration {n} is not detected on cell {n}")
        return a.astype(np.uint8), indet

    return label


# ---------------------------------------------------------------------------
# persistent cache


def cache_store(path: Path, res: Resolution, key) -> None:
    """Write a resolution (generators, differentials, quasi-inverses)."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    arrays = {}
    for s in range(res.s_max + 1):
        arrays[f"deg_{s}"] = np.array(res.gen_deg[s], dtype=np.int64)
        blk_off, blk_ids, idx_off, idx = [0], [], [0], []
        for entry in res.gen_d[s]:
            for b, ii in entry:
                blk_ids.append(b)
                idx.extend(int(v) for v in ii)
                idx_off.append(len(idx))
            blk_off.append(len(blk_ids))
        arrays[f"dblk_off_{s}"] = np.array(blk_off, dtype=np.int64)
        arrays[f"dblk_{s}"] = np.array(blk_ids, dtype=np.int64)
        arrays[f"didx_off_{s}"] = np.array(idx_off, dtype=np.int64)
        arrays[f"didx_{s}"] = np.array(idx, dtype=np.int64)
    qi_keys = sorted(res.qi)
    for s, t in qi_keys:
        q = res.qi[(s, t)]
        arrays[f"qi_{s}_{t}_piv"] = np.asarray(q.pivots, dtype=np.int64)
        arrays[f"qi_{s}_{t}_img"] = np.asarray(q.image, dtype=np.uint64)
        arrays[f"qi_{s}_{t}_pre"] = np.asarray(q.preimage, dtype=np.uint64)
        arrays[f"qi_{s}_{t}_dims"] = np.array([q.source_dim, q.target_dim], dtype=np.int64)
    buf = io.BytesIO()
    np.savez_compressed(buf, **arrays)
    payload = buf.getvalue()
    meta = {
        "version": CACHE_VERSION,
        "key": repr(key),
        "module": res.module.identity,
        "s_max": res.s_max,
        "t_max": res.t_max,
        "qi": [list(k) for k in qi_keys],
        "sha256": hashlib.sha256(payload).hexdigest(),
    }
    tmp = path / "data.npz.tmp"
    tmp.write_bytes(payload)
    tmp.replace(path / "data.npz")
    (path / "meta.json").write_text(json.dumps(meta, indent=1, sort_keys=True))


def cache_load(path: Path, module) -> Resolution:
    path = Path(path)
    meta = json.loads((path / "meta.json").read_text())
    if meta.get("version") != CACHE_VERSION:
        raise ValueError(f"cache version {meta.get('version')} != {CACHE_VERSION}")
    payload = (path / "data.npz").read_bytes()
    if hashlib.sha256(payload).hexdigest() != meta["sha256"]:
        raise ValueError("cache checksum mismatch")
    if meta["module"] != module.identity:
        raise ValueError(f"cache holds {meta['module']}, wanted {module.identity}")
    data = np.load(io.BytesIO(payload))
    res = Resolution.__new__(Resolution)
    res.module = module
    res.s_max = meta["s_max"]
    res.t_max = meta["t_max"]
    res.target_t = meta["t_max"]
    res.keep_qi_below = None
    res.m4r = True
    res._offsets = {}
    res.timings = {}
    res.gen_deg = []
    res.gen_d = []
    for s in range(res.s_max + 1):
        res.gen_deg.append([int(d) for d in data[f"deg_{s}"]])
        blk_off, blks = data[f"dblk_off_{s}"], data[f"dblk_{s}"]
        idx_off, idx = data[f"didx_off_{s}"], data[f"didx_{s}"]
        entries = []
        for g in range(len(res.gen_deg[s])):
            entry = []
            for j in range(blk_off[g], blk_off[g + 1]):
                entry.append((int(blks[j]), idx[idx_off[j]: idx_off[j + 1]].astype(np.int64)))
            entries.append(entry)
        res.gen_d.append(entries)
    res.qi = {}
    for s, t in meta["qi"]:
        dims = data[f"qi_{s}_{t}_dims"]
        res.qi[(s, t)] = QuasiInverse(data[f"qi_{s}_{t}_piv"], data[f"qi_{s}_{t}_img"],
                                      data[f"qi_{s}_{t}_pre"], int(dims[0]), int(dims[1]))
    return res
