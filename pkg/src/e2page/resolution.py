"""Minimal free resolutions of finite modules over the Steenrod algebra.

The resolution is computed one internal degree at a time.  In degree ``t`` the
map ``d_s: F_s -> F_{s-1}`` restricted to old generators is brought to echelon
form with an identity block recording row operations; the zero rows give the
kernel, and the part of ``ker d_{s-1}`` not hit by old generators is covered by
new generators in degree ``t``.  The echelon rows with their recorded
preimages form a quasi-inverse used later to lift chain maps.

Conventions: ``F_s(t)`` has one block per generator of ``F_s`` of degree at
most ``t`` (generators in creation order), and a block is the Milnor basis of
``A`` in degree ``t - deg(g)``.  ``F_{-1}`` is the module being resolved.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import steenrod as st
from .f2_linalg import QuasiInverse, echelon, nwords, _reduce_vector

log = logging.getLogger(__name__)


@njit(cache=True)
def _fill_block(out, row0, col0, off, ind, nb, s_list, na):
    for r in range(na):
        base = r * nb
        for si in s_list:
            p = base + si
            for q in range(off[p], off[p + 1]):
                col = col0 + ind[q]
                out[row0 + r, col >> 6] ^= np.uint64(1) << np.uint64(col & 63)


@njit(cache=True)
def _act_block(out, col_out, off, ind, nb, a_list, vec, lo, hi):
    """out += a * (bits lo..hi of vec), with a = sum of A_a basis indices a_list."""
    for j in range(lo, hi):
        if (vec[j >> 6] >> np.uint64(j & 63)) & np.uint64(1):
            sj = j - lo
            for ai in a_list:
                p = ai * nb + sj
                for q in range(off[p], off[p + 1]):
                    col = col_out + ind[q]
                    out[col >> 6] ^= np.uint64(1) << np.uint64(col & 63)


@njit(cache=True)
def _bits_in_range(vec, lo, hi):
    n = 0
    for j in range(lo, hi):
        if (vec[j >> 6] >> np.uint64(j & 63)) & np.uint64(1):
            n += 1
    out = np.empty(n, dtype=np.int64)
    k = 0
    for j in range(lo, hi):
        if (vec[j >> 6] >> np.uint64(j & 63)) & np.uint64(1):
            out[k] = j - lo
            k += 1
    return out


@dataclass
class Generator:
    s: int
    index: int
    degree: int


class Resolution:
    """Minimal resolution ``... -> F_1 -> F_0 -> module``.

    ``module`` must provide ``dim(n)``, ``action_table(a, b)`` (same layout as
    :func:`steenrod.product_table`, acting on module basis elements),
    ``min_degree`` and ``name``.
    """

    def __init__(self, module, s_max: int, t_max: int, keep_qi_below: int | None = None,
                 m4r: bool = False):
        self.module = module
        self.s_max = s_max
        self.t_max = module.min_degree - 1
        self.target_t = t_max
        self.keep_qi_below = keep_qi_below
        self.m4r = m4r
        self.gen_deg: list[list[int]] = [[] for _ in range(s_max + 1)]
        # d(g) as list of (target block, indices inside block); target -1 = module
        self.gen_d: list[list[list[tuple[int, np.ndarray]]]] = [[] for _ in range(s_max + 1)]
        self._offsets: dict[tuple[int, int], np.ndarray] = {}
        self.qi: dict[tuple[int, int], QuasiInverse] = {}
        self.timings: dict[tuple[int, int], float] = {}
        self.extend(s_max, t_max)

    # -- bookkeeping -----------------------------------------------------
    def offsets(self, s: int, t: int) -> np.ndarray:
        """Block offsets of F_s(t); last entry is dim F_s(t)."""
        key = (s, t)
        hit = self._offsets.get(key)
        if hit is not None and len(hit) - 1 == self._ngens_upto(s, t):
            return hit
        degs = [d for d in self.gen_deg[s] if d <= t]
        off = np.zeros(len(degs) + 1, dtype=np.int64)
        for i, d in enumerate(degs):
            off[i + 1] = off[i] + st.dimension(t - d)
        self._offsets[key] = off
        return off

    def _ngens_upto(self, s: int, t: int) -> int:
        n = 0
        for d in self.gen_deg[s]:
            if d <= t:
                n += 1
            else:
                break
        return n

    def dim(self, s: int, t: int) -> int:
        if s < 0:
            return self.module.dim(t)
        return int(self.offsets(s, t)[-1])

    def ngens(self, s: int, t: int) -> int:
        """Number of generators of F_s in degree exactly t = dim Ext^{s,t}."""
        return sum(1 for d in self.gen_deg[s] if d == t)

    def gens_in_degree(self, s: int, t: int) -> list[int]:
        return [i for i, d in enumerate(self.gen_deg[s]) if d == t]

    def computed(self, s: int, t: int) -> bool:
        return 0 <= s <= self.s_max and t <= self.t_max

    # -- main loop -------------------------------------------------------
    def extend(self, s_max: int, t_max: int) -> None:
        if s_max > self.s_max:
            raise ValueError("cannot raise s_max of an existing resolution")
        for t in range(self.t_max + 1, t_max + 1):
            kernel = None
            for s in range(0, self.s_max + 1):
                t0 = time.perf_counter()
                kernel = self._step(s, t, kernel)
                self.timings[(s, t)] = time.perf_counter() - t0
            self.t_max = t
            log.debug("%s: degree %d done", self.module.name, t)
        self.target_t = max(self.target_t, t_max)

    def _fill_rows(self, mat, s: int, t: int, gens: range, row_base: int) -> None:
        tgt_off = self.offsets(s - 1, t) if s > 0 else None
        row = row_base
        for i in gens:
            deg = self.gen_deg[s][i]
            a = t - deg
            na = st.dimension(a)
            for blk, idx in self.gen_d[s][i]:
                if s == 0:
                    off, ind = self.module.action_table(a, deg)
                    nb = self.module.dim(deg)
                    col0 = 0
                else:
                    b = deg - self.gen_deg[s - 1][blk]
                    off, ind = st.product_table(a, b)
                    nb = st.dimension(b)
                    col0 = int(tgt_off[blk])
                _fill_block(mat, row, col0, off, ind, nb, idx, na)
            row += na

    def _step(self, s: int, t: int, prev_kernel):
        if s == 0:
            tgt = self.module.dim(t)
            # everything in the module must be hit
            prev_kernel = np.zeros((tgt, nwords(tgt)), dtype=np.uint64)
            for i in range(tgt):
                prev_kernel[i, i >> 6] = np.uint64(1) << np.uint64(i & 63)
        else:
            tgt = self.dim(s - 1, t)
        old = self._ngens_upto(s, t)
        n_old = self.dim(s, t)
        n_new_max = 0 if prev_kernel is None else len(prev_kernel)
        tw = nwords(tgt)
        sw = nwords(n_old + n_new_max)
        mat = np.zeros((n_old + n_new_max, tw + sw), dtype=np.uint64)
        self._fill_rows(mat, s, t, range(old), 0)
        base = tw * 64
        for r in range(n_old):
            c = base + r
            mat[r, c >> 6] |= np.uint64(1) << np.uint64(c & 63)
        piv = echelon(mat[:n_old], tgt, m4r=self.m4r) if n_old else np.zeros(0, np.int64)
        rank = len(piv)
        kernel = np.ascontiguousarray(mat[rank:n_old, tw:])
        new_rows = []
        if prev_kernel is not None and len(prev_kernel):
            cur_rows = mat[:rank].copy()
            cur_piv = np.asarray(piv, dtype=np.int64)
            for v in prev_kernel:
                w = np.zeros(tw + sw, dtype=np.uint64)
                w[:tw] = v[:tw]
                _reduce_vector(w, cur_rows, cur_piv, tgt)
                if not w[:tw].any():
                    continue
                j = len(new_rows)
                c = base + n_old + j
                w[tw:] = 0
                w[c >> 6] |= np.uint64(1) << np.uint64(c & 63)
                new_rows.append(w)
                lead = _lowest_bit(w[:tw])
                pos = int(np.searchsorted(cur_piv, lead))
                cur_rows = np.insert(cur_rows, pos, w, axis=0)
                cur_piv = np.insert(cur_piv, pos, lead)
            img_rows, pivots_arr = cur_rows, cur_piv
        else:
            img_rows = mat[:rank].copy()
            pivots_arr = np.asarray(piv, dtype=np.int64)
        for w in new_rows:
            self.gen_deg[s].append(t)
            self.gen_d[s].append(self._sparse(s, t, w[:tw]))
        n_src = n_old + len(new_rows)
        keep = self.keep_qi_below is None or t <= self.keep_qi_below
        if keep:
            self.qi[(s, t)] = QuasiInverse(
                pivots_arr, np.ascontiguousarray(img_rows[:, :tw]),
                np.ascontiguousarray(img_rows[:, tw: tw + nwords(n_src)]), n_src, tgt)
        return np.ascontiguousarray(kernel[:, : nwords(n_src)])

    def _sparse(self, s: int, t: int, vec: np.ndarray):
        if s == 0:
            return [(-1, _bits_in_range(vec, 0, self.module.dim(t)))]
        off = self.offsets(s - 1, t)
        out = []
        for blk in range(len(off) - 1):
            idx = _bits_in_range(vec, int(off[blk]), int(off[blk + 1]))
            if len(idx):
                out.append((blk, idx))
        return out

    # -- algebra on free modules ------------------------------------------
    def act(self, s: int, a_deg: int, a_idx: np.ndarray, vec: np.ndarray, t: int) -> np.ndarray:
        """a * vec where vec in F_s(t) and a in A_{a_deg}; result in F_s(t + a_deg)."""
        t2 = t + a_deg
        out = np.zeros(nwords(self.dim(s, t2)), dtype=np.uint64)
        if len(a_idx) == 0:
            return out
        off_in = self.offsets(s, t)
        off_out = self.offsets(s, t2)
        for blk in range(len(off_in) - 1):
            lo, hi = int(off_in[blk]), int(off_in[blk + 1])
            if lo == hi:
                continue
            b = t - self.gen_deg[s][blk]
            off, ind = st.product_table(a_deg, b)
            _act_block(out, int(off_out[blk]), off, ind, st.dimension(b), a_idx, vec, lo, hi)
        return out

    def d_vector(self, s: int, t: int, vec: np.ndarray) -> np.ndarray:
        """Apply d_s to an element of F_s(t); result in F_{s-1}(t) (or the module)."""
        tgt = self.dim(s - 1, t)
        out = np.zeros(nwords(tgt), dtype=np.uint64)
        off_in = self.offsets(s, t)
        tgt_off = self.offsets(s - 1, t) if s > 0 else None
        for blk in range(len(off_in) - 1):
            lo, hi = int(off_in[blk]), int(off_in[blk + 1])
            if lo == hi:
                continue
            deg = self.gen_deg[s][blk]
            a = t - deg
            for tblk, idx in self.gen_d[s][blk]:
                # coefficient of generator blk in vec is an element of A_a;
                # multiply each of its basis elements by the d(g) coefficient
                if s == 0:
                    off, ind = self.module.action_table(a, deg)
                    nb = self.module.dim(deg)
                    col0 = 0
                else:
                    b = deg - self.gen_deg[s - 1][tblk]
                    off, ind = st.product_table(a, b)
                    nb = st.dimension(b)
                    col0 = int(tgt_off[tblk])
                sel = _bits_in_range(vec, lo, hi)
                if len(sel):
                    _act_left(out, col0, off, ind, nb, sel, idx)
        return out

    def solve(self, s: int, t: int, y: np.ndarray):
        """x in F_s(t) with d x = y, or None if y is not a boundary."""
        qi = self.qi.get((s, t))
        if qi is None:
            raise KeyError(f"no quasi-inverse stored for (s={s}, t={t})")
        y = _fit(y, qi.target_dim)
        x = qi.solve(y)
        if x is None:
            return None
        return _fit(x, self.dim(s, t))

    def generator_vector(self, s: int, i: int) -> np.ndarray:
        t = self.gen_deg[s][i]
        v = np.zeros(nwords(self.dim(s, t)), dtype=np.uint64)
        pos = int(self.offsets(s, t)[i])
        v[pos >> 6] |= np.uint64(1) << np.uint64(pos & 63)
        return v

    def ext_dims(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for s in range(self.s_max + 1):
            for d in self.gen_deg[s]:
                out[(s, d)] = out.get((s, d), 0) + 1
        return out


@njit(cache=True)
def _act_left(out, col0, off, ind, nb, sel, idx):
    # sum over R in sel (coefficient of the source generator) and S in idx
    for r in sel:
        base = r * nb
        for si in idx:
            p = base + si
            for q in range(off[p], off[p + 1]):
                col = col0 + ind[q]
                out[col >> 6] ^= np.uint64(1) << np.uint64(col & 63)


def _lowest_bit(vec: np.ndarray) -> int:
    nz = np.flatnonzero(vec)
    w = int(nz[0])
    x = int(vec[w])
    return w * 64 + ((x & -x).bit_length() - 1)


def _fit(vec: np.ndarray, n: int) -> np.ndarray:
    w = nwords(n)
    if len(vec) == w:
        return vec
    out = np.zeros(w, dtype=np.uint64)
    k = min(w, len(vec))
    out[:k] = vec[:k]
    return out
