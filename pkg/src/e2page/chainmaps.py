"""Chain maps and null-homotopies between minimal resolutions.

A chain map ``f`` of bidegree (s_shift, t_shift) sends ``F^src_{s_shift+k}``
to ``F^tgt_k``, lowering internal degree by ``t_shift``.  It is determined by
its values on generators at level 0, which lie in the target module; higher
levels are lifted through the target's quasi-inverses.  Yoneda products,
maps induced by module maps, connecting homomorphisms and the transfer are
all instances.
"""
from __future__ import annotations

import numpy as np

from . import steenrod as st
from .f2_linalg import nwords


class ShiftedResolution:
    """View of a resolution of ``M`` as a resolution of ``Σ^shift M``."""

    def __init__(self, base, shift: int):
        self.base = base
        self.shift = shift
        self.module = _ShiftedModule(base.module, shift)
        self.s_max = base.s_max
        self._deg_cache: tuple | None = None

    @property
    def t_max(self) -> int:
        return self.base.t_max + self.shift

    @property
    def gen_deg(self):
        key = tuple(len(g) for g in self.base.gen_deg)
        if self._deg_cache is None or self._deg_cache[0] != key:
            self._deg_cache = (key, [[d + self.shift for d in g] for g in self.base.gen_deg])
        return self._deg_cache[1]

    @property
    def gen_d(self):
        return self.base.gen_d

    def offsets(self, s, t):
        return self.base.offsets(s, t - self.shift)

    def dim(self, s, t):
        return self.base.dim(s, t - self.shift)

    def ngens(self, s, t):
        return self.base.ngens(s, t - self.shift)

    def gens_in_degree(self, s, t):
        return self.base.gens_in_degree(s, t - self.shift)

    def act(self, s, a_deg, a_idx, vec, t):
        return self.base.act(s, a_deg, a_idx, vec, t - self.shift)

    def d_vector(self, s, t, vec):
        return self.base.d_vector(s, t - self.shift, vec)

    def solve(self, s, t, y):
        return self.base.solve(s, t - self.shift, y)

    def computed(self, s, t):
        return self.base.computed(s, t - self.shift)


class _ShiftedModule:
    def __init__(self, base, shift):
        self.base = base
        self.shift = shift
        self.min_degree = base.min_degree + shift
        self.name = f"Σ^{shift}{base.name}"

    def dim(self, n):
        return self.base.dim(n - self.shift)

    def has_cell(self, n):
        return self.base.has_cell(n - self.shift)

    def act(self, seq, n):
        return self.base.act(seq, n - self.shift)

    def action_table(self, a, b):
        return self.base.action_table(a, b - self.shift)


def shifted(res, shift: int):
    return res if shift == 0 else ShiftedResolution(res, shift)


# ---------------------------------------------------------------------------


def unit_coefficients(res, s: int, t: int, vec: np.ndarray) -> np.ndarray:
    """Coefficients of the degree-t generators of F_s in ``vec`` (in F_s(t))."""
    gens = res.gens_in_degree(s, t)
    off = res.offsets(s, t)
    out = np.zeros(len(gens), dtype=np.uint8)
    for k, i in enumerate(gens):
        p = int(off[i])
        out[k] = (int(vec[p >> 6]) >> (p & 63)) & 1
    return out


def block_indices(vec: np.ndarray, lo: int, hi: int) -> np.ndarray:
    if hi <= lo:
        return np.zeros(0, dtype=np.int64)
    wlo, whi = lo >> 6, (hi - 1) >> 6
    words = vec[wlo: whi + 1]
    if not words.any():
        return np.zeros(0, dtype=np.int64)
    bits = np.unpackbits(words.astype("<u8").view(np.uint8), bitorder="little")
    start = lo - wlo * 64
    sel = np.flatnonzero(bits[start: start + (hi - lo)])
    return sel.astype(np.int64)


class ChainMap:
    """Chain map lifted from ``initial`` (level 0 values in the target module).

    ``initial(i)`` returns the packed target-module vector (degree
    ``deg - t_shift``) for generator ``i`` of ``F^src_{s_shift}``.  With an
    ``rng`` the lift adds a random boundary at every generator, giving a
    different but homotopic chain map.
    """

    def __init__(self, src, tgt, s_shift: int, t_shift: int, initial, rng=None):
        self.src = src
        self.tgt = tgt
        self.s_shift = s_shift
        self.t_shift = t_shift
        self.initial = initial
        self.rng = rng
        self._values: dict[tuple[int, int], np.ndarray] = {}

    def value(self, k: int, i: int) -> np.ndarray:
        key = (k, i)
        hit = self._values.get(key)
        if hit is not None:
            return hit
        s = self.s_shift + k
        deg = self.src.gen_deg[s][i]
        D = deg - self.t_shift
        if k == 0:
            y = self.initial(i)
            if self.tgt.module.dim(D) == 0:
                x = np.zeros(nwords(self.tgt.dim(0, D)), dtype=np.uint64)
            else:
                x = self.tgt.solve(0, D, y)
        else:
            y = np.zeros(nwords(self.tgt.dim(k - 1, D)), dtype=np.uint64)
            for blk, idx in self.src.gen_d[s][i]:
                bdeg = self.src.gen_deg[s - 1][blk]
                v = self.value(k - 1, blk)
                if not v.any():
                    continue
                y ^= self.tgt.act(k - 1, deg - bdeg, idx, v, bdeg - self.t_shift)
            x = self.tgt.solve(k, D, y) if y.any() else np.zeros(nwords(self.tgt.dim(k, D)), np.uint64)
        if x is None:
            raise ArithmeticError(
                f"cannot lift chain map at level {k}, generator {i} (degree {deg}): "
                "initial data is not a cocycle")
        if self.rng is not None:
            x = x ^ _random_boundary(self.tgt, k + 1, D, self.rng, len(x))
        self._values[key] = x
        return x

    def apply(self, k: int, t: int, vec: np.ndarray) -> np.ndarray:
        """Image of an element of F^src_{s_shift+k}(t)."""
        s = self.s_shift + k
        D = t - self.t_shift
        out = np.zeros(nwords(self.tgt.dim(k, D)), dtype=np.uint64)
        off = self.src.offsets(s, t)
        for blk in range(len(off) - 1):
            idx = block_indices(vec, int(off[blk]), int(off[blk + 1]))
            if not len(idx):
                continue
            bdeg = self.src.gen_deg[s][blk]
            v = self.value(k, blk)
            if v.any():
                out ^= self.tgt.act(k, t - bdeg, idx, v, bdeg - self.t_shift)
        return out

    def induced_matrix(self, s: int, t: int) -> np.ndarray:
        """Matrix of the induced map Ext^{s - s_shift, t - t_shift}(tgt) -> Ext^{s,t}(src).

        Row ``g`` (a degree-t generator of F^src_s) holds the coefficients of
        the target generators in ``f(g)``; a target class ``y`` pulls back to
        ``M @ y``.
        """
        k = s - self.s_shift
        gens = self.src.gens_in_degree(s, t)
        ntgt = self.tgt.ngens(k, t - self.t_shift) if k >= 0 else 0
        mat = np.zeros((len(gens), ntgt), dtype=np.uint8)
        if k < 0 or ntgt == 0:
            return mat
        for r, i in enumerate(gens):
            mat[r] = unit_coefficients(self.tgt, k, t - self.t_shift, self.value(k, i))
        return mat


def _random_boundary(res, s: int, t: int, rng, width: int) -> np.ndarray:
    if s > res.s_max or not res.computed(s, t):
        return np.zeros(width, dtype=np.uint64)
    n = res.dim(s, t)
    if n == 0:
        return np.zeros(width, dtype=np.uint64)
    w = np.zeros(nwords(n), dtype=np.uint64)
    bits = rng.integers(0, 2, n)
    for j in np.flatnonzero(bits):
        w[j >> 6] |= np.uint64(1) << np.uint64(j & 63)
    b = res.d_vector(s, t, w)
    out = np.zeros(width, dtype=np.uint64)
    out[: len(b)] = b[:width]
    return out


# ---------------------------------------------------------------------------
# initial data


def class_initial(src, tgt, s: int, t: int, coords):
    """Level-0 data of the Yoneda lift of the class ``coords`` in Ext^{s,t}(src).

    The target must be a resolution of a module that is F_2 in degree 0
    (possibly shifted); generator i of F^src_s goes to its coefficient times
    the bottom class.
    """
    gens = src.gens_in_degree(s, t)
    coef = {g: int(c) & 1 for g, c in zip(gens, coords)}
    base = tgt.module.min_degree

    def initial(i):
        v = np.zeros(nwords(tgt.module.dim(base)), dtype=np.uint64)
        if coef.get(i, 0):
            v[0] = np.uint64(1)
        return v

    return ChainMap(src, tgt, s, t - base, initial)


def module_map_initial(src, tgt, cell_map, rng=None):
    """Chain map covering a cellwise module map (cells to cells of equal degree).

    ``cell_map(n)`` says whether source cell n maps to target cell n.
    """

    def initial(i):
        deg = src.gen_deg[0][i]
        v = np.zeros(nwords(tgt.module.dim(deg)), dtype=np.uint64)
        acc = 0
        for blk, idx in src.gen_d[0][i]:
            # generators of F_0 of a cell module sit on cells
            if len(idx) and cell_map(deg) and tgt.module.dim(deg):
                acc ^= 1
        if acc:
            v[0] = np.uint64(1)
        return v

    return ChainMap(src, tgt, 0, 0, initial, rng=rng)


def extension_initial(q_res, k_res, total, rng=None):
    """Connecting map of 0 -> K -> total -> Q -> 0 as a chain map F^Q -> F^K.

    Level 0 sends a generator g of F^Q_1 with d(g) = Σ a_h h to Σ a_h σ(ε h)
    computed in ``total`` (σ the cellwise section); the result lies in K.
    Returns a chain map of bidegree (1, 0).
    """

    def initial(i):
        deg = q_res.gen_deg[1][i]
        acc = 0
        for blk, idx in q_res.gen_d[1][i]:
            hdeg = q_res.gen_deg[0][blk]
            basis = st.basis(deg - hdeg)
            for r in idx:
                if total.act(basis[r], hdeg):
                    acc ^= 1
        v = np.zeros(nwords(k_res.module.dim(deg)), dtype=np.uint64)
        if acc:
            if not k_res.module.dim(deg):
                raise ArithmeticError(f"extension cocycle leaves the submodule in degree {deg}")
            v[0] = np.uint64(1)
        return v

    return ChainMap(q_res, k_res, 1, 0, initial, rng=rng)


# ---------------------------------------------------------------------------


class NullHomotopy:
    """Null-homotopy of the composite B∘C of two self-maps of one resolution.

    ``H_j: F_{s_bc + j - 1} -> F_j`` with ``H_0 = 0`` and
    ``d H_{j+1} = (BC)_j + H_j d``; exists when the product class b·c is zero
    (on a minimal resolution this means the cocycle b∘C vanishes).
    """

    def __init__(self, res, B: ChainMap, C: ChainMap, rng=None):
        self.res = res
        self.B = B
        self.C = C
        self.s_bc = B.s_shift + C.s_shift
        self.t_bc = B.t_shift + C.t_shift
        self.rng = rng
        self._values: dict[tuple[int, int], np.ndarray] = {}

    def value(self, j: int, i: int) -> np.ndarray:
        """H_j on generator i of F_{s_bc + j - 1}."""
        key = (j, i)
        hit = self._values.get(key)
        if hit is not None:
            return hit
        s = self.s_bc + j - 1
        deg = self.res.gen_deg[s][i]
        D = deg - self.t_bc
        if j == 0:
            x = np.zeros(nwords(self.res.dim(0, D)), dtype=np.uint64)
            self._values[key] = x
            return x
        k = j - 1
        # (BC)_k(g) + H_k(d g), an element of F_k(D) with zero boundary
        cg = self.C.value(self.B.s_shift + k, i)
        y = self.B.apply(k, deg - self.C.t_shift, cg)
        if k > 0:
            for blk, idx in self.res.gen_d[s][i]:
                bdeg = self.res.gen_deg[s - 1][blk]
                v = self.value(k, blk)
                if v.any():
                    y = y ^ self.res.act(k, deg - bdeg, idx, v, bdeg - self.t_bc)
        x = self.res.solve(j, D, y) if y.any() else np.zeros(nwords(self.res.dim(j, D)), np.uint64)
        if x is None:
            raise ArithmeticError(
                f"no null-homotopy at level {j}, generator {i}: the product is nonzero")
        if self.rng is not None:
            x = x ^ _random_boundary(self.res, j + 1, D, self.rng, len(x))
        self._values[key] = x
        return x
