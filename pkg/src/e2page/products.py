"""Yoneda products, the right action of Ext(S^0) on Ext of a complex, and
triple Massey products.

A class x in Ext^{s,t} lifts to a chain map F_{s+k} -> F^{S^0}_k; products are
evaluations of one class on the lift of the other.  On a minimal resolution
cocycles are just functionals on generators, so no boundary bookkeeping is
needed.  For a Massey product <a, b, c> we build a null-homotopy H of B∘C and
read off a∘H, then add the exact indeterminacy a·Ext + Ext·c.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import complexes as cx
from .chainmaps import NullHomotopy, class_initial, unit_coefficients
from .ext_engine import ExtClass, ExtEngine, gf2_rank, gf2_solve, in_span, make_class, rref


def _is_sphere0(spec) -> bool:
    return spec.kind == cx.SPHERE and spec.shift == 0


@dataclass
class MasseyResult:
    defined: bool
    value: ExtClass | None
    indeterminacy: np.ndarray  # RREF rows spanning a·Ext + Ext·c
    zero_indeterminacy: bool

    def contains(self, x: ExtClass) -> bool:
        if not self.defined:
            return False
        diff = (x.vector ^ self.value.vector)
        return in_span(self.indeterminacy, diff) if len(self.indeterminacy) else not diff.any()

    def coset(self) -> list:
        """All elements of the bracket (fine for the small indeterminacies here)."""
        rows = self.indeterminacy
        out = []
        for mask in range(1 << len(rows)):
            v = self.value.vector.copy()
            for k in range(len(rows)):
                if mask >> k & 1:
                    v ^= rows[k]
            out.append(v)
        return out


class Products:
    def __init__(self, engine: ExtEngine):
        self.engine = engine
        self._lifts: dict = {}

    def _sphere(self, s, t):
        return self.engine.resolution(cx.sphere(0), s, t)

    def lift(self, x: ExtClass, levels: int, degree: int, rng=None):
        """Chain map F^X_{s+k} -> F^{S^0}_k for k ≤ levels, defined up to ``degree`` above x."""
        res_x = self.engine.resolution(x.complex, x.s + levels, x.t + degree)
        res_s = self._sphere(levels, degree)
        if rng is not None:
            cm = class_initial(res_x, res_s, x.s, x.t, x.coords)
            cm.rng = rng
            return cm
        key = (x.complex, x.s, x.t, x.coords)
        cm = self._lifts.get(key)
        if cm is None or cm.src is not res_x or cm.tgt is not res_s:
            cm = class_initial(res_x, res_s, x.s, x.t, x.coords)
            self._lifts[key] = cm
        return cm

    @staticmethod
    def _evaluate(a: ExtClass, res, vec) -> int:
        return int(unit_coefficients(res, a.s, a.t, vec) @ a.vector % 2)

    def multiply(self, a: ExtClass, b: ExtClass) -> ExtClass:
        """a·b with b on the sphere; a on the sphere or on a complex."""
        if not _is_sphere0(b.complex):
            if _is_sphere0(a.complex):
                a, b = b, a
            else:
                raise ValueError("at least one factor must live on the sphere")
        s, t = a.s + b.s, a.t + b.t
        res_a = self.engine.resolution(a.complex, s, t)
        if a.is_zero() or b.is_zero():
            return make_class(a.complex, s, t, np.zeros(res_a.ngens(s, t), np.uint8))
        if _is_sphere0(a.complex) and a.t < b.t:
            a, b = b, a  # lift the class of larger degree; solves stay small
        return self.yoneda(a, b)

    def yoneda(self, a: ExtClass, b: ExtClass) -> ExtClass:
        """a·b computed by lifting a and evaluating b (b on the sphere)."""
        s, t = a.s + b.s, a.t + b.t
        res_a = self.engine.resolution(a.complex, s, t)
        lift = self.lift(a, b.s, b.t)
        res_s = self._sphere(b.s, b.t)
        gens = res_a.gens_in_degree(s, t)
        vec = [self._evaluate(b, res_s, lift.value(b.s, i)) for i in gens]
        return make_class(a.complex, s, t, np.array(vec, dtype=np.uint8))

    def product_matrix(self, spec, s: int, t: int, g: ExtClass) -> np.ndarray:
        """Matrix of y ↦ y·g from Ext^{s,t}(spec) to Ext^{s+g.s, t+g.t}(spec)."""
        dim = self.engine.ext_dim(spec, s, t)
        target = self.engine.ext_dim(spec, s + g.s, t + g.t)
        cols = []
        for k in range(dim):
            y = make_class(spec, s, t, np.eye(dim, dtype=np.uint8)[k])
            cols.append(self.multiply(y, g).vector)
        if not cols:
            return np.zeros((target, 0), np.uint8)
        return np.array(cols, dtype=np.uint8).T.reshape(target, dim)

    def divisibility(self, x: ExtClass, g: ExtClass) -> ExtClass | None:
        """Some y with y·g = x, or None when the exhaustive solve has no solution."""
        s, t = x.s - g.s, x.t - g.t
        if s < 0:
            return None if not x.is_zero() else x
        m = self.product_matrix(x.complex, s, t, g)
        y = gf2_solve(m, x.vector)
        if y is None:
            return None
        return make_class(x.complex, s, t, y)

    # -- Massey products ---------------------------------------------------
    def massey(self, a: ExtClass, b: ExtClass, c: ExtClass, rng=None) -> MasseyResult:
        for z in (a, b, c):
            if not _is_sphere0(z.complex):
                raise ValueError("Massey products are computed on Ext of the sphere")
        s, t = a.s + b.s + c.s - 1, a.t + b.t + c.t
        if not self.multiply(a, b).is_zero() or not self.multiply(b, c).is_zero():
            raise ValueError("bracket undefined: a·b or b·c is nonzero")
        # <a,b,c> = <c,b,a> mod 2; evaluate the lower-degree outer class
        left, right = (a, c) if a.t <= c.t else (c, a)
        res = self._sphere(s, t)
        B = self.lift(b, left.s + 1, left.t + 1, rng=rng)
        C = self.lift(right, b.s + left.s, b.t + left.t, rng=rng)
        H = NullHomotopy(res, B, C, rng)
        vec = [self._evaluate(left, res, H.value(left.s, i)) for i in res.gens_in_degree(s, t)]
        value = make_class(a.complex, s, t, np.array(vec, dtype=np.uint8))
        indet = self.indeterminacy(a, b, c)
        return MasseyResult(True, value, indet, len(indet) == 0)

    def indeterminacy(self, a, b, c) -> np.ndarray:
        """RREF basis of a·Ext^{s_b+s_c-1, t_b+t_c} + Ext^{s_a+s_b-1, t_a+t_b}·c."""
        s, t = a.s + b.s + c.s - 1, a.t + b.t + c.t
        sphere = cx.sphere(0)
        rows = []
        for x, (ss, tt) in ((a, (b.s + c.s - 1, b.t + c.t)), (c, (a.s + b.s - 1, a.t + b.t))):
            n = self.engine.ext_dim(sphere, ss, tt)
            for k in range(n):
                y = make_class(sphere, ss, tt, np.eye(n, dtype=np.uint8)[k])
                rows.append(self.multiply(x, y).vector)
        dim = self.engine.ext_dim(sphere, s, t)
        if not rows:
            return np.zeros((0, dim), np.uint8)
        mat = np.array(rows, dtype=np.uint8)
        if gf2_rank(mat) == 0:
            return np.zeros((0, dim), np.uint8)
        basis = rref(mat)
        return basis[basis.any(axis=1)]
