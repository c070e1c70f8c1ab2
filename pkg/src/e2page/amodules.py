"""Finite (or degreewise finite) modules over the Steenrod algebra.

Each module has at most one basis element per degree, which covers everything
needed here: spheres, stunted projective spaces and small twisted cell
complexes.  The action of a Milnor basis element on a cell is given by
``act(seq, degree)`` returning the target degree or ``None``; the sparse
``action_table`` layout matches :func:`steenrod.product_table`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import steenrod as st

# large enough that k mod 2^L behaves like a negative integer for our degrees
_NEG_BITS = 12


def binom2(n: int, k: int) -> int:
    """Binomial coefficient mod 2, via Lucas; n may be negative."""
    if k < 0:
        return 0
    if n < 0:
        n += 1 << _NEG_BITS
        if n < 0:
            raise ValueError("exponent out of supported range")
    return int(k <= n and (n & k) == k)


def projective_coefficient(seq, k: int) -> int:
    """Coefficient of x^(k+|R|) in Sq(R) x^k on real projective space (mod 2).

    This is the multinomial coefficient (k; k - sum r_i, r_1, r_2, ...), which is
    odd iff those parts are pairwise bit-disjoint.
    """
    if k < 0:
        k += 1 << _NEG_BITS
    rest = k - sum(seq)
    if rest < 0:
        return 0
    used = rest
    for r in seq:
        if used & r:
            return 0
        used |= r
    return 1


class CellModule:
    """Module with cells (one basis element each) in a set of degrees."""

    name = "module"

    def __init__(self):
        self._tables: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}

    @property
    def identity(self) -> str:
        """Structural description; display names may differ for equal modules."""
        return self.name

    # subclasses define: has_cell(n), act(seq, n) -> bool, min_degree, max_degree
    min_degree: int = 0
    max_degree: int | None = None

    def has_cell(self, n: int) -> bool:
        raise NotImplementedError

    def act(self, seq, n: int) -> bool:
        raise NotImplementedError

    def dim(self, n: int) -> int:
        return 1 if self.has_cell(n) else 0

    def cells(self, upto: int) -> list[int]:
        return [n for n in range(self.min_degree, upto + 1) if self.has_cell(n)]

    def action_table(self, a: int, b: int):
        key = (a, b)
        hit = self._tables.get(key)
        if hit is not None:
            return hit
        basis = st.basis(a)
        nb = self.dim(b)
        offsets = np.zeros(len(basis) * nb + 1, dtype=np.int64)
        ind = []
        if nb and self.has_cell(a + b):
            for i, seq in enumerate(basis):
                if self.act(seq, b):
                    ind.append(0)
                offsets[i + 1] = len(ind)
        else:
            offsets[:] = 0
        entry = (offsets, np.array(ind, dtype=np.int32))
        self._tables[key] = entry
        return entry

    def check_associative(self, upto: int) -> None:
        """Verify Sq(R)(Sq(S) x) = (Sq(R) Sq(S)) x on all cells up to ``upto``."""
        cells = self.cells(upto)
        for n in cells:
            for m in cells:
                if m <= n:
                    continue
                gap = m - n
                for a in range(1, gap):
                    b = gap - a
                    for r in st.basis(a):
                        for s in st.basis(b):
                            left = self.act(s, n) and self.has_cell(n + b) and self.act(r, n + b)
                            right = 0
                            for t in st.multiply(r, s):
                                right ^= int(self.act(t, n))
                            if bool(left) != bool(right):
                                raise ValueError(
                                    f"{self.name}: action not associative at cell {n}: "
                                    f"{st.milnor_name(r)}*{st.milnor_name(s)}")


class SphereModule(CellModule):
    def __init__(self, shift: int = 0):
        super().__init__()
        self.shift = shift
        self.min_degree = shift
        self.max_degree = shift
        self.name = f"S^{shift}"

    def has_cell(self, n: int) -> bool:
        return n == self.shift

    def act(self, seq, n: int) -> bool:
        return len(seq) == 0


class ProjectiveModule(CellModule):
    """Cohomology of a stunted projective spectrum: cells ``lower..upper``.

    ``upper=None`` means no top cell.  ``drop`` removes cells whose span is a
    submodule or a quotient (used for the extension module behind the
    transfer, where the zero cell of P_{-1} is divided out).
    """

    def __init__(self, lower: int, upper: int | None = None, drop: tuple[int, ...] = ()):
        super().__init__()
        self.lower = lower
        self.upper = upper
        self.drop = frozenset(drop)
        self.min_degree = lower
        self.max_degree = upper
        top = "inf" if upper is None else str(upper)
        self.name = f"P_{lower}^{top}" + (f"/{sorted(self.drop)}" if drop else "")

    def has_cell(self, n: int) -> bool:
        if n < self.lower or (self.upper is not None and n > self.upper):
            return False
        return n not in self.drop

    def act(self, seq, n: int) -> bool:
        if not (self.has_cell(n) and self.has_cell(n + st.degree_of(seq))):
            return False
        return bool(projective_coefficient(seq, n))


@dataclass
class Twist:
    """Attaching twist from cell ``source`` up to cell ``target`` by Sq(2^i)."""

    source: int
    target: int

    @property
    def gap(self) -> int:
        return self.target - self.source


class TwistedCellModule(CellModule):
    """Cells joined by primary operations Sq(2^i) along the given twists.

    Only indecomposable Milnor generators act directly; anything else acts
    through composites, which must already vanish.  Construction fails when the
    resulting action is not associative, i.e. when secondary attaching data
    would be needed.
    """

    def __init__(self, cells, twists, name: str | None = None, check_upto: int | None = None):
        super().__init__()
        self.cell_set = frozenset(cells)
        if not self.cell_set:
            raise ValueError("a cell complex needs at least one cell")
        self.links: dict[int, set[int]] = {}
        for tw in twists:
            if tw.source not in self.cell_set or tw.target not in self.cell_set:
                raise ValueError(f"twist {tw} touches a missing cell")
            g = tw.gap
            if g <= 0 or g & (g - 1):
                raise ValueError(f"twist {tw}: gap must be a power of two (primary Sq^(2^i))")
            self.links.setdefault(tw.source, set()).add(tw.target)
        self.min_degree = min(self.cell_set)
        self.max_degree = max(self.cell_set)
        self.name = name or "cells" + ",".join(map(str, sorted(self.cell_set)))
        self.check_associative(self.max_degree if check_upto is None else check_upto)

    @property
    def identity(self) -> str:
        links = ";".join(f"{a}>{sorted(b)}" for a, b in sorted(self.links.items()))
        return f"cells{sorted(self.cell_set)}|{links}"

    def has_cell(self, n: int) -> bool:
        return n in self.cell_set

    def act(self, seq, n: int) -> bool:
        if not seq:
            return True
        if len(seq) != 1:
            return False
        r = seq[0]
        if r & (r - 1):
            return False
        return (n + r) in self.links.get(n, ())


@dataclass
class ModuleMap:
    """Cellwise module map ``src -> tgt`` sending cell n to cell n + shift (or 0).

    ``cells`` lists the source cells with a nonzero image.  Used for the maps
    induced by inclusion of sub/quotient cell ranges.
    """

    src: CellModule
    tgt: CellModule
    cells: frozenset = field(default_factory=frozenset)
    shift: int = 0

    def image(self, n: int) -> int | None:
        return n + self.shift if n in self.cells else None
