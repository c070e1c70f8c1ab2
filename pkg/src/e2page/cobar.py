"""Reduced cobar complex of the dual Steenrod algebra, as an independent model of Ext.

The dual algebra is F_2[ξ_1, ξ_2, ...] with |ξ_i| = 2^i - 1 and
Δξ_n = Σ_i ξ_{n-i}^{2^i} ⊗ ξ_i.  A cobar s-cochain of internal degree t is a
tensor [a_1 | ... | a_s] of positive-degree monomials with degrees summing to
t; the differential sums the reduced coproduct over every slot.  Only small
degrees are practical, which is all the oracle is for.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from .ext_engine import gf2_rank

MAX_T = 16


def _xi_degree(i: int) -> int:
    return (1 << i) - 1


@lru_cache(maxsize=None)
def monomials(deg: int) -> tuple:
    """Exponent tuples R (R[0] the exponent of ξ_1) of a given degree, trailing zeros dropped."""
    out = []

    def rec(i, left, acc):
        d = _xi_degree(i)
        if d > left:
            if left == 0:
                r = list(acc)
                while r and r[-1] == 0:
                    r.pop()
                out.append(tuple(r))
            return
        for e in range(left // d, -1, -1):
            rec(i + 1, left - e * d, acc + [e])

    rec(1, deg, [])
    return tuple(sorted(set(out)))


def _degree(r: tuple) -> int:
    return sum(e * _xi_degree(i + 1) for i, e in enumerate(r))


def _mul(a: tuple, b: tuple) -> tuple:
    n = max(len(a), len(b))
    r = [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]
    while r and r[-1] == 0:
        r.pop()
    return tuple(r)


def _xor(acc: dict, key) -> None:
    if key in acc:
        del acc[key]
    else:
        acc[key] = 1


@lru_cache(maxsize=None)
def _coproduct_xi(n: int) -> tuple:
    """Δξ_n as pairs of monomials."""
    out = []
    for i in range(0, n + 1):
        left = [0] * (n - i)
        if n - i > 0:
            left[n - i - 1] = 1 << i
        right = [0] * i
        if i > 0:
            right[i - 1] = 1
        out.append((tuple(left), tuple(right)))
    return tuple(out)


@lru_cache(maxsize=None)
def coproduct(r: tuple) -> frozenset:
    """Full coproduct of the monomial ξ^R as a set of (left, right) pairs."""
    terms = {((), ()): 1}
    for i, e in enumerate(r):
        for _ in range(e):
            nxt: dict = {}
            for (a, b) in terms:
                for (c, d) in _coproduct_xi(i + 1):
                    _xor(nxt, (_mul(a, c), _mul(b, d)))
            terms = nxt
    return frozenset(terms)


def reduced_coproduct(r: tuple) -> list:
    return [(a, b) for a, b in coproduct(r) if a and b]


@lru_cache(maxsize=None)
def _compositions(t: int, s: int) -> tuple:
    if s == 0:
        return ((),) if t == 0 else ()
    out = []
    for first in range(1, t - s + 2):
        for rest in _compositions(t - first, s - 1):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def basis(s: int, t: int) -> tuple:
    out = []
    for comp in _compositions(t, s):
        for mons in product(*(monomials(d) for d in comp)):
            out.append(tuple(mons))
    return tuple(out)


def differential_matrix(s: int, t: int) -> np.ndarray:
    """Rows: cobar basis of (s,t); columns: basis of (s+1,t)."""
    src = basis(s, t)
    tgt = {b: i for i, b in enumerate(basis(s + 1, t))}
    mat = np.zeros((len(src), len(tgt)), dtype=np.uint8)
    for r, tensor in enumerate(src):
        for k, m in enumerate(tensor):
            for a, b in reduced_coproduct(m):
                mat[r, tgt[tensor[:k] + (a, b) + tensor[k + 1:]]] ^= 1
    return mat


def cobar_dims(t_max: int) -> dict:
    """dim Ext^{s,t}(S^0) for 0 ≤ s ≤ t ≤ t_max from the cobar complex."""
    if t_max > MAX_T:
        raise ValueError(f"cobar oracle limited to t ≤ {MAX_T}")
    dims = {(0, 0): 1}
    for t in range(1, t_max + 1):
        ranks = {}
        for s in range(1, t + 1):
            m = differential_matrix(s, t)
            ranks[s] = gf2_rank(m) if m.size else 0
        for s in range(1, t + 1):
            n = len(basis(s, t))
            dims[(s, t)] = n - ranks[s] - ranks.get(s - 1, 0)
    return {k: v for k, v in dims.items() if v}
