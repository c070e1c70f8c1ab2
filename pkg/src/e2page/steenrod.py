"""Mod-2 Steenrod algebra in the Milnor basis.

Basis elements Sq(r_1, r_2, ...) of a fixed degree are enumerated once and
addressed by their index in that degree.  Products are computed with the
Milnor matrix formula in a numba kernel and cached per pair of degrees as a
sparse table: for every (R, S) the list of result indices.
"""
from __future__ import annotations

import threading
from functools import lru_cache

import numpy as np
from numba import njit

MAX_LEN = 7
_KEY_BASE = 128


def _sequences(degree: int, max_index: int):
    # sequences (r_1..r_k) with sum r_i (2^i - 1) == degree, r_i for i <= max_index
    if degree == 0:
        yield ()
        return
    if max_index == 0:
        return
    w = (1 << max_index) - 1
    for r in range(degree // w, -1, -1):
        for rest in _sequences(degree - r * w, max_index - 1):
            seq = rest + (0,) * (max_index - 1 - len(rest)) + (r,) if r else rest
            yield seq


@lru_cache(maxsize=None)
def basis(degree: int) -> tuple[tuple[int, ...], ...]:
    """Milnor basis of A in ``degree``, as trimmed exponent tuples, sorted."""
    if degree < 0:
        return ()
    seqs = set()
    for seq in _sequences(degree, MAX_LEN):
        s = list(seq)
        while s and s[-1] == 0:
            s.pop()
        seqs.add(tuple(s))
    return tuple(sorted(seqs, key=lambda r: (len(r), tuple(reversed(r)))))


def dimension(degree: int) -> int:
    return len(basis(degree))


def encode(seq) -> int:
    key = 0
    for i, r in enumerate(seq):
        key += r * _KEY_BASE ** i
    return key


@lru_cache(maxsize=None)
def _tables(degree: int):
    seqs = basis(degree)
    arr = np.zeros((len(seqs), MAX_LEN), dtype=np.int64)
    for k, seq in enumerate(seqs):
        arr[k, : len(seq)] = seq
    keys = np.array([encode(s) for s in seqs], dtype=np.int64)
    order = np.argsort(keys)
    return arr, keys[order], order.astype(np.int64)


def index_of(seq) -> int:
    seq = tuple(seq)
    while seq and seq[-1] == 0:
        seq = seq[:-1]
    deg = sum(r * ((1 << (i + 1)) - 1) for i, r in enumerate(seq))
    return basis(deg).index(seq)


def degree_of(seq) -> int:
    return sum(r * ((1 << (i + 1)) - 1) for i, r in enumerate(seq))


@njit(cache=True)
def _milnor_product(R, S, out_keys):
    """All Sq(T) appearing in Sq(R) Sq(S); writes keys, returns count (mod 2 reduced)."""
    m = 0
    for i in range(R.shape[0]):
        if R[i] != 0:
            m = i + 1
    n = 0
    for j in range(S.shape[0]):
        if S[j] != 0:
            n = j + 1
    count = 0
    ncell = m * n
    if ncell == 0:
        # one of the factors is the unit
        key = 0
        mult = 1
        for i in range(MAX_LEN):
            v = R[i] + S[i]
            key += v * mult
            mult *= _KEY_BASE
        out_keys[0] = key
        return 1
    x = np.zeros(ncell, dtype=np.int64)
    rem_r = np.zeros(m + 1, dtype=np.int64)
    rem_s = np.zeros(n + 1, dtype=np.int64)
    for i in range(m):
        rem_r[i + 1] = R[i]
    for j in range(n):
        rem_s[j + 1] = S[j]
    diag = np.zeros(m + n + 1, dtype=np.int64)
    p = 0
    x[0] = -1
    while p >= 0:
        i = p // n + 1
        j = p % n + 1
        w = 1 << j
        # undo previous value at p
        if x[p] >= 0:
            rem_r[i] += x[p] * w
            rem_s[j] += x[p]
        x[p] += 1
        v = x[p]
        if v * w > rem_r[i] or v > rem_s[j]:
            x[p] = -1
            p -= 1
            continue
        rem_r[i] -= v * w
        rem_s[j] -= v
        if p + 1 < ncell:
            p += 1
            x[p] = -1
            continue
        # complete assignment: check diagonals are carry-free
        ok = True
        for k in range(m + n + 1):
            diag[k] = 0
        acc = np.zeros(m + n + 1, dtype=np.int64)
        for ii in range(1, m + 1):
            e = rem_r[ii]
            if acc[ii] & e:
                ok = False
                break
            acc[ii] |= e
        if ok:
            for jj in range(1, n + 1):
                e = rem_s[jj]
                if acc[jj] & e:
                    ok = False
                    break
                acc[jj] |= e
        if ok:
            for q in range(ncell):
                ii = q // n + 1
                jj = q % n + 1
                e = x[q]
                if acc[ii + jj] & e:
                    ok = False
                    break
                acc[ii + jj] |= e
        if ok:
            key = 0
            mult = 1
            for k in range(1, m + n + 1):
                key += acc[k] * mult
                mult *= _KEY_BASE
            out_keys[count] = key
            count += 1
    return count


@njit(cache=True)
def _product_table(Ra, Sb, sorted_keys, order, offsets_out, buf_init):
    na = Ra.shape[0]
    nb = Sb.shape[0]
    out = buf_init
    pos = 0
    tmp = np.zeros(4096, dtype=np.int64)
    for a in range(na):
        for b in range(nb):
            c = _milnor_product(Ra[a], Sb[b], tmp)
            offsets_out[a * nb + b] = pos
            for k in range(c):
                idx = order[np.searchsorted(sorted_keys, tmp[k])]
                if pos >= out.shape[0]:
                    bigger = np.empty(out.shape[0] * 2, dtype=np.int32)
                    bigger[: out.shape[0]] = out
                    out = bigger
                out[pos] = idx
                pos += 1
    offsets_out[na * nb] = pos
    return out[:pos]


_lock = threading.Lock()
_product_cache: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}


def product_table(a: int, b: int) -> tuple[np.ndarray, np.ndarray]:
    """Sparse table of products A_a x A_b -> A_{a+b}.

    Returns ``(offsets, indices)``: the product of basis elements ``i`` (degree
    ``a``) and ``j`` (degree ``b``) is the sum of the degree ``a+b`` basis
    elements ``indices[offsets[i*dim_b + j] : offsets[i*dim_b + j + 1]]``.
    """
    key = (a, b)
    hit = _product_cache.get(key)
    if hit is not None:
        return hit
    Ra, _, _ = _tables(a)
    Sb, _, _ = _tables(b)
    _, keys, order = _tables(a + b)
    offsets = np.zeros(len(Ra) * len(Sb) + 1, dtype=np.int64)
    indices = _product_table(Ra, Sb, keys, order, offsets,
                             np.empty(max(16, 4 * len(Ra) * len(Sb)), dtype=np.int32))
    entry = (offsets, indices.copy())
    with _lock:
        _product_cache[key] = entry
    return entry


def clear_cache() -> None:
    with _lock:
        _product_cache.clear()


def multiply(r, s) -> list[tuple[int, ...]]:
    """Product Sq(R) Sq(S) as a list of exponent tuples (mod 2)."""
    a, b = degree_of(r), degree_of(s)
    offsets, indices = product_table(a, b)
    i, j = index_of(r), index_of(s)
    nb = dimension(b)
    out = indices[offsets[i * nb + j]: offsets[i * nb + j + 1]]
    res = basis(a + b)
    return sorted(res[k] for k in out)


def multiply_elements(x: dict, y: dict) -> dict:
    """Product of two elements given as {exponent tuple: 1} sets (mod 2)."""
    out: dict = {}
    for r in x:
        for s in y:
            for t in multiply(r, s):
                if t in out:
                    del out[t]
                else:
                    out[t] = 1
    return out


def milnor_name(seq) -> str:
    if not seq:
        return "1"
    return "Sq(" + ",".join(str(r) for r in seq) + ")"
