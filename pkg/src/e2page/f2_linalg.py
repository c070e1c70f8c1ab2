"""Bit-packed dense GF(2) linear algebra.

Rows are packed little-endian into uint64 words: column ``j`` of a row lives in
word ``j >> 6`` at bit ``j & 63``.  Padding bits past ``cols`` are kept zero.

The elimination kernels are numba-compiled.  A Method-of-Four-Russians
elimination (``echelon(..., m4r=True)``) is available for large matrices; it
produces exactly the same pivot columns and row space as the plain kernel.
"""
from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field

import numpy as np
from numba import njit

WORD = 64
CACHE_VERSION = 1


def nwords(ncols: int) -> int:
    return (ncols + WORD - 1) // WORD


# ---------------------------------------------------------------------------
# numba kernels


@njit(cache=True)
def _get(row, j):
    return (row[j >> 6] >> np.uint64(j & 63)) & np.uint64(1)


@njit(cache=True)
def _flip(row, j):
    row[j >> 6] ^= np.uint64(1) << np.uint64(j & 63)


@njit(cache=True)
def _echelon_kernel(a, ncols):
    """Row echelon form in place over the first ``ncols`` columns.

    Row operations act on the full width of ``a`` so that augmented columns
    (e.g. an identity block) record the transformation.  Pivoting is
    deterministic: columns left to right, first available row.  Returns the
    pivot column of each of the first ``rank`` rows.
    """
    nrows = a.shape[0]
    nw = a.shape[1]
    pivots = np.empty(min(nrows, ncols) + 1, dtype=np.int64)
    rank = 0
    for c in range(ncols):
        if rank == nrows:
            break
        w = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        p = -1
        for r in range(rank, nrows):
            if a[r, w] & bit:
                p = r
                break
        if p < 0:
            continue
        if p != rank:
            for k in range(w, nw):
                tmp = a[p, k]
                a[p, k] = a[rank, k]
                a[rank, k] = tmp
        for r in range(p + 1, nrows):
            if a[r, w] & bit:
                for k in range(w, nw):
                    a[r, k] ^= a[rank, k]
        pivots[rank] = c
        rank += 1
    return pivots[:rank]


@njit(cache=True)
def _echelon_m4r(a, ncols, k):
    """Echelon form using Gray-code tables over strips of ``k`` pivots.

    Pivots are found one at a time inside a strip (with only the strip's rows
    updated eagerly); the remaining rows are then cleared against the strip
    with a 2^k lookup table.  Result has the same pivots and row space as the
    plain kernel; rows below the pivots are exactly zero in the first
    ``ncols`` columns where the plain kernel leaves them zero.
    """
    nrows = a.shape[0]
    nw = a.shape[1]
    pivots = np.empty(min(nrows, ncols) + 1, dtype=np.int64)
    rank = 0
    c = 0
    table = np.zeros((1 << k, nw), dtype=np.uint64)
    while c < ncols and rank < nrows:
        # collect up to k pivots starting at column c
        start_rank = rank
        strip_cols = np.empty(k, dtype=np.int64)
        nstrip = 0
        while c < ncols and nstrip < k and rank < nrows:
            w = c >> 6
            bit = np.uint64(1) << np.uint64(c & 63)
            # reduce candidate rows lazily: row r's bit at c depends on the
            # strip pivots already chosen
            p = -1
            for r in range(rank, nrows):
                v = a[r, w] & bit
                # apply pending strip reductions to decide the bit
                if nstrip > 0:
                    val = np.uint64(1) if v else np.uint64(0)
                    for q in range(nstrip):
                        pc = strip_cols[q]
                        if (a[r, pc >> 6] >> np.uint64(pc & 63)) & np.uint64(1):
                            # row r would be reduced by strip row q; fully
                            # reduce it now (cheap: only candidate rows)
                            for kk in range(pc >> 6, nw):
                                a[r, kk] ^= a[start_rank + q, kk]
                    val = (a[r, w] >> np.uint64(c & 63)) & np.uint64(1)
                    if val:
                        p = r
                        break
                elif v:
                    p = r
                    break
            if p < 0:
                c += 1
                continue
            if p != rank:
                for kk in range(nw):
                    tmp = a[p, kk]
                    a[p, kk] = a[rank, kk]
                    a[rank, kk] = tmp
            # make the strip upper-triangular-reduced w.r.t. the new pivot
            for q in range(nstrip):
                rr = start_rank + q
                if (a[rr, w] >> np.uint64(c & 63)) & np.uint64(1):
                    for kk in range(w, nw):
                        a[rr, kk] ^= a[rank, kk]
            strip_cols[nstrip] = c
            nstrip += 1
            pivots[rank] = c
            rank += 1
            c += 1
        if nstrip == 0:
            break
        # build Gray-code table of all combinations of the strip rows
        size = 1 << nstrip
        for kk in range(nw):
            table[0, kk] = 0
        for g in range(1, size):
            low = 0
            while not (g >> low) & 1:
                low += 1
            prev = g ^ (1 << low)
            for kk in range(nw):
                table[g, kk] = table[prev, kk] ^ a[start_rank + low, kk]
        # clear strip columns from all rows below the strip
        for r in range(rank, nrows):
            idx = 0
            for q in range(nstrip):
                pc = strip_cols[q]
                if (a[r, pc >> 6] >> np.uint64(pc & 63)) & np.uint64(1):
                    idx |= 1 << q
            if idx:
                # table rows are strip-reduced so the pattern maps exactly
                for kk in range(nw):
                    a[r, kk] ^= table[idx, kk]
    return pivots[:rank]


@njit(cache=True)
def _reduce_vector(vec, rows, pivots, ncols_limit):
    """Reduce ``vec`` by echelon ``rows``; returns mask of used rows."""
    used = np.zeros(rows.shape[0], dtype=np.uint8)
    nw = vec.shape[0]
    for i in range(pivots.shape[0]):
        c = pivots[i]
        if (vec[c >> 6] >> np.uint64(c & 63)) & np.uint64(1):
            for k in range(c >> 6, nw):
                vec[k] ^= rows[i, k]
            used[i] = 1
    return used


@njit(cache=True)
def _solve_kernel(y, img_rows, pre_rows, pivots):
    """Solve x*M = y given echelon image rows and their preimages.

    ``y`` is reduced in place; returns x (packed over the source space).
    """
    x = np.zeros(pre_rows.shape[1], dtype=np.uint64)
    nw = y.shape[0]
    for i in range(pivots.shape[0]):
        c = pivots[i]
        if (y[c >> 6] >> np.uint64(c & 63)) & np.uint64(1):
            for k in range(c >> 6, nw):
                y[k] ^= img_rows[i, k]
            for k in range(x.shape[0]):
                x[k] ^= pre_rows[i, k]
    return x


@njit(cache=True)
def _matmul(a, b, ncols_b):
    # (n x m) * (m x p): row i of result = XOR of rows of b selected by row i of a
    n = a.shape[0]
    m = b.shape[0]
    out = np.zeros((n, b.shape[1]), dtype=np.uint64)
    for i in range(n):
        for j in range(m):
            if (a[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1):
                for k in range(b.shape[1]):
                    out[i, k] ^= b[j, k]
    return out


# ---------------------------------------------------------------------------
# Python-facing API


def pack_rows(dense: np.ndarray) -> np.ndarray:
    """Pack a 0/1 array of shape (rows, cols) into uint64 words."""
    dense = np.asarray(dense, dtype=np.uint8) & 1
    rows, cols = dense.shape
    nw = nwords(cols)
    padded = np.zeros((rows, nw * WORD), dtype=np.uint8)
    padded[:, :cols] = dense
    bits = np.packbits(padded.reshape(rows, nw, WORD), axis=2, bitorder="little")
    return bits.view("<u8").reshape(rows, nw).astype(np.uint64)


def unpack_rows(packed: np.ndarray, cols: int) -> np.ndarray:
    packed = np.ascontiguousarray(packed, dtype=np.uint64)
    rows = packed.shape[0]
    if rows == 0:
        return np.zeros((0, cols), dtype=np.uint8)
    as_bytes = packed.astype("<u8").view(np.uint8).reshape(rows, -1)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :cols].copy()


def pack_vector(bits) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    return pack_rows(bits.reshape(1, -1))[0]


def unpack_vector(vec: np.ndarray, n: int) -> np.ndarray:
    return unpack_rows(vec.reshape(1, -1), n)[0]


def vector_from_indices(indices, n: int) -> np.ndarray:
    v = np.zeros(nwords(n), dtype=np.uint64)
    for j in indices:
        v[j >> 6] ^= np.uint64(1) << np.uint64(j & 63)
    return v


def indices_of(vec: np.ndarray, n: int) -> list[int]:
    return [int(j) for j in np.flatnonzero(unpack_vector(vec, n))]


def popcount(vec: np.ndarray) -> int:
    return int(np.unpackbits(np.ascontiguousarray(vec).view(np.uint8)).sum())


@dataclass
class BitMatrix:
    """Dense GF(2) matrix; row ``i`` is ``data[i]`` packed into words."""

    rows: int
    cols: int
    data: np.ndarray = field(repr=False)
    frozen: bool = False

    def __post_init__(self):
        assert self.data.shape == (self.rows, nwords(self.cols))
        assert self.data.dtype == np.uint64

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, nwords(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        m = cls.zeros(n, n)
        for i in range(n):
            m.data[i, i >> 6] |= np.uint64(1) << np.uint64(i & 63)
        return m

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        dense = np.atleast_2d(np.asarray(dense, dtype=np.uint8))
        rows, cols = dense.shape
        return cls(rows, cols, pack_rows(dense) if rows else np.zeros((0, nwords(cols)), np.uint64))

    def to_dense(self) -> np.ndarray:
        return unpack_rows(self.data, self.cols) if self.rows else np.zeros((0, self.cols), np.uint8)

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.data.copy())

    def freeze(self) -> "BitMatrix":
        self.frozen = True
        self.data.flags.writeable = False
        return self

    def __getitem__(self, ij) -> int:
        i, j = ij
        return int(_get(self.data[i], j))

    def set(self, i: int, j: int, value: int = 1) -> None:
        if self.frozen:
            raise ValueError("matrix is frozen")
        if self[i, j] != (value & 1):
            _flip(self.data[i], j)

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T) if self.rows and self.cols else BitMatrix.zeros(self.cols, self.rows)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        return BitMatrix(self.rows, other.cols, _matmul(self.data, other.data, other.cols))

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.data ^ other.data)

    def __eq__(self, other) -> bool:
        return (isinstance(other, BitMatrix) and self.rows == other.rows
                and self.cols == other.cols and bool(np.array_equal(self.data, other.data)))

    def is_zero(self) -> bool:
        return not self.data.any()

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Column action ``M v`` for a packed vector ``v`` of length ``cols``."""
        dense = self.to_dense()
        v = unpack_vector(vec, self.cols)
        return pack_vector(dense.dot(v) & 1)


def echelon(data: np.ndarray, ncols: int, m4r: bool = False, k: int = 6) -> np.ndarray:
    """Bring packed rows to echelon form in place; returns pivot columns."""
    if data.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    if m4r:
        return _echelon_m4r(data, ncols, k)
    return _echelon_kernel(data, ncols)


def rank(m: BitMatrix, m4r: bool = False) -> int:
    return len(echelon(m.data.copy(), m.cols, m4r=m4r))


@dataclass
class Subspace:
    """Subspace of GF(2)^ambient with a reduced row echelon basis."""

    ambient: int
    basis: np.ndarray  # packed rows, RREF
    pivots: np.ndarray

    @classmethod
    def span(cls, ambient: int, rows: np.ndarray) -> "Subspace":
        rows = np.array(rows, dtype=np.uint64).reshape(-1, nwords(ambient))
        work = rows.copy()
        piv = echelon(work, ambient)
        work = work[: len(piv)]
        # back-substitute to reduced form
        for i in range(len(piv) - 1, -1, -1):
            c = piv[i]
            for j in range(i):
                if _get(work[j], c):
                    work[j] ^= work[i]
        return cls(ambient, work, piv)

    @classmethod
    def zero(cls, ambient: int) -> "Subspace":
        return cls(ambient, np.zeros((0, nwords(ambient)), np.uint64), np.zeros(0, np.int64))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: np.ndarray) -> np.ndarray:
        v = vec.copy()
        _reduce_vector(v, self.basis, self.pivots, self.ambient)
        return v

    def contains(self, vec: np.ndarray) -> bool:
        return not self.reduce(vec).any()

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subspace) and self.ambient == other.ambient
                and np.array_equal(self.pivots, other.pivots)
                and np.array_equal(self.basis, other.basis))

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.ambient, np.vstack([self.basis, other.basis]))


def kernel(m: BitMatrix) -> Subspace:
    """Right null space {v : M v = 0}."""
    if m.cols == 0:
        return Subspace.zero(0)
    t = m.transpose()  # rows of t are columns of m
    n = m.cols
    aug = np.zeros((n, nwords(m.rows + n)), dtype=np.uint64)
    dense = np.zeros((n, m.rows + n), dtype=np.uint8)
    if m.rows:
        dense[:, : m.rows] = t.to_dense()
    dense[:, m.rows:] = np.eye(n, dtype=np.uint8)
    aug = pack_rows(dense)
    piv = echelon(aug, m.rows)
    rest = unpack_rows(aug[len(piv):], m.rows + n)[:, m.rows:]
    return Subspace.span(n, pack_rows(rest) if len(rest) else np.zeros((0, nwords(n)), np.uint64))


def solve(m: BitMatrix, b: np.ndarray):
    """Some x with M x = b, or None if b is not in the column space."""
    n = m.cols
    t = m.transpose()
    width = m.rows + n
    dense = np.zeros((n, width), dtype=np.uint8)
    if m.rows:
        dense[:, : m.rows] = t.to_dense()
    dense[:, m.rows:] = np.eye(n, dtype=np.uint8)
    aug = pack_rows(dense) if n else np.zeros((0, nwords(width)), np.uint64)
    piv = echelon(aug, m.rows)
    img = aug[: len(piv)]
    bb = unpack_vector(b, m.rows)
    y = pack_vector(np.concatenate([bb, np.zeros(n, np.uint8)]))
    x = np.zeros(nwords(width), dtype=np.uint64)
    for i, c in enumerate(piv):
        if _get(y, c):
            y ^= img[i]
            x ^= img[i]
    if unpack_vector(y, width)[: m.rows].any():
        return None
    return pack_vector(unpack_vector(x, width)[m.rows:])


class QuasiInverse:
    """Echelon image rows of a linear map with recorded preimages.

    ``image`` rows are vectors of the target, ``preimage`` rows the source
    vectors mapping to them.  ``solve`` finds a preimage of any target vector
    in the image.
    """

    __slots__ = ("pivots", "image", "preimage", "source_dim", "target_dim")

    def __init__(self, pivots, image, preimage, source_dim, target_dim):
        self.pivots = pivots
        self.image = image
        self.preimage = preimage
        self.source_dim = source_dim
        self.target_dim = target_dim

    def solve(self, y: np.ndarray):
        y = y.copy()
        x = _solve_kernel(y, self.image, self.preimage, self.pivots)
        if y.any():
            return None
        return x

    @property
    def rank(self) -> int:
        return len(self.pivots)


# ---------------------------------------------------------------------------
# binary cache format

_HEADER = struct.Struct("<4sIQQI")  # magic, version, rows, cols, crc32


def dump_matrix(m: BitMatrix) -> bytes:
    payload = np.ascontiguousarray(m.data, dtype="<u8").tobytes()
    return _HEADER.pack(b"F2MX", CACHE_VERSION, m.rows, m.cols, zlib.crc32(payload)) + payload


def load_matrix(blob: bytes) -> BitMatrix:
    magic, version, rows, cols, crc = _HEADER.unpack_from(blob)
    if magic != b"F2MX":
        raise ValueError("not a matrix blob")
    if version != CACHE_VERSION:
        raise ValueError(f"matrix cache version {version} != {CACHE_VERSION}")
    payload = blob[_HEADER.size:]
    if zlib.crc32(payload) != crc:
        raise ValueError("matrix cache checksum mismatch")
    data = np.frombuffer(payload, dtype="<u8").astype(np.uint64).reshape(rows, nwords(cols))
    return BitMatrix(rows, cols, data.copy())
