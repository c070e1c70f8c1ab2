import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from e2page import f2_linalg as f2
from e2page.ext_engine import gf2_kernel, gf2_rank, gf2_solve


def rank_oracle(dense):
    # rows as Python ints, plain elimination
    rows = [int("".join(map(str, r[::-1])) or "0", 2) for r in dense.astype(int)]
    r = 0
    while rows:
        pivot = rows.pop()
        if pivot == 0:
            continue
        r += 1
        low = pivot & -pivot
        rows = [x ^ pivot if x & low else x for x in rows]
    return r


matrices = st.integers(0, 90).flatmap(
    lambda n: st.integers(0, 90).flatmap(
        lambda m: arrays(np.uint8, (n, m), elements=st.integers(0, 1))))


@given(matrices)
@settings(max_examples=150, deadline=None)
def test_rank_matches_oracle(dense):
    m = f2.BitMatrix.from_dense(dense) if dense.size else f2.BitMatrix.zeros(*dense.shape)
    expected = rank_oracle(dense)
    assert f2.rank(m) == expected
    assert f2.rank(m, m4r=True) == expected


@given(matrices)
@settings(max_examples=100, deadline=None)
def test_m4r_same_echelon(dense):
    if not dense.size:
        return
    a = f2.pack_rows(dense)
    b = a.copy()
    pa = f2.echelon(a, dense.shape[1])
    pb = f2.echelon(b, dense.shape[1], m4r=True)
    assert list(pa) == list(pb)
    sa = f2.Subspace.span(dense.shape[1], a[: len(pa)])
    sb = f2.Subspace.span(dense.shape[1], b[: len(pb)])
    assert sa == sb


@given(matrices)
@settings(max_examples=100, deadline=None)
def test_kernel_rank_nullity(dense):
    if not dense.size:
        return
    m = f2.BitMatrix.from_dense(dense)
    ker = f2.kernel(m)
    assert ker.dim + f2.rank(m) == dense.shape[1]
    for row in f2.unpack_rows(ker.basis, dense.shape[1]) if ker.dim else []:
        assert not (dense @ row % 2).any()


@given(matrices, st.integers(0, 2**32))
@settings(max_examples=100, deadline=None)
def test_solve_consistent(dense, seed):
    if not dense.size:
        return
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 2, dense.shape[1]).astype(np.uint8)
    b = dense @ x % 2
    m = f2.BitMatrix.from_dense(dense)
    y = f2.solve(m, f2.pack_vector(b))
    assert y is not None
    assert np.array_equal(dense @ f2.unpack_vector(y, dense.shape[1]) % 2, b)
    y2 = gf2_solve(dense, b)
    assert np.array_equal(dense @ y2 % 2, b)


def test_solve_outside_image():
    dense = np.array([[1, 0], [1, 0]], np.uint8)
    assert f2.solve(f2.BitMatrix.from_dense(dense), f2.pack_vector(np.array([1, 0], np.uint8))) is None
    assert gf2_solve(dense, np.array([1, 0], np.uint8)) is None


def test_dense_helpers():
    dense = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]], np.uint8)
    assert gf2_rank(dense) == 2
    ker = gf2_kernel(dense)
    assert len(ker) == 1 and not (dense @ ker[0] % 2).any()


def test_matmul_and_transpose():
    rng = np.random.default_rng(3)
    a = rng.integers(0, 2, (70, 130)).astype(np.uint8)
    b = rng.integers(0, 2, (130, 65)).astype(np.uint8)
    prod = f2.BitMatrix.from_dense(a) @ f2.BitMatrix.from_dense(b)
    assert np.array_equal(prod.to_dense(), a.astype(int) @ b % 2)
    assert np.array_equal(f2.BitMatrix.from_dense(a).transpose().to_dense(), a.T)


def test_frozen_matrix_rejects_writes():
    m = f2.BitMatrix.identity(5).freeze()
    with pytest.raises(ValueError):
        m.set(0, 1)


def test_binary_format_roundtrip_and_corruption():
    rng = np.random.default_rng(0)
    m = f2.BitMatrix.from_dense(rng.integers(0, 2, (17, 100)).astype(np.uint8))
    blob = f2.dump_matrix(m)
    assert f2.load_matrix(blob) == m
    bad = bytearray(blob)
    bad[-1] ^= 1
    with pytest.raises(ValueError, match="checksum"):
        f2.load_matrix(bytes(bad))
    with pytest.raises(ValueError):
        f2.load_matrix(b"XXXX" + blob[4:])
