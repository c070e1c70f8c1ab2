import pytest

from e2page import cobar
from e2page import complexes as cx
from e2page.ext_engine import LambdaExt


def test_monomial_degrees():
    assert cobar.monomials(1) == ((1,),)
    assert set(cobar.monomials(3)) == {(3,), (0, 1)}


def test_coproduct_of_xi2():
    # Δξ_2 = ξ_2⊗1 + ξ_1^2⊗ξ_1 + 1⊗ξ_2
    assert set(cobar.coproduct((0, 1))) == {((0, 1), ()), ((2,), (1,)), ((), (0, 1))}
    assert cobar.reduced_coproduct((0, 1)) == [((2,), (1,))]


def test_cobar_is_a_complex():
    for t in range(1, 11):
        for s in range(1, t):
            d0 = cobar.differential_matrix(s, t).astype(int)
            d1 = cobar.differential_matrix(s + 1, t).astype(int)
            if d0.size and d1.size:
                assert not (d0 @ d1 % 2).any(), (s, t)


def test_cobar_oracle_small_values():
    dims = cobar.cobar_dims(8)
    assert dims[(1, 2)] == 1  # h_1
    assert dims[(1, 1)] == 1  # h_0
    assert (2, 3) not in dims  # h_0 h_1 = 0


def test_cobar_matches_lambda_t14():
    dims = cobar.cobar_dims(14)
    lx = LambdaExt(cx.sphere(0))
    for t in range(15):
        for s in range(t + 1):
            assert dims.get((s, t), 0) == lx.dim(s, t), (s, t)


def test_cobar_matches_resolution_t14(engine):
    dims = cobar.cobar_dims(14)
    for t in range(15):
        for s in range(min(t, 9) + 1):
            assert dims.get((s, t), 0) == engine.ext_dim(cx.sphere(0), s, t), (s, t)


def test_cost_guard():
    with pytest.raises(ValueError):
        cobar.cobar_dims(cobar.MAX_T + 1)
