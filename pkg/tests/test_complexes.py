import pytest
from hypothesis import given, settings, strategies as st

from e2page import complexes as cx
from e2page import lambda_core as lam

SPECS = [cx.builtin(n) for n in cx.BUILTINS]


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.label)
def test_square_zero_exhaustive_small(spec):
    report = cx.check_square_zero(spec, 18)
    assert report.ok, report.failures[:5]
    assert report.checked > 0


def test_square_zero_certificate():
    cert = cx.square_zero_certificate(40, SPECS)
    assert cert.ok, cert.failures
    assert cert.overlaps > 0 and cert.relations > 0


@given(st.sampled_from(SPECS), st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_square_zero_sampled(spec, seed):
    assert cx.sample_square_zero(spec, 19, 32, 40, seed=seed).ok


def test_projective_attaching_rule():
    # the 2-cell of P_1^2 hits the 1-cell by λ_0 (degree 2); P_2^3 splits
    p12 = cx.projective(1, 2)
    assert cx.symbol_differential(p12, 2, ()) == frozenset({(1, (0,))})
    p23 = cx.projective(2, 3)
    assert cx.symbol_differential(p23, 3, ()) == frozenset()


def test_c_eta_attaching_map_is_h1():
    c = cx.builtin("C-eta-7")
    assert cx.symbol_differential(c, 9, ()) == frozenset({(7, (1,))})
    assert c.label == "Σ^7Cη"


def test_restrict():
    p = cx.projective(1, None)
    assert p.restrict(7, 9) == cx.projective(7, 9)
    assert p.restrict(9, 9) == cx.sphere(9)
    c = cx.builtin("C-eta-7")
    assert c.restrict(9, None) == cx.sphere(9)
    with pytest.raises(cx.ComplexSpecError):
        c.restrict(10, None)


def test_invalid_specs():
    with pytest.raises(cx.ComplexSpecError):
        cx.projective(0, 3)
    with pytest.raises(cx.ComplexSpecError):
        cx.projective(5, 3)
    with pytest.raises(cx.ComplexSpecError):
        cx.twisted([7, 9], {(9, 8): "1"})  # missing cell
    with pytest.raises(cx.ComplexSpecError):
        cx.twisted([7, 9], {(9, 7): "2"})  # wrong degree
    with pytest.raises(cx.ComplexSpecError):
        cx.twisted([7, 11], {(11, 7): "1 1"})  # not single-step
    with pytest.raises(cx.ComplexSpecError):
        cx.builtin("P2-5")


def test_yaml_spec(tmp_path):
    f = tmp_path / "cnu.yaml"
    f.write_text("kind: cells\nname: Cnu\ncells: [0, 4]\ntwists:\n  - {from: 4, to: 0, word: '3'}\n")
    spec = cx.load_spec(f)
    assert spec.cells == (0, 4) and spec.label == "Cnu"
    assert cx.check_square_zero(spec, 14).ok
    g = tmp_path / "p.yaml"
    g.write_text("kind: projective\nlower: 3\nupper: inf\n")
    assert cx.load_spec(g) == cx.projective(3, None)
    with pytest.raises(cx.ComplexSpecError):
        cx.load_spec(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("kind: torus\n")
    with pytest.raises(cx.ComplexSpecError):
        cx.load_spec(bad)


def test_cochain_parsing():
    p = cx.builtin("P1-inf")
    c = cx.cochain(p, "(9) 3 5 7 3 5 7 7")
    assert (c.s, c.t) == (7, 53) and c.leading_cell == 9
    with pytest.raises(ValueError):
        cx.cochain(p, "3 5")  # no cell
    with pytest.raises(ValueError):
        cx.cochain(p, "(9) 3 + (9) 3 5")  # mixed bidegree
    with pytest.raises(ValueError):
        cx.cochain(cx.projective(7, 9), "(5) 3")  # cell out of range


@pytest.mark.parametrize("lower,upper", [(1, 6), (7, None)])
def test_truncation_maps_are_chain_maps(lower, upper):
    inc, proj = cx.cell_truncation_maps(cx.projective(1, 9), lower, upper, t_max=12)
    assert inc is not None and proj is not None


def test_middle_range_rejected():
    with pytest.raises(cx.ComplexSpecError):
        cx.cell_truncation_maps(cx.projective(1, 9), 3, 5)


def test_transfer_cochain_concatenates():
    c = cx.cochain(cx.builtin("P1-inf"), "(1)")
    assert cx.transfer_cochain(c).terms == frozenset({(0, (1,))})
    assert lam.bidegree((1,)) == (1, 2)
