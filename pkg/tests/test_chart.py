import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings, strategies as st

from e2page import complexes as cx
from e2page.chart import build_chart, from_structured, permuted_dims, render, to_structured
from e2page.ext_engine import LambdaExt


@pytest.fixture(scope="module")
def sphere_chart(engine, registry):
    return build_chart(engine, cx.sphere(0), 6, 20, registry)


def test_sphere_chart_low_structure(sphere_chart):
    names = {(r.s, r.t): r.names for r in sphere_chart.records}
    for s in range(1, 7):
        assert names[(s, s)] == [f"h_0^{s}" if s > 1 else "h_0"]
    assert names[(1, 2)] == ["h_1"] and names[(1, 4)] == ["h_2"] and names[(1, 8)] == ["h_3"]
    assert names[(3, 11)] == ["c_0"]
    assert names[(2, 4)] == ["h_1^2"]


def test_representatives_are_cocycles(sphere_chart):
    lx = LambdaExt(cx.sphere(0))
    for r in sphere_chart.records:
        assert len(r.representatives) == r.dim
        for text in r.representatives:
            c = cx.cochain(cx.sphere(0), text)
            assert lx.class_of(c) is not None


def test_structured_roundtrip(sphere_chart):
    text = to_structured(sphere_chart)
    back = from_structured(text)
    assert back == sphere_chart
    assert to_structured(back) == text


def test_svg_is_wellformed(sphere_chart):
    root = ET.fromstring(render(sphere_chart, "svg"))
    dots = [e for e in root.iter() if e.tag.endswith("circle")]
    assert len(dots) == sum(r.dim for r in sphere_chart.records)


def test_text_format(sphere_chart):
    lines = render(sphere_chart, "text").splitlines()
    assert lines[0].startswith("# S^0")
    assert "8 3 11 1 | c_0 |" in "\n".join(lines)
    with pytest.raises(ValueError):
        render(sphere_chart, "pdf")


def test_table_names_on_c_eta(engine, registry):
    ch = build_chart(engine, cx.builtin("C-eta-7"), 6, 50, registry, stems={42, 43}, rep_t_max=0)
    assert sorted(ch.at(5, 47).names) == ["h_0p[9]", "h_2d_1[7]"]
    assert ch.at(2, 45).names == ["h_2h_5[9]"]


@given(st.sampled_from(list(cx.BUILTINS)), st.integers(0, 6), st.integers(0, 14), st.integers(0, 99))
@settings(max_examples=60, deadline=None)
def test_dims_independent_of_basis_order(name, s, t_off, seed):
    spec = cx.builtin(name)
    t = spec.bottom + s + t_off
    assert permuted_dims(spec, s, t, seed) == LambdaExt(spec).dim(s, t)
