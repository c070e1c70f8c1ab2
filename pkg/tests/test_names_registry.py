import pytest

from e2page import complexes as cx
from e2page.names_registry import (AmbiguousName, Registry, UnknownName, default_fixture,
                                   parse_fixture)


def reg_from(engine, text):
    return Registry(engine, parse_fixture(text))


BASE = "\n".join(f"h_{i} | sphere | 1 | {2 ** i} | unique | derived" for i in range(6))


def test_fixture_parses():
    entries = default_fixture()
    assert {"h_0", "N", "gn", "x_{14,42}"} <= {e.name for e in entries}
    assert all(e.provenance in ("published", "curated-fixture", "derived") for e in entries)


def test_audit_in_range(registry):
    report = registry.audit(t_max=40, s_max=9)
    assert report.ok, report.problems
    assert "h_0" in report.resolved and "d_1" in report.resolved
    assert "N" in report.skipped


def test_fixture_errors():
    with pytest.raises(ValueError, match="6 fields"):
        parse_fixture("h_0 | sphere | 1 | 1 | unique")
    with pytest.raises(ValueError, match="provenance"):
        parse_fixture("h_0 | sphere | 1 | 1 | unique | guessed")
    with pytest.raises(ValueError, match="unknown builtin"):
        parse_fixture("h_0 | torus | 1 | 1 | unique | derived")


def test_duplicate_and_empty_reported(engine):
    reg = reg_from(engine, BASE + "\nh_0 | sphere | 1 | 1 | unique | derived"
                                  "\nghost | sphere | 2 | 3 | unique | derived")
    report = reg.audit(t_max=20)
    problems = dict(report.problems)
    assert "duplicate" in problems["h_0"]
    assert "empty" in problems["ghost"]
    assert not report.ok


def test_unique_on_wide_bidegree(engine):
    reg = reg_from(engine, BASE + "\nwide | sphere | 5 | 20 | unique | derived")
    with pytest.raises(AmbiguousName, match="dimension 2"):
        reg.resolve("wide")


def test_mod_selector(engine):
    reg = reg_from(engine, BASE + "\nf | sphere | 4 | 22 | mod h_0^2h_2h_4 | derived")
    r = reg.resolve_coset("f")
    assert len(r.ambiguity) == 1 and r.vector.any()
    assert not r.contains(reg.resolve("h_0^2h_2h_4").vector)


def test_coords_and_word_selectors(engine):
    reg = reg_from(engine, BASE + "\nc | sphere | 3 | 11 | word 3 4 1 + 6 1 1 | derived"
                                  "\nc2 | sphere | 3 | 11 | coords 1 | derived")
    assert reg.resolve("c").coords == (1,)
    assert reg.resolve("c2").coords == (1,)
    reg2 = reg_from(engine, BASE + "\nbad | sphere | 3 | 11 | word 3 4 1 | derived")
    with pytest.raises(AmbiguousName, match="not a cocycle"):
        reg2.resolve("bad")


def test_products_and_monomials(registry, products):
    h1, h2 = registry.resolve("h_1"), registry.resolve("h_2")
    assert registry.resolve("h_1h_2").is_zero()
    assert registry.resolve("h_2^3").coords == registry.resolve("h_1^2h_3").coords
    assert registry.resolve("h_1^2h_2").coords == products.multiply(products.multiply(h1, h1), h2).coords
    assert registry.resolve("h_0^{3}").coords == (1,)


def test_p_rule(registry, products):
    # Ph_1^2 = Ph_1 * h_1
    lhs = registry.resolve("Ph_1^2")
    rhs = products.multiply(registry.resolve("Ph_1"), registry.resolve("h_1"))
    assert lhs.coords == rhs.coords


def test_unknown_name_suggests(registry):
    with pytest.raises(UnknownName, match="close matches"):
        registry.resolve("g_3")


def test_self_reference_detected(engine):
    reg = reg_from(engine, BASE + "\nloop | sphere | 2 | 3 | product loop2 | derived"
                                  "\nloop2 | sphere | 2 | 3 | product loop | derived")
    with pytest.raises(AmbiguousName, match="itself"):
        reg.resolve("loop")


def test_cell_names(registry):
    c = cx.builtin("C-eta-7")
    r = registry.resolve_coset("h_0[9]", c)
    assert (r.cls.s, r.cls.t) == (1, 10) and r.cls.ah_filtration == 9
    with pytest.raises(UnknownName, match="not present"):
        registry.resolve_coset("h_1[9]", c)


def test_identify(registry):
    assert registry.identify(registry.resolve("d_0")) == ["d_0"]
    assert registry.identify(registry.resolve("h_0")) == ["h_0"]
