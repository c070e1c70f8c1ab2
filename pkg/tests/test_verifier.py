import json

import pytest

from e2page.ext_engine import EngineConfig, ExtEngine
from e2page.names_registry import default_fixture
from e2page.verifier import (AXIOM, FAIL, OUT_OF_SCOPE, PASS, SKIPPED, VerifyConfig, Verifier)

ALL_IDS = [f"C{i}" for i in range(1, 20)] + ["A1", "A2", "A3", "A4"]


@pytest.fixture(scope="module")
def small_verifier(cache_dir):
    cfg = VerifyConfig(s_max=9, t_max=57, cache_dir=cache_dir)
    return Verifier(cfg)


def test_claim_list_is_total(small_verifier):
    assert small_verifier.ids() == ALL_IDS


def test_out_of_range_claims_skip_with_instructions(small_verifier):
    report = small_verifier.run(["C1", "C2", "C3", "C6", "A1", "A3"])
    status = {c.id: c for c in report.claims}
    for cid in ("C1", "C2", "C3", "C6"):
        assert status[cid].status == SKIPPED
        assert "--tmax" in status[cid].evidence["enable"]
    assert status["A1"].status == AXIOM
    assert status["A3"].status == OUT_OF_SCOPE
    assert report.exit_code() == 0
    assert report.exit_code(strict=True) != 0


def test_table_claim_passes(small_verifier):
    report = small_verifier.run(["C9"])
    (claim,) = report.claims
    assert claim.status == PASS, claim.evidence
    assert claim.evidence["Σ^7Cη"]["43/6"]["t[7]"]["filtration"] == 7


def test_report_is_deterministic(small_verifier):
    a = small_verifier.run(["C9", "C16", "A2"]).to_json()
    b = small_verifier.run(["C9", "C16", "A2"]).to_json()
    assert a == b
    data = json.loads(a)
    assert [c["id"] for c in data["claims"]] == ["C9", "C16", "A2"]
    assert "seconds" not in data["claims"][0]


def test_unknown_claim_id(small_verifier):
    with pytest.raises(KeyError):
        small_verifier.run(["C99"])


def test_wrong_fixture_name_fails_with_witness(tmp_path, cache_dir):
    # move d_1 into p's bidegree: h_2d_1[7] no longer resolves where the chart says
    text = []
    for e in default_fixture():
        s, t = (e.s, e.t + 1) if e.name == "d_1" else (e.s, e.t)
        text.append(f"{e.name} | {_builtin_name(e.complex)} | {s} | {t} | {e.selector} | {e.provenance}")
    fixture = tmp_path / "names.txt"
    fixture.write_text("\n".join(text) + "\n")
    cfg = VerifyConfig(s_max=9, t_max=57, cache_dir=cache_dir, fixture=str(fixture))
    engine = ExtEngine(EngineConfig(s_max=9, t_max=57, cache_dir=cache_dir))
    report = Verifier(cfg, engine=engine).run(["C9"])
    (claim,) = report.claims
    assert claim.status == FAIL
    assert "h_2d_1" in claim.evidence["failure"]
    assert report.exit_code() != 0


def _builtin_name(spec):
    from e2page import complexes as cx
    for name in cx.BUILTINS:
        if cx.builtin(name) == spec:
            return name
    raise KeyError(spec)


def test_text_report(small_verifier):
    text = small_verifier.run(["C1", "C9"]).to_text()
    assert "C1   SKIPPED" in text
    assert "C9   CHECKED-PASS" in text
    assert text.splitlines()[-1].startswith("summary:")
