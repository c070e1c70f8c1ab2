import json

import pytest
from click.testing import CliRunner

from e2page.cli import EXIT_COMPUTE, EXIT_CONFIG, main
from e2page.verifier import EXIT_CLAIM_FAILED


@pytest.fixture
def run(cache_dir):
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, list(args), env={"E2PAGE_CACHE": cache_dir})
    return invoke


def test_exit_codes_distinct():
    assert len({0, EXIT_CONFIG, EXIT_COMPUTE, EXIT_CLAIM_FAILED}) == 4


def test_query_mul(run):
    r = run("query", "mul", "h_0", "h_1")
    assert r.exit_code == 0
    assert "[0]" in r.stdout


def test_query_massey(run):
    r = run("query", "massey", "h_2", "h_1", "h_2")
    assert r.exit_code == 0
    assert r.stdout.startswith("[1] in Ext^(2,10)(S^0)")
    assert "zero indeterminacy" in r.stdout


def test_query_massey_large(run):
    r = run("query", "massey", "N", "h_1", "h_2", "--tmax", "60")
    assert r.exit_code == 0, r.output
    assert "[gn]" in r.stdout and "zero indeterminacy" in r.stdout


def test_query_transfer(run):
    r = run("query", "transfer", "h_1t[9]")
    assert r.exit_code == 0, r.output
    assert "[N]" in r.stdout


def test_query_triple_and_ext(run):
    r = run("query", "ext", "3", "11")
    assert r.exit_code == 0 and "(3,11,0) c_0" in r.stdout
    r = run("query", "mul", "(3,11,0)", "h_1")
    assert r.exit_code == 0 and "Ext^(4,13)" in r.stdout


def test_query_divide(run):
    r = run("query", "divide", "h_1^2", "by", "h_1")
    assert r.exit_code == 0 and "[h_1]" in r.stdout
    r = run("query", "divide", "h_1", "by", "h_0")
    assert r.exit_code == 0 and "not divisible" in r.stdout


def test_query_unknown_name(run):
    r = run("query", "mul", "g_3", "h_1")
    assert r.exit_code == EXIT_CONFIG
    assert "close matches" in r.stderr


def test_query_bad_syntax(run):
    assert run("query", "frobnicate", "h_0").exit_code == EXIT_CONFIG
    assert run("query", "mul", "h_0").exit_code == EXIT_CONFIG


def test_query_undefined_massey(run):
    r = run("query", "massey", "h_0", "h_0", "h_1")
    assert r.exit_code == EXIT_COMPUTE


def test_chart_sphere(run):
    r = run("chart", "sphere", "--tmax", "20", "--smax", "5")
    assert r.exit_code == 0
    assert "| h_3 |" in r.stdout and "| h_0^5 |" in r.stdout


def test_chart_all_formats(run, tmp_path):
    r = run("chart", "P1-9", "--smax", "3", "--tmax", "12", "--format", "all", "-o", str(tmp_path))
    assert r.exit_code == 0, r.output
    assert {p.name for p in tmp_path.iterdir()} == {"P1-9.txt", "P1-9.json", "P1-9.svg"}
    data = json.loads((tmp_path / "P1-9.json").read_text())
    assert data["complex"] == "P_1^9"


def test_chart_spec_file(run, tmp_path):
    f = tmp_path / "c.yaml"
    f.write_text("kind: cells\ncells: [0, 2]\ntwists:\n  - {from: 2, to: 0, word: '1'}\n")
    r = run("chart", str(f), "--smax", "3", "--tmax", "10", "--format", "structured")
    assert r.exit_code == 0, r.output
    assert json.loads(r.stdout)["complex"] == "cells(0,2)"


def test_chart_errors(run):
    assert run("chart", "nosuch.yaml").exit_code == EXIT_CONFIG
    assert run("chart", "sphere", "--threads", "0").exit_code == EXIT_CONFIG
    assert run("chart", "sphere", "--format", "all").exit_code == EXIT_CONFIG


def test_verify_selected_claim(run):
    r = run("verify", "--smax", "9", "--tmax", "57", "--claims", "C9")
    assert r.exit_code == 0, r.output
    lines = r.stdout.splitlines()
    assert any(l.startswith("C9   CHECKED-PASS") for l in lines)
    assert not any(l.startswith("C10") for l in lines)


def test_verify_strict_with_skips(run):
    r = run("verify", "--smax", "9", "--tmax", "57", "--claims", "C1,A1", "--strict")
    assert r.exit_code == EXIT_CLAIM_FAILED
    r = run("verify", "--smax", "9", "--tmax", "57", "--claims", "C1,A1")
    assert r.exit_code == 0


def test_verify_structured_identical(run):
    a = run("verify", "--smax", "9", "--tmax", "57", "--claims", "C16,A3", "--format", "structured")
    b = run("verify", "--smax", "9", "--tmax", "57", "--claims", "C16,A3", "--format", "structured")
    assert a.exit_code == 0
    assert a.stdout == b.stdout
    assert json.loads(a.stdout)["claims"][0]["status"] == "CHECKED-PASS"


def test_verify_unknown_claim(run):
    assert run("verify", "--claims", "C77").exit_code == EXIT_CONFIG
