"""Acceptance criteria 1-7, one test each; every test prints a PASS/FAIL line."""
import itertools
import random
import time

import numpy as np
import pytest
from click.testing import CliRunner

from e2page import cobar
from e2page import complexes as cx
from e2page import lambda_core as lam
from e2page.chart import permuted_dims
from e2page.cli import main
from e2page.ext_engine import LambdaExt
from e2page.verifier import AXIOM, OUT_OF_SCOPE, PASS, VerifyConfig, Verifier

SPECS = [cx.builtin(n) for n in cx.BUILTINS]
SPHERE = cx.sphere(0)


@pytest.fixture(scope="module")
def verifier(cache_dir):
    return Verifier(VerifyConfig(s_max=16, t_max=97, cache_dir=cache_dir))


def _run(verifier, ids):
    report = verifier.run(ids)
    bad = [f"{c.id}={c.status}: {c.evidence.get('failure', '')}" for c in report.claims
           if c.status != PASS]
    return report, bad


def test_criterion_1_correctness(engine, report_criterion):
    t0 = time.perf_counter()
    problems = []
    # d^2 = 0: exhaustive through t <= 24, structural certificate through 40, samples above 24
    for spec in SPECS:
        if not cx.check_square_zero(spec, 24).ok:
            problems.append(f"d^2 exhaustive {spec.label}")
        if not cx.sample_square_zero(spec, 25, 40, 2000, seed=7).ok:
            problems.append(f"d^2 sampled {spec.label}")
    if not cx.square_zero_certificate(40, SPECS).ok:
        problems.append("d^2 certificate")
    # Leibniz on random admissible pairs
    rng = random.Random(11)
    for _ in range(300):
        x = cx.random_admissible(rng.randint(1, 3), rng.randint(3, 16), rng)
        y = cx.random_admissible(rng.randint(1, 3), rng.randint(3, 16), rng)
        if x is None or y is None:
            continue
        lhs = lam.d_set(lam.normalize_tuple(x + y))
        rhs: set = set()
        for a in lam.d_tuple(x):
            rhs ^= set(lam.normalize_tuple(a + y))
        for b in lam.d_tuple(y):
            rhs ^= set(lam.normalize_tuple(x + b))
        if lhs != frozenset(rhs):
            problems.append(f"Leibniz {x} {y}")
    # cobar oracle, both models, t <= 14
    dims = cobar.cobar_dims(14)
    lx = LambdaExt(SPHERE)
    for t in range(15):
        for s in range(t + 1):
            expect = dims.get((s, t), 0)
            if lx.dim(s, t) != expect or (s <= 9 and engine.ext_dim(SPHERE, s, t) != expect):
                problems.append(f"cobar ({s},{t})")
    # h_0 tower and Ext^1
    if any(engine.ext_dim(SPHERE, s, s) != 1 for s in range(13)):
        problems.append("h_0 tower")
    ext1 = [t for t in range(2, 64) if engine.ext_dim(SPHERE, 1, t)]
    if ext1 != [2, 4, 8, 16, 32]:
        problems.append(f"Ext^1 nonzero at {ext1}")
    dt = time.perf_counter() - t0
    ok = not problems and dt < 120
    report_criterion(1, ok, f"d^2, Leibniz, cobar t<=14, h_0 tower, Ext^1 at {ext1} for t in [2,63] "
                            f"({dt:.0f}s){' ' + '; '.join(problems[:5]) if problems else ''}")
    assert ok, problems


def test_criterion_2_first_table(verifier, report_criterion):
    report, bad = _run(verifier, ["C9"])
    report_criterion(2, not bad, "Σ^7Cη stems 42-43, s <= 6: dims and eight named classes" +
                     (f"  {bad}" if bad else ""))
    assert not bad, bad


def test_criterion_3_stem_46_47_tables(verifier, report_criterion):
    report, bad = _run(verifier, ["C10", "C11"])
    report_criterion(3, not bad, "Σ^7Cη, P_7^9, P_1^9, P_1^inf stems 46-47: dims = named + bullets, "
                                 "names at stated filtrations" + (f"  {bad}" if bad else ""))
    assert not bad, bad


def test_criterion_4_projective_46_stem(verifier, report_criterion):
    report, bad = _run(verifier, ["C12", "C13"])
    report_criterion(4, not bad, "dim Ext^{7,53}(P_1^inf) = 2 with both leading terms, "
                                 "transfer(h_1t[9]) = N, h_0-divisibility split" + (f"  {bad}" if bad else ""))
    assert not bad, bad


def test_criterion_5_sphere_stem_81(verifier, report_criterion):
    t0 = time.perf_counter()
    report, bad = _run(verifier, ["C1", "C2", "C3", "C4", "C5", "C6"])
    dt = time.perf_counter() - t0
    ev = {c.id: c.evidence for c in report.claims}
    zero = ev.get("C5", {}).get("<N,h_1,h_2>", {}).get("zero_indeterminacy")
    report_criterion(5, not bad, f"dim Ext^{{15,96}} = 2, gnr = mN != 0, divisibility, m = <r,h_1,h_2>, "
                                 f"gn = <N,h_1,h_2> = <N,h_2,h_1> (zero indeterminacy: {zero}), "
                                 f"Ext^{{9,58}} = 0 ({dt:.0f}s)" + (f"  {bad}" if bad else ""))
    assert not bad, bad


def test_criterion_6_properties(engine, registry, products, report_criterion):
    problems = []
    # Massey coset stability, 8 randomized null-homotopies each
    for names in [("h_2", "h_1", "h_2"), ("h_1", "h_0", "h_1"), ("r", "h_1", "h_2")]:
        a, b, c = (registry.resolve(n) for n in names)
        base = products.massey(a, b, c)
        for seed in range(8):
            other = products.massey(a, b, c, rng=np.random.default_rng(seed))
            if not base.contains(other.value):
                problems.append(f"Massey {names} seed {seed}")
    # commutativity, both lifting orders, all basis pairs with t <= 30
    degrees = [(s, t) for t in range(1, 30) for s in range(1, min(t, 9) + 1)
               if engine.ext_dim(SPHERE, s, t)]
    pairs = 0
    for (s1, t1), (s2, t2) in itertools.combinations_with_replacement(degrees, 2):
        if t1 + t2 > 30 or s1 + s2 > 9:
            continue
        for a in engine.group(SPHERE, s1, t1).basis:
            for b in engine.group(SPHERE, s2, t2).basis:
                pairs += 1
                if products.yoneda(a, b).coords != products.yoneda(b, a).coords:
                    problems.append(f"commutativity {a.describe()} {b.describe()}")
    # LES exactness for the three splits
    splits = [(cx.sphere(7), cx.builtin("C-eta-7"), cx.sphere(9)),
              (cx.projective(7, 8), cx.builtin("P7-9"), cx.sphere(9)),
              (cx.projective(1, 6), cx.builtin("P1-9"), cx.builtin("P7-9"))]
    nodes = 0
    for sub, total, quo in splits:
        try:
            rep = engine.les(sub, total, quo, range(total.bottom, 41), 8)
            nodes += len(rep.nodes)
        except ArithmeticError as exc:
            problems.append(str(exc))
    # dims independent of basis order
    rng = random.Random(5)
    for _ in range(60):
        spec = rng.choice(SPECS)
        s = rng.randint(0, 5)
        t = spec.bottom + s + rng.randint(0, 12)
        if permuted_dims(spec, s, t, rng.randint(0, 999)) != engine.ext_dim(spec, s, t):
            problems.append(f"permutation {spec.label} ({s},{t})")
    ok = not problems
    report_criterion(6, ok, f"Massey stability x8 seeds, commutativity on {pairs} pairs (t <= 30), "
                            f"LES exact at {nodes} nodes, permuted-basis dims"
                     + (f"  {problems[:5]}" if problems else ""))
    assert ok, problems


def test_criterion_7_verifier_gate(cache_dir, report_criterion):
    result = CliRunner().invoke(main, ["verify", "--strict", "--smax", "16", "--tmax", "97",
                                       "--cache", cache_dir])
    status = {}
    for line in result.stdout.splitlines():
        parts = line.split()
        if len(parts) >= 2 and parts[0][:1] in "CA" and parts[0][1:].isdigit():
            status[parts[0]] = parts[1]
    wanted = {f"C{i}": {PASS} for i in range(1, 18)}
    wanted.update({"A1": {AXIOM, OUT_OF_SCOPE}, "A2": {AXIOM, OUT_OF_SCOPE}, "A3": {AXIOM, OUT_OF_SCOPE}})
    bad = [k for k, allowed in wanted.items() if status.get(k) not in allowed]
    ok = result.exit_code == 0 and not bad
    report_criterion(7, ok, f"verify --strict: C1-C17 PASS, A1-A3 axioms/out of scope, exit {result.exit_code}"
                     + (f"  {bad}" if bad else ""))
    assert ok, result.output
