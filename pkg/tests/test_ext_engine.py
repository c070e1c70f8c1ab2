import json
import shutil

import numpy as np
import pytest

from e2page import complexes as cx
from e2page.ext_engine import (EngineConfig, ExtEngine, LambdaExt, ah_lift, cache_load, gf2_rank,
                               lambda_les, lambda_map, lambda_transfer, make_class)

SPHERE = cx.sphere(0)
BUILTIN = {n: cx.builtin(n) for n in cx.BUILTINS}

# Minimal-resolution dims of Ext^{s,t}(S^0), t <= 14, computed independently
# from the cobar complex (see test_cobar).
SPHERE_T14 = {
    (0, 0): 1, (1, 1): 1, (1, 2): 1, (1, 4): 1, (1, 8): 1, (2, 2): 1, (2, 4): 1, (2, 5): 1,
    (2, 8): 1, (2, 9): 1, (2, 10): 1, (3, 3): 1, (3, 6): 1, (3, 10): 1, (3, 11): 1,
    (3, 12): 1, (4, 4): 1, (4, 11): 1, (4, 13): 1, (5, 5): 1, (5, 14): 1, (6, 6): 1,
    (7, 7): 1, (8, 8): 1, (9, 9): 1,
}


def test_h0_tower(engine):
    for s in range(0, 13):
        assert engine.ext_dim(SPHERE, s, s) == 1


def test_ext1_is_hopf(engine):
    hit = [t for t in range(2, 40) if engine.ext_dim(SPHERE, 1, t)]
    assert hit == [2, 4, 8, 16, 32]
    assert engine.ext_dim(SPHERE, 1, 1) == 1  # h_0


def test_sphere_dims_low(engine):
    got = {(s, t): engine.ext_dim(SPHERE, s, t) for t in range(15) for s in range(min(t, 9) + 1)}
    got = {k: v for k, v in got.items() if v}
    assert got == SPHERE_T14


@pytest.mark.parametrize("name", list(BUILTIN))
def test_lambda_and_resolution_agree(engine, name):
    spec = BUILTIN[name]
    lx = LambdaExt(spec)
    t_hi = 16 if spec.kind != cx.SPHERE else 18
    for t in range(spec.bottom, t_hi + 1):
        for s in range(0, 5):
            assert lx.dim(s, t) == engine.ext_dim(spec, s, t), (name, s, t)


def test_shifted_sphere(engine):
    for s, t in [(1, 9), (2, 12), (3, 17)]:
        assert engine.ext_dim(cx.sphere(7), s, t + 7) == engine.ext_dim(SPHERE, s, t)


def test_transfer_matches_lambda(engine):
    lp, ls = LambdaExt(cx.projective(1, None)), LambdaExt(SPHERE)
    for t in range(1, 14):
        for s in range(0, 4):
            m_res = engine.transfer_matrix(s, t)
            m_lam = lambda_transfer(lp, ls, s, t)
            assert gf2_rank(m_res) == gf2_rank(m_lam), (s, t)


def test_transfer_of_bottom_cell(engine):
    # the bottom cell of P_1^inf transfers to h_1
    x = make_class(cx.projective(1, None), 0, 1, [1])
    assert engine.transfer(x).coords == (1,)


def test_transfer_commutes_with_inclusion(engine):
    # transfer on P_1^9 equals transfer on P_1^inf after the inclusion, as matrices
    p9, pinf, sph = LambdaExt(cx.projective(1, 9)), LambdaExt(cx.projective(1, None)), LambdaExt(SPHERE)
    for t in range(1, 13):
        for s in range(0, 4):
            direct = lambda_transfer(p9, sph, s, t)
            via = lambda_transfer(pinf, sph, s, t) @ lambda_map(p9, pinf, s, t) % 2
            assert np.array_equal(direct, via), (s, t)
    for s, t in [(1, 5), (2, 10), (3, 14)]:
        inc = engine.map_matrix(cx.projective(1, 9), cx.projective(1, None), s, t)
        composed = engine.transfer_matrix(s, t) @ inc % 2
        assert gf2_rank(composed) == gf2_rank(lambda_transfer(p9, sph, s, t))


SPLITS = [
    (cx.sphere(7), BUILTIN["C-eta-7"], cx.sphere(9)),
    (cx.projective(7, 8), BUILTIN["P7-9"], cx.sphere(9)),
    (cx.projective(1, 6), BUILTIN["P1-9"], BUILTIN["P7-9"]),
]


@pytest.mark.parametrize("split", SPLITS, ids=lambda sp: f"{sp[0].label}>{sp[1].label}>{sp[2].label}")
def test_les_exact_resolution(engine, split):
    sub, total, quo = split
    report = engine.les(sub, total, quo, range(total.bottom, 32), 6)
    assert report.exact
    assert len(report.nodes) > 0


@pytest.mark.parametrize("split", SPLITS, ids=lambda sp: f"{sp[0].label}>{sp[1].label}>{sp[2].label}")
def test_les_exact_lambda(split):
    sub, total, quo = (LambdaExt(x) for x in split)
    assert lambda_les(sub, total, quo, range(split[1].bottom, split[1].bottom + 11), 4).exact


def test_bad_cofibration_rejected(engine):
    with pytest.raises(cx.ComplexSpecError):
        engine.connecting_matrix(cx.sphere(9), BUILTIN["C-eta-7"], cx.sphere(7), 0, 9)


def test_ah_filtration_and_lift(engine):
    c = BUILTIN["C-eta-7"]
    ah = engine.ah_data(c, 1, 11)  # h_2[7]; h_1[9] is killed by the attaching map
    assert ah.filtration == [7]
    lift = ah_lift(engine, c, 9, 1, 10, [1])  # h_0[9]
    assert lift.present
    lift = ah_lift(engine, c, 9, 1, 11, [1])  # h_1[9] hits 0: the attaching map is h_1
    assert not lift.present


def test_cache_roundtrip(tmp_path):
    a = ExtEngine(EngineConfig(s_max=4, t_max=18, cache_dir=str(tmp_path)))
    dims = a.chart(SPHERE, 4, 18)
    dirs = list(tmp_path.iterdir())
    assert len(dirs) == 1
    b = ExtEngine(EngineConfig(s_max=4, t_max=18, cache_dir=str(tmp_path)))
    res = b.resolution(SPHERE, 4, 18)
    assert b.chart(SPHERE, 4, 18) == dims
    assert res.base.t_max >= 18 if hasattr(res, "base") else res.t_max >= 18


def test_cache_partial_reuse(tmp_path):
    ExtEngine(EngineConfig(s_max=4, t_max=14, cache_dir=str(tmp_path))).chart(SPHERE, 4, 14)
    meta = next(tmp_path.iterdir()) / "meta.json"
    assert json.loads(meta.read_text())["t_max"] >= 14
    warm = ExtEngine(EngineConfig(s_max=4, t_max=22, cache_dir=str(tmp_path)))
    cold = ExtEngine(EngineConfig(s_max=4, t_max=22))
    assert warm.chart(SPHERE, 4, 22) == cold.chart(SPHERE, 4, 22)
    assert json.loads(meta.read_text())["t_max"] >= 22


def test_cache_corruption_is_ignored(tmp_path):
    ExtEngine(EngineConfig(s_max=3, t_max=12, cache_dir=str(tmp_path))).chart(SPHERE, 3, 12)
    d = next(tmp_path.iterdir())
    blob = bytearray((d / "data.npz").read_bytes())
    blob[len(blob) // 2] ^= 0xFF
    (d / "data.npz").write_bytes(bytes(blob))
    with pytest.raises(ValueError, match="checksum"):
        cache_load(d, SPHERE.module())
    fresh = ExtEngine(EngineConfig(s_max=3, t_max=12, cache_dir=str(tmp_path)))
    assert fresh.ext_dim(SPHERE, 2, 4) == 1


def test_cache_version_mismatch(tmp_path):
    ExtEngine(EngineConfig(s_max=2, t_max=8, cache_dir=str(tmp_path))).chart(SPHERE, 2, 8)
    d = next(tmp_path.iterdir())
    meta = json.loads((d / "meta.json").read_text())
    meta["version"] = 999
    (d / "meta.json").write_text(json.dumps(meta))
    with pytest.raises(ValueError, match="version"):
        cache_load(d, SPHERE.module())
    shutil.rmtree(d)


def test_cache_module_mismatch(tmp_path):
    ExtEngine(EngineConfig(s_max=2, t_max=8, cache_dir=str(tmp_path))).chart(SPHERE, 2, 8)
    d = next(tmp_path.iterdir())
    with pytest.raises(ValueError, match="cache holds"):
        cache_load(d, cx.projective(1, None).module())


def test_cache_shared_by_differently_named_equal_complexes(tmp_path):
    named = cx.builtin("C-eta-7")
    plain = cx.twisted([7, 9], {(9, 7): "1"})
    ExtEngine(EngineConfig(s_max=2, t_max=16, cache_dir=str(tmp_path))).chart(named, 2, 16)
    d = next(tmp_path.iterdir())
    res = cache_load(d, plain.module())
    assert res.t_max >= 16
    with pytest.raises(ValueError, match="cache holds"):
        cache_load(d, cx.twisted([7, 9], {}).module())


def test_growing_s_rebuilds(small_engine):
    assert small_engine.ext_dim(SPHERE, 3, 6) == 1
    assert small_engine.ext_dim(SPHERE, 7, 7) == 1  # beyond the initial s_max
