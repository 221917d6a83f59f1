import numpy as np
import pytest
from scipy.interpolate import BSpline

from dbmfoil import geometry, morph
from dbmfoil.errors import GenerationFailure
from dbmfoil.evo.ga import GaConfig
from dbmfoil.geometry import CollocationGrid
from dbmfoil.param import generator, hicks_henne, naca, nurbs, parsec
from dbmfoil.param.generator import KULFAN_MAE, PENALTY_MAE, make_generator, reconstruct


def _cambered_parsec():
    return parsec.ParsecParams(0.012, 0.006, 0.35, 0.075, -0.6, 0.3, -0.04, 0.4, 0.002, 0.004, -4.0, 12.0)


# --------------------------------------------------------------------------
# PARSEC
# --------------------------------------------------------------------------


def test_parsec_crest_and_te_conditions():
    p = _cambered_parsec()
    up, lo = parsec.surface_coefficients(p)
    assert parsec.evaluate(up, p.x_up) == pytest.approx(p.y_up, abs=1e-8)
    assert parsec.derivative(up, p.x_up) == pytest.approx(0.0, abs=1e-8)
    assert parsec.derivative(up, p.x_up, 2) == pytest.approx(p.y_xx_up, abs=1e-8)
    assert parsec.evaluate(lo, p.x_lo) == pytest.approx(p.y_lo, abs=1e-8)
    assert parsec.derivative(lo, p.x_lo) == pytest.approx(0.0, abs=1e-8)
    shape = parsec.parsec_generate(p, CollocationGrid(400))
    assert shape.y[0] - shape.y[-1] == pytest.approx(p.t_te, abs=1e-8)
    assert 0.5 * (shape.y[0] + shape.y[-1]) == pytest.approx(p.y_te, abs=1e-8)


def test_parsec_le_radius_by_finite_difference():
    p = _cambered_parsec()
    g = CollocationGrid(4000)
    s = parsec.parsec_generate(p, g)
    k = g.le_index - 1  # first upper point off the nose
    x, y = g.x[k], s.y[k]
    # near the nose y^2 = 2 r x, so the osculating circle has r = y^2 / (2x)
    assert y * y / (2 * x) == pytest.approx(p.r_le_up, rel=0.02)
    x, y = g.x[g.le_index + 1], s.y[g.le_index + 1]
    assert y * y / (2 * x) == pytest.approx(p.r_le_lo, rel=0.02)


def test_parsec_symmetric_set_is_symmetric():
    s = parsec.parsec_generate(parsec.naca_seed(), CollocationGrid(400))
    assert np.allclose(s.y, -s.y[::-1], atol=1e-12)


def test_parsec_seed_is_close_to_naca0012():
    g = CollocationGrid(400)
    assert geometry.mae(parsec.parsec_generate(parsec.naca_seed(), g), naca.naca("0012", g)) < 2e-3


def test_parsec_failures():
    v = _cambered_parsec().to_vector()
    v[0] = -0.01
    with pytest.raises(GenerationFailure):
        parsec.parsec_generate(parsec.ParsecParams.from_vector(v), CollocationGrid(400))
    v = _cambered_parsec().to_vector()
    v[2] = 0.0
    with pytest.raises(GenerationFailure):
        parsec.surface_coefficients(parsec.ParsecParams.from_vector(v))


# --------------------------------------------------------------------------
# NURBS
# --------------------------------------------------------------------------


def test_nurbs_equal_weights_match_bspline():
    net, _ = nurbs.naca_seed().control_net("upper")
    u = np.linspace(0, 1, 101)
    for c in (1.0, 2.7):
        got = nurbs.rational_curve(u, net, np.full(6, c))
        ref = BSpline(nurbs.KNOTS, net, nurbs.DEGREE)(u)
        assert np.allclose(got, ref, atol=1e-13)


def test_nurbs_endpoints_exact():
    p = nurbs.NurbsParams.from_vector(nurbs.naca_seed().to_vector() + np.r_[np.zeros(24), 0.01, -0.02])
    for surf, y_te in (("upper", 0.01), ("lower", -0.02)):
        net, w = p.control_net(surf)
        ends = nurbs.rational_curve(np.array([0.0, 1.0]), net, w)
        assert ends[0].tolist() == [0.0, 0.0]
        assert ends[1].tolist() == [1.0, y_te]
    s = nurbs.nurbs_generate(p, CollocationGrid(400))
    assert s.y[0] == 0.01 and s.y[-1] == -0.02 and s.y[200] == 0.0


def test_nurbs_symmetry_and_seed_quality():
    g = CollocationGrid(400)
    s = nurbs.nurbs_generate(nurbs.naca_seed(), g)
    assert np.array_equal(s.y, -s.y[::-1])
    assert geometry.mae(s, naca.naca("0012", g)) < 1e-5


def test_nurbs_fold_and_weight_failures():
    v = nurbs.naca_seed().to_vector()
    v[2], v[4] = 0.6, 0.1  # second control point far behind the third
    with pytest.raises(GenerationFailure):
        nurbs.nurbs_generate(nurbs.NurbsParams.from_vector(v), CollocationGrid(400))
    v = nurbs.naca_seed().to_vector()
    v[8] = -1.0
    with pytest.raises(GenerationFailure):
        nurbs.nurbs_generate(nurbs.NurbsParams.from_vector(v), CollocationGrid(400))


# --------------------------------------------------------------------------
# Hicks-Henne
# --------------------------------------------------------------------------


def test_hicks_henne_zero_magnitudes_is_naca0012():
    g = CollocationGrid(400)
    assert np.array_equal(hicks_henne.hicks_henne_generate(hicks_henne.naca_seed(), g).y, naca.naca("0012", g).y)


def test_bump_peak_and_ends():
    x = np.linspace(0, 1, 100001)
    b = 0.01 * hicks_henne.bump(x, 0.5)
    assert x[np.argmax(b)] == pytest.approx(0.5, abs=1e-5)
    assert b.max() == pytest.approx(0.01, abs=1e-12)
    assert b[0] == 0.0 and b[-1] == 0.0
    for h in hicks_henne.PEAKS:
        for w in (0.1, 0.5, 0.9):
            bb = hicks_henne.bump(x, h, w)
            assert x[np.argmax(bb)] == pytest.approx(h, abs=1e-4)


def test_single_bump_on_surface():
    g = CollocationGrid(400)
    p = hicks_henne.naca_seed()
    mags = np.zeros(6)
    mags[2] = 0.01
    q = hicks_henne.HicksHenneParams(p.widths_up, mags, p.widths_lo, p.mags_lo)
    d = hicks_henne.hicks_henne_generate(q, g).upper - naca.naca("0012", g).upper
    assert d.max() == pytest.approx(0.01, abs=1e-4)
    assert g.surface_x[np.argmax(d)] == pytest.approx(hicks_henne.PEAKS[2], abs=0.01)


# --------------------------------------------------------------------------
# generators and reconstruction
# --------------------------------------------------------------------------


@pytest.mark.parametrize("kind", generator.KINDS)
def test_generator_seed_dims_and_determinism(kind, grid400, baselines400):
    gen = make_generator(kind, grid400, baselines400)
    assert gen.dim == generator.DIMS[kind]
    v = gen.seed()
    assert np.all(v >= gen.bounds[:, 0]) and np.all(v <= gen.bounds[:, 1])
    a, b = gen.generate(v), gen.generate(v)
    assert len(a.y) == grid400.n_points and np.all(np.isfinite(a.y))
    assert np.array_equal(a.y, b.y)
    assert np.array_equal(gen.generate_batch(v[None, :])[0], a.y)


def test_generate_batch_marks_failures(grid400):
    gen = make_generator("parsec", grid400)
    bad = _cambered_parsec().to_vector()
    bad[0] = -1.0
    Y = gen.generate_batch(np.vstack([gen.seed(), bad]))
    assert np.all(np.isfinite(Y[0])) and np.all(np.isnan(Y[1]))
    f = generator.mae_objective(gen, naca.naca("0012", grid400))
    assert f(np.vstack([gen.seed(), bad]))[1] == PENALTY_MAE


def test_reconstruct_baseline_with_dbm(grid400, baselines400):
    gen = make_generator("dbm", grid400, baselines400)
    idx = int(np.argmax(gen.seed()))
    assert "0012" in baselines400.names[idx]
    res = reconstruct(baselines400.shapes[idx], gen, GaConfig(population=20, max_generations=3, seed=0,
                                                              early_stop=0.0))
    assert res.mae <= 1e-6
    for k in (0, 7, 24):
        assert geometry.mae(gen.generate(morph.unit_weights(25, k)), baselines400.shapes[k]) == 0.0


def test_reconstruct_hicks_henne_naca0012_at_floor(grid400):
    gen = make_generator("hicks_henne", grid400)
    res = reconstruct(naca.naca("0012", grid400), gen, GaConfig(population=20, max_generations=50, seed=0))
    assert res.mae <= KULFAN_MAE and res.stopped_early and res.generations == 0


def test_reconstruct_parsec_naca2412():
    g = CollocationGrid(400)
    res = reconstruct(naca.naca("2412", g), make_generator("parsec", g),
                      GaConfig(population=40, max_generations=100, seed=0))
    assert res.mae <= 0.5e-2
    assert all(b <= a for a, b in zip(res.trace, res.trace[1:]))


def test_reconstruct_rejects_grid_mismatch(grid400):
    with pytest.raises(ValueError):
        reconstruct(naca.naca("0012", CollocationGrid(200)), make_generator("parsec", grid400), GaConfig())


def test_reports(grid400):
    r = generator.Reconstruction("a", "parsec", np.zeros(12), 0.004, [0.01, 0.004], 1)
    assert generator.trace_csv([r]).splitlines() == ["airfoil,method,generation,best_mae", "a,parsec,0,0.01",
                                                     "a,parsec,1,0.004"]
    import json
    s = json.loads(generator.summary_json([r]))
    assert s["methods"]["parsec"]["percent_within"][7] == 100.0  # 4e-3
    assert s["methods"]["parsec"]["percent_within"][6] == 0.0    # 3.5e-3
