"""Acceptance criteria, one test each.

Every test records a single PASS/FAIL/SKIP line; the lines are printed at the
end of the pytest run (see ``conftest.py``) and by ``python tests/test_acceptance.py``.
"""

import json
import os
import shutil
import time

import numpy as np
import pytest
from click.testing import CliRunner

from dbmfoil import analysis, geometry, morph
from dbmfoil.aero import polar as P
from dbmfoil.aero import xfoil
from dbmfoil.aero.polar import FlowCondition, Polar, ScanSchedule
from dbmfoil.cli import main
from dbmfoil.errors import DbmError
from dbmfoil.evo.pareto import dominates, non_dominated_sort
from dbmfoil.geometry import CollocationGrid
from dbmfoil.param import naca

try:
    from conftest import brute_force_crossings
except ImportError:  # run as a script from the repository root
    from tests.conftest import brute_force_crossings

RESULTS: list[str] = []


def record(label: str, ok: bool, detail: str) -> None:
    line = f"{label}: {'PASS' if ok else 'FAIL'} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def cli(args):
    res = CliRunner().invoke(main, [str(a) for a in args], catch_exceptions=False)
    assert res.exit_code == 0, res.output
    return res


# --------------------------------------------------------------------------


def test_ac1_morph_identity():
    b = morph.builtin_baselines(CollocationGrid(4000))
    worst = max(geometry.mae(morph.morph(b, morph.unit_weights(len(b), n)), s) for n, s in enumerate(b.shapes))
    record("AC1 morph identity", len(b) == 25 and worst <= 1e-12, f"{len(b)} baselines, max MAE {worst:.3g}")


def test_ac2_scale_invariance():
    b = morph.builtin_baselines(CollocationGrid(400))
    rng = np.random.default_rng(2)
    worst, exact_pow2, n_pow2 = 0.0, 0, 0
    for k in range(100):
        w = rng.uniform(-1.0, 1.0, 25)
        c = rng.uniform(0.05, 20.0) * rng.choice([-1.0, 1.0])
        ref = morph.morph(b, w).y
        worst = max(worst, float(np.max(np.abs(morph.morph(b, c * w).y - ref))))
        p2 = 2.0 ** int(rng.integers(-8, 9))
        n_pow2 += 1
        exact_pow2 += np.array_equal(morph.morph(b, p2 * w).y, ref)
    ok = worst <= 1e-12 and exact_pow2 == n_pow2
    record("AC2 scale invariance", ok,
           f"100 pairs, max |diff| {worst:.2g} for arbitrary c; {exact_pow2}/{n_pow2} bitwise for c = 2^k")


@pytest.mark.slow
def test_ac3_intersection_repair():
    grid = CollocationGrid(400)
    b = morph.builtin_baselines(grid)
    n, flagged, bad, repaired = 1000, 0, 0, 0
    for s in range(n):
        w = morph.random_weights(10_000 + s, "dbm", 25)
        try:
            raw = morph.morph(b, w, repair=False)
            shape = morph.morph(b, w)
        except DbmError:
            flagged += 1
            continue
        repaired += not np.array_equal(raw.y, shape.y)
        bad += brute_force_crossings(shape.y, grid.x) > 0
    rate = flagged / n
    record("AC3 intersection repair", bad == 0 and rate < 0.05,
           f"{n} vectors, {repaired} repaired, {bad} oracle failures, non-repairable rate {100 * rate:.1f}%")


@pytest.mark.slow
def test_ac4_reconstruction_desk(tmp_path):
    t0 = time.time()
    cli(["reconstruct", "--preset", "desk", "--seed", 0, "--method", "dbm", "--method", "dbm_i",
         "--out", tmp_path])
    summary = json.loads((tmp_path / "reconstruction_summary.json").read_text())
    i = summary["tolerances"].index(0.005)
    dbm = summary["methods"]["dbm"]["percent_within"][i]
    dbm_i = summary["methods"]["dbm_i"]["percent_within"][i]
    n = summary["methods"]["dbm"]["n"]
    record("AC4 reconstruction (desk)", n == 20 and dbm >= 80.0 and dbm > dbm_i,
           f"DbM {dbm:.0f}% vs DbM-I {dbm_i:.0f}% within MAE 0.5e-2 on {n} targets, {time.time() - t0:.0f} s")


@pytest.mark.slow
def test_ac5_zdt(tmp_path):
    t0 = time.time()
    cli(["benchmark-zdt", "--seed", 0, "--out", tmp_path])
    rep = json.loads((tmp_path / "zdt_report.json").read_text())
    tol = {"zdt1": 0.01, "zdt2": 0.01, "zdt4": 0.02, "zdt6": 0.05}
    dev = {k: rep[k]["mean_vertical_deviation"] for k in tol}
    ok = all(dev[k] <= tol[k] for k in tol)
    record("AC5 ZDT validation", ok,
           ", ".join(f"{k} {dev[k]:.4f}<={tol[k]}" for k in tol) + f", {time.time() - t0:.0f} s")


def _brute_fronts(F):
    left = list(range(len(F)))
    fronts = []
    while left:
        front = [i for i in left
                 if not any(np.all(F[j] >= F[i]) and np.any(F[j] > F[i]) for j in left if j != i)]
        fronts.append(sorted(front))
        left = [i for i in left if i not in front]
    return fronts


def test_ac6_pareto_oracle():
    rng = np.random.default_rng(6)
    mismatches = 0
    for _ in range(200):
        n = int(rng.integers(1, 101))
        # coarse integer objectives make ties and duplicates common
        F = rng.integers(0, 12, size=(n, 2)).astype(float) if rng.random() < 0.5 else rng.random((n, 2))
        got = [sorted(f.tolist()) for f in non_dominated_sort(F)]
        mismatches += got != _brute_fronts(F)
    violations = 0
    T = rng.integers(0, 4, size=(100_000, 3, 2)).astype(float)
    for a, b, c in T:
        ab, ba = dominates(a, b), dominates(b, a)
        if dominates(a, a) or (ab and ba):
            violations += 1
        if ab and dominates(b, c) and not dominates(a, c):
            violations += 1
    record("AC6 Pareto machinery", mismatches == 0 and violations == 0,
           f"{mismatches}/200 sort mismatches, {violations} partial-order violations in 1e5 triples")


def test_ac7_objective_extraction():
    checks = []

    def pol(a, cl, cd=None, conv=None):
        return Polar(a, cl, np.full(len(a), 0.01) if cd is None else cd, conv)

    checks.append(P.cld_max(pol([0, 5, 10], [0.1, 0.5, 0.3])) == (50.0, 5.0))
    checks.append(P.cld_max(pol([0, 1, 2], [0.3, 0.3, 0.3]))[1] == 0.0)
    checks.append(P.stall_angle(pol([0, 2, 4, 6], [0.2, 0.5, 0.8, 0.7])) == (4.0, False))
    multi = pol(np.arange(9.0), [0.0, 0.4, 0.8, 0.7, 0.9, 1.2, 1.4, 1.3, 1.1])
    checks.append(P.stall_angle(multi) == (2.0, False))
    plateau = pol(np.arange(6.0), [0.0, 0.3, 0.6, 0.6, 0.6, 0.2])
    checks.append(P.stall_angle(plateau) == (2.0, False))
    checks.append(P.stall_angle(pol(np.arange(5.0), [0.0, 0.2, 0.4, 0.6, 0.8])) == (4.0, True))
    edge_gap = pol(np.arange(5.0), [0.0, 0.2, 0.4, 0.6, 0.1], conv=[1, 1, 1, 1, 0])
    checks.append(P.stall_angle(edge_gap) == (3.0, True))
    a = np.arange(0.0, 16.0)
    cl = np.where(a <= 14, 0.1 * a, 1.3)
    o = P.objectives_from_polar(Polar(a, cl, np.where(a == 6, 0.001, 0.01)))
    checks.append((o.alpha_s, o.alpha_at_cld_max, o.delta_alpha) == (14.0, 6.0, 8.0))
    o = P.objectives_from_polar(Polar(a, cl, np.where(a == 15, 0.0001, 0.01)))
    checks.append(o.delta_alpha == 0.0 and o.alpha_at_cld_max == 15.0)
    f = P.objectives(None, FlowCondition(), ScanSchedule(), lambda *args: None)
    checks.append(f.failed and f.as_tuple() == (0.0, 0.0))
    record("AC7 objective extraction", all(checks), f"{sum(checks)}/{len(checks)} hand-built polars exact")


@pytest.mark.slow
def test_ac8_synthetic_optimization(tmp_path):
    t0 = time.time()
    args = ["optimize", "--preset", "desk", "--seed", 0]
    cli(args + ["--out", tmp_path / "a"])
    cli(args + ["--out", tmp_path / "b"])
    identical = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
                    for f in ("archive.csv", "archive.json", "metrics.csv"))
    arch = json.loads((tmp_path / "a" / "archive.json").read_text())
    F = np.array([[m["objectives"]["cld_max"], m["objectives"]["delta_alpha"]] for m in arch["members"]])
    nondom = not any(dominates(F[i], F[j]) for i in range(len(F)) for j in range(len(F)) if i != j)
    U = np.unique(F, axis=0)
    U = U[np.argsort(U[:, 0])]
    monotone = bool(np.all(np.diff(U[:, 0]) > 0) and np.all(np.diff(U[:, 1]) < 0))
    ok = identical and nondom and monotone and len(U) >= 10
    record("AC8 synthetic optimization", ok,
           f"{len(F)} members, {len(U)} distinct objective pairs, non-dominated={nondom}, "
           f"strictly monotone={monotone}, byte-identical={identical}, {time.time() - t0:.0f} s")


HAVE_XFOIL = bool(os.environ.get(xfoil.ENV_VAR)) or shutil.which("xfoil") is not None


@pytest.mark.xfoil
def test_ac9_xfoil_reference_values():
    if not HAVE_XFOIL:
        line = f"AC9 XFOIL reference values: SKIP (no XFOIL binary; set {xfoil.ENV_VAR})"
        RESULTS.append(line)
        print(line)
        pytest.skip("XFOIL binary not available")
    grid = CollocationGrid(400)
    ev = xfoil.XfoilEvaluator()
    out = []
    ok = True
    for code, cld, da in (("0012", 69.3, 6.75), ("2412", 99.5, 12.0)):
        o = P.objectives(naca.naca(code, grid), FlowCondition(), ScanSchedule(), ev)
        ok &= (not o.failed) and abs(o.cld_max - cld) <= 0.1 * cld and abs(o.delta_alpha - da) <= 1.5
        out.append(f"NACA {code}: CLD_max {o.cld_max:.1f} (ref {cld}), delta_alpha {o.delta_alpha:.2f} (ref {da})")
    record("AC9 XFOIL reference values", ok, "; ".join(out))


def test_ac10_analysis_invariants():
    rng = np.random.default_rng(10)
    W = rng.uniform(-1, 1, size=(80, 25)) @ np.diag(np.linspace(2.0, 0.1, 25))
    r = analysis.pca(W)
    ratio_err = abs(float(r.explained_variance_ratio.sum()) - 1.0)
    ortho_err = float(np.max(np.abs(r.axes @ r.axes.T - np.eye(25))))
    centers = np.zeros((3, 25))
    centers[0, :3], centers[1, 3:6], centers[2, 6:9] = 4.0, 4.0, 4.0
    truth = np.repeat(np.arange(3), 25)
    X = centers[truth] + 0.1 * rng.normal(size=(75, 25))
    c = analysis.kmeans(X, 3, seed=0)
    recovered = all(len(set(c.assignments[truth == j])) == 1 for j in range(3)) and len(set(c.assignments)) == 3
    cm = analysis.cluster_mean_weights(X, c)
    mean_err = float(np.max(np.abs(sum(s * m for s, m in zip(cm.sizes, cm.means)) / sum(cm.sizes) - cm.total)))
    ok = ratio_err <= 1e-10 and ortho_err <= 1e-10 and recovered and mean_err <= 1e-12
    record("AC10 analysis invariants", ok,
           f"ratio sum err {ratio_err:.1g}, orthonormality err {ortho_err:.1g}, clusters recovered={recovered}, "
           f"mean identity err {mean_err:.1g}")


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    for name, fn in list(globals().items()):
        if name.startswith("test_ac"):
            try:
                if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as d:
                        fn(Path(d))
                else:
                    fn()
            except (AssertionError, pytest.skip.Exception):
                pass
    sys.exit(0 if all("FAIL" not in r for r in RESULTS) else 1)
