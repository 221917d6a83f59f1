"""``dbmfoil`` command-line interface."""

from __future__ import annotations

import csv
import io
import json
import logging
import shutil
import sys
from pathlib import Path

import click
import numpy as np
import yaml

from . import analysis, geometry, morph
from .config import RunConfig
from .errors import DbmError

log = logging.getLogger("dbmfoil")


# --------------------------------------------------------------------------
# shared plumbing
# --------------------------------------------------------------------------


def _parse_sets(values) -> dict:
    out = {}
    for item in values:
        if "=" not in item:
            raise click.BadParameter(f"expected KEY=VALUE, got {item!r}", param_hint="--set")
        k, v = item.split("=", 1)
        out[k.strip()] = yaml.safe_load(v)
    return out


def config_options(f):
    f = click.option("--set", "sets", multiple=True, metavar="KEY=VALUE",
                     help="Override a config value, e.g. --set optimize.population=60.")(f)
    f = click.option("--out", "out", type=click.Path(file_okay=False), default=None, help="Run directory.")(f)
    f = click.option("--seed", type=int, default=None, help="Random seed (required unless set in the config).")(f)
    f = click.option("--preset", type=click.Choice(["desk", "paper-recon"]), default=None)(f)
    f = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
                     help="YAML or JSON run config.")(f)
    return f


def _load_config(config_path, preset, seed, out, sets) -> RunConfig:
    overrides = _parse_sets(sets)
    overrides.update({"seed": seed, "output_dir": out})
    try:
        return RunConfig.build(preset, config_path, overrides)
    except DbmError as exc:
        raise click.UsageError(str(exc)) from exc


def _run_dir(cfg: RunConfig) -> Path:
    d = Path(cfg["output_dir"])
    d.mkdir(parents=True, exist_ok=True)
    (d / "config.yaml").write_text(cfg.dump())
    return d


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


class _Group(click.Group):
    """Turns library errors that escape a command into a clean one-line failure."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except DbmError as exc:
            raise click.ClickException(str(exc)) from exc


@click.group(cls=_Group)
@click.option("-v", "--verbose", count=True, help="Increase log verbosity.")
def main(verbose):
    """Design-by-Morphing airfoil toolkit."""
    logging.basicConfig(level=logging.WARNING - 10 * min(verbose, 2), format="%(levelname)s %(message)s")


# --------------------------------------------------------------------------
# ingest
# --------------------------------------------------------------------------


@main.command()
@click.argument("paths", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(file_okay=False), required=True)
@click.option("--F", "F", type=int, default=400, show_default=True, help="Collocation grid size.")
@click.option("--format", "fmt", type=click.Choice(["auto", "selig", "lednicer"]), default="auto")
def ingest(paths, out, F, fmt):
    """Normalize and collocate coordinate files; write a manifest."""
    grid = geometry.CollocationGrid(F)
    out = Path(out)
    (out / "raw").mkdir(parents=True, exist_ok=True)
    (out / "shapes").mkdir(parents=True, exist_ok=True)
    manifest, status, warnings = [], [], 0
    for p in paths:
        p = Path(p)
        try:
            raw = geometry.read_airfoil(p, format=fmt, strict=False)
            shape = geometry.prepare(raw, grid)
            crossings = geometry.find_intersections(shape)
            if crossings:
                raise DbmError(f"{len(crossings)} self-intersection(s) after collocation")
        except (DbmError, ValueError, OSError) as exc:
            warnings += 1
            status.append((p.name, "rejected", str(exc)))
            continue
        shutil.copyfile(p, out / "raw" / p.name)
        _write(out / "shapes" / f"{p.stem}.csv", geometry.to_csv(shape))
        manifest.append({"name": shape.name or p.stem, "path": f"raw/{p.name}"})
        status.append((p.name, "ok", ""))
    _write(out / "manifest.json", json.dumps(manifest, indent=1))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["file", "status", "message"])
    w.writerows(status)
    _write(out / "status.csv", buf.getvalue())
    click.echo(f"ingested {len(manifest)} of {len(paths)} file(s), {warnings} warning(s)")


# --------------------------------------------------------------------------
# morph
# --------------------------------------------------------------------------


@main.command("morph")
@config_options
@click.option("--weights", "weights_path", type=click.Path(exists=True, dir_okay=False), required=True)
def morph_cmd(config_path, preset, seed, out, sets, weights_path):
    """Morph the baselines with every row of a weights file (seed defaults to 0)."""
    if seed is None:
        seed = 0  # morphing is deterministic; the seed is only recorded
    cfg = _load_config(config_path, preset, seed, out, sets)
    run = _run_dir(cfg)
    b = cfg.baselines()
    rep = cfg["repair"]
    W = morph.read_weights(weights_path)
    rows = []
    for i, w in enumerate(W):
        bad = morph.validate(w, cfg["mode"]) if len(w) == len(b) else [
            morph.Violation("shape", f"expected {len(b)} weights, got {len(w)}")]
        if bad:
            rows.append((i, "rejected", 0, "; ".join(v.message for v in bad)))
            continue
        raw_y = morph.morph_vectors(b, w)[0]
        try:
            shape = morph.morph(b, w, repair=rep["enabled"], neighborhood=rep["neighborhood"],
                                smooth_window=rep["smooth_window"], max_passes=rep["max_passes"],
                                name=f"morph_{i:04d}")
        except DbmError as exc:
            rows.append((i, "failed", 0, str(exc)))
            continue
        repaired = int(not np.array_equal(raw_y, shape.y))
        _write(run / "shapes" / f"morph_{i:04d}.csv", geometry.to_csv(shape))
        rows.append((i, "ok", repaired, ""))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "status", "repaired", "message"])
    w.writerows(rows)
    _write(run / "morph_report.csv", buf.getvalue())
    n_ok = sum(r[1] == "ok" for r in rows)
    click.echo(f"{n_ok} shape(s) written, {len(rows) - n_ok} row(s) flagged, "
               f"{sum(r[2] for r in rows)} repaired")


# --------------------------------------------------------------------------
# reconstruct
# --------------------------------------------------------------------------


@main.command()
@config_options
@click.option("--method", required=True,
              type=click.Choice(["parsec", "nurbs", "hicks_henne", "dbm", "dbm_i"]), multiple=True)
@click.option("--targets", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Manifest of target airfoils (default: bundled 20-airfoil sample).")
def reconstruct(config_path, preset, seed, out, sets, method, targets):
    """Reconstruct target airfoils with one or more parameterizations."""
    from .param.generator import make_generator, reconstruct as run_one, summary_json, trace_csv, within

    cfg = _load_config(config_path, preset, seed, out, sets)
    run = _run_dir(cfg)
    grid = cfg.grid()
    tset = morph.load_shapes(targets, grid) if targets else morph.builtin_sample(grid).shapes
    b = cfg.baselines()
    tol = cfg["reconstruct"]["tolerance"]
    results = []
    for m in method:
        gen = make_generator(m, grid, b, q=cfg["reconstruct"]["hicks_henne_q"], repair=cfg["repair"]["enabled"])
        for i, target in enumerate(tset):
            r = run_one(target, gen, cfg.ga("reconstruct", seed=cfg["seed"] + i))
            results.append(r)
            log.info("%s %s mae=%.5f", m, target.name, r.mae)
        rs = [r for r in results if r.method == m]
        click.echo(f"{m}: {100 * within(rs, tol):.0f}% within MAE {tol:g}")
    _write(run / "reconstruction_trace.csv", trace_csv(results))
    _write(run / "reconstruction_summary.json", summary_json(results))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["airfoil", "method", "best_mae", "generations", "stopped_early"])
    for r in results:
        w.writerow([r.airfoil, r.method, repr(float(r.mae)), r.generations, int(r.stopped_early)])
    _write(run / "reconstruction_results.csv", buf.getvalue())


# --------------------------------------------------------------------------
# optimize
# --------------------------------------------------------------------------


def cmd_optimize(cfg: RunConfig) -> Path:
    """Run the bi-objective optimization and write archive, metrics and shapes."""
    from .evo.nsga2 import archive_csv, archive_json, metrics_csv
    from .optimize import OBJECTIVE_NAMES, AirfoilProblem, run as run_nsga

    evaluator = cfg.evaluator()  # misconfiguration fails here, before generation 0
    run = _run_dir(cfg)
    rep = cfg["repair"]
    problem = AirfoilProblem(cfg.baselines(), evaluator, cfg.flow(), cfg.scan(), cfg["mode"], rep["enabled"],
                             rep["neighborhood"], rep["smooth_window"])
    res = run_nsga(problem, cfg.ga("optimize"), cfg["optimize"].get("seed_generations"))
    _write(run / "archive.csv", archive_csv(res.archive, list(OBJECTIVE_NAMES)))
    _write(run / "archive.json", archive_json(res.archive, list(OBJECTIVE_NAMES)))
    _write(run / "metrics.csv", metrics_csv(res.history))
    for k, m in enumerate(res.archive.members):
        try:
            shape = problem.shape(m.genome, name=f"member_{k:03d}")
        except DbmError as exc:
            log.warning("archive member %d has no shape: %s", k, exc)
            continue
        _write(run / "shapes" / f"member_{k:03d}.csv", geometry.to_csv(shape))
    return run


@main.command()
@config_options
def optimize(config_path, preset, seed, out, sets):
    """NSGA-II over the morphing weights for (CLD_max, delta_alpha)."""
    cfg = _load_config(config_path, preset, seed, out, sets)
    try:
        run = cmd_optimize(cfg)
    except DbmError as exc:
        raise click.ClickException(str(exc)) from exc
    n = sum(1 for _ in open(run / "archive.csv")) - 1
    click.echo(f"archive of {n} member(s) written to {run}")


# --------------------------------------------------------------------------
# benchmark-zdt
# --------------------------------------------------------------------------


@main.command("benchmark-zdt")
@config_options
def benchmark_zdt(config_path, preset, seed, out, sets):
    """Run NSGA-II on the ZDT problems and report front deviation."""
    from .evo.zdt import benchmark

    cfg = _load_config(config_path, preset, seed, out, sets)
    run = _run_dir(cfg)
    z = cfg["zdt"]
    report = {}
    for prob in z["problems"]:
        res, dev = benchmark(prob, cfg.ga("zdt"), z["n_vars"], z.get("seed_generations"))
        F = res.archive.objectives
        report[prob] = {"mean_vertical_deviation": dev, "front_size": len(F)}
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["f1", "f2"])
        for f1, f2 in F[np.argsort(F[:, 0])]:
            w.writerow([repr(float(f1)), repr(float(f2))])
        _write(run / f"{prob}_front.csv", buf.getvalue())
        click.echo(f"{prob}: {len(F)} points, mean vertical deviation {dev:.5f}")
    _write(run / "zdt_report.json", json.dumps(report, indent=1))


# --------------------------------------------------------------------------
# cluster
# --------------------------------------------------------------------------


def read_archive_genomes(path) -> np.ndarray:
    path = Path(path)
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(path.read_text())
            return np.array([m["genome"] for m in data["members"]], dtype=float)
        rows = list(csv.DictReader(io.StringIO(path.read_text())))
        cols = [c for c in (rows[0].keys() if rows else []) if c.startswith("w") and c[1:].isdigit()]
        if not cols:
            raise ValueError("no genome columns (w1, w2, ...)")
        return np.array([[float(r[c]) for c in cols] for r in rows])
    except (KeyError, ValueError, json.JSONDecodeError, TypeError) as exc:
        raise click.ClickException(f"malformed archive {path}: {exc}") from exc


@main.command()
@config_options
@click.option("--archive", "archive_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--k", type=int, default=None, help="Number of clusters (default from config).")
def cluster(config_path, preset, seed, out, sets, archive_path, k):
    """PCA and k-means of an archive's weight vectors."""
    cfg = _load_config(config_path, preset, seed, out, sets)
    run = _run_dir(cfg)
    X = read_archive_genomes(archive_path)
    k = k or cfg["cluster"]["k"]
    try:
        p = analysis.pca(X)
        cl = analysis.kmeans(X, k, cfg["seed"], restarts=cfg["cluster"]["restarts"])
    except DbmError as exc:
        raise click.ClickException(str(exc)) from exc
    cm = analysis.cluster_mean_weights(X, cl)
    _write(run / "pca.json", p.to_json())
    _write(run / "assignments.csv", analysis.assignments_csv(cl))
    _write(run / "scatter.csv", analysis.scatter_csv(p, X, cl))
    _write(run / "cluster_means.csv", analysis.cluster_means_csv(cm))
    b = cfg.baselines()
    if X.shape[1] == len(b):
        shapes = {"total_mean": None}
        for axis in range(min(2, X.shape[1])):
            for s in (-1.0, 1.0):
                shapes[f"pca{axis + 1}{'+' if s > 0 else '-'}"] = (axis, s)
        for name, axis_scale in shapes.items():
            try:
                shp = (morph.morph(b, cm.total, name=name) if axis_scale is None
                       else analysis.pca_axis_shape(b, p, axis_scale[0], axis_scale[1]))
            except DbmError as exc:
                log.warning("%s: %s", name, exc)
                continue
            _write(run / "shapes" / f"{name}.csv", geometry.to_csv(shp))
    ratios = "undefined" if p.degenerate else ", ".join(f"{r:.3f}" for r in p.explained_variance_ratio[:3])
    click.echo(f"{len(X)} points, {k} cluster(s) of sizes {cm.sizes}; leading variance ratios {ratios}")


# --------------------------------------------------------------------------
# evaluate
# --------------------------------------------------------------------------


@main.command()
@config_options
@click.option("--shape", "shape_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Coordinate file (.dat) or collocated CSV.")
@click.option("--naca", default=None, help="NACA 4/5-digit code instead of a file.")
def evaluate(config_path, preset, seed, out, sets, shape_path, naca):
    """Polar and objectives of one shape."""
    from .aero.polar import evaluate_polar, objectives_from_polar
    from .param.naca import naca as make_naca

    if seed is None:
        seed = 0  # evaluation is deterministic; the seed is only recorded
    cfg = _load_config(config_path, preset, seed, out, sets)
    if (shape_path is None) == (naca is None):
        raise click.UsageError("give exactly one of --shape or --naca")
    grid = cfg.grid()
    try:
        evaluator = cfg.evaluator()
        if naca:
            shape = make_naca(naca, grid)
        elif shape_path.lower().endswith(".csv"):
            shape = geometry.collocate(geometry.from_csv(Path(shape_path).read_text()), grid)
        else:
            shape = geometry.prepare(geometry.read_airfoil(shape_path, strict=False), grid)
    except DbmError as exc:
        raise click.ClickException(str(exc)) from exc
    run = _run_dir(cfg)
    try:
        polar = evaluate_polar(shape, cfg.flow(), cfg.scan(), evaluator)
        obj = objectives_from_polar(polar)
        _write(run / "polar.csv", polar.to_csv())
    except DbmError as exc:
        from .aero.polar import ObjectivePair

        obj = ObjectivePair.failure(str(exc))
    rec = {"cld_max": obj.cld_max, "delta_alpha": obj.delta_alpha, "alpha_at_cld_max": obj.alpha_at_cld_max,
           "alpha_s": obj.alpha_s, "failed": obj.failed, "censored": obj.censored, "reason": obj.reason}
    _write(run / "objectives.json", json.dumps(rec, indent=1))
    click.echo(f"CLD_max {obj.cld_max:.2f}, delta_alpha {obj.delta_alpha:.2f} deg"
               + (" (failed)" if obj.failed else ""))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
