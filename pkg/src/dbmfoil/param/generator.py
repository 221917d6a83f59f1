"""One interface over every parameterization, and the reconstruction benchmark."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import geometry, morph
from ..errors import DbmError, NonRepairableShapeError
from ..evo.ga import GaConfig, ga_minimize
from ..geometry import CollocatedAirfoil, CollocationGrid
from . import hicks_henne, nurbs, parsec

KINDS = ("parsec", "nurbs", "hicks_henne", "dbm", "dbm_i")
DIMS = {"parsec": 12, "nurbs": 26, "hicks_henne": 24, "dbm": 25, "dbm_i": 25}

# lower end of the usual wind-tunnel model tolerance, as an MAE
KULFAN_MAE = 1.44e-3
# score of a candidate the generator cannot build; worse than any real pair of airfoils
PENALTY_MAE = 10.0


def _crossing_rows(Y: np.ndarray, F: int) -> np.ndarray:
    half = F // 2
    gap = Y[:, : half + 1] - Y[:, F - np.arange(half + 1)]
    return np.any(gap[:, :-1] * gap[:, 1:] < 0, axis=1)


@dataclass
class ShapeGenerator:
    """Maps a design vector to a collocated airfoil.

    ``generate`` raises :class:`GenerationFailure` (or another library error)
    for vectors that cannot be turned into a valid shape; ``generate_batch``
    returns NaN rows for those instead.
    """

    kind: str
    grid: CollocationGrid
    bounds: np.ndarray
    baselines: morph.BaselineSet | None = None
    repair: bool = True
    q: float = hicks_henne.DEFAULT_Q

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        self.bounds = np.asarray(self.bounds, dtype=float)
        if self.bounds.shape != (self.dim, 2):
            raise ValueError(f"{self.kind} bounds must have shape ({self.dim}, 2), got {self.bounds.shape}")
        if self.kind in ("dbm", "dbm_i"):
            if self.baselines is None:
                raise ValueError("morphing generators need a baseline set")
            if self.baselines.grid != self.grid:
                raise ValueError("baselines live on a different grid")

    @property
    def dim(self) -> int:
        if self.kind in ("dbm", "dbm_i") and self.baselines is not None:
            return len(self.baselines)
        return DIMS[self.kind]

    def generate(self, v) -> CollocatedAirfoil:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} values, got shape {v.shape}")
        if self.kind == "parsec":
            return parsec.parsec_generate(parsec.ParsecParams.from_vector(v), self.grid)
        if self.kind == "nurbs":
            return nurbs.nurbs_generate(nurbs.NurbsParams.from_vector(v), self.grid)
        if self.kind == "hicks_henne":
            return hicks_henne.hicks_henne_generate(hicks_henne.HicksHenneParams.from_vector(v), self.grid, self.q)
        return morph.morph(self.baselines, v, repair=self.repair, name=self.kind)

    def generate_batch(self, V) -> np.ndarray:
        V = np.atleast_2d(np.asarray(V, dtype=float))
        if self.kind in ("dbm", "dbm_i"):
            Y = morph.morph_vectors(self.baselines, V)
            if self.repair:
                ok = np.all(np.isfinite(Y), axis=1)
                bad = np.nonzero(ok & _crossing_rows(np.nan_to_num(Y), self.grid.F))[0]
                for i in bad:
                    try:
                        Y[i] = geometry.remove_intersections(CollocatedAirfoil(self.grid, Y[i])).y
                    except NonRepairableShapeError:
                        Y[i] = np.nan
            return Y
        out = np.full((len(V), self.grid.n_points), np.nan)
        for i, v in enumerate(V):
            try:
                out[i] = self.generate(v).y
            except (DbmError, FloatingPointError, np.linalg.LinAlgError):
                pass
        return out

    def seed(self) -> np.ndarray:
        """Design vector of NACA 0012 (or the closest baseline for morphing)."""
        if self.kind == "parsec":
            return parsec.naca_seed().to_vector()
        if self.kind == "nurbs":
            return nurbs.naca_seed().to_vector()
        if self.kind == "hicks_henne":
            return hicks_henne.naca_seed().to_vector()
        names = [n.replace(" ", "").upper() for n in self.baselines.names]
        idx = next((i for i, n in enumerate(names) if "0012" in n), 0)
        return morph.unit_weights(len(self.baselines), idx)


def make_generator(kind: str, grid: CollocationGrid, baselines: morph.BaselineSet | None = None,
                   bounds=None, repair: bool = True, q: float = hicks_henne.DEFAULT_Q,
                   magnitude: float = 0.1) -> ShapeGenerator:
    """Generator with the default design box for ``kind`` unless ``bounds`` is given."""
    if bounds is None:
        if kind == "parsec":
            bounds = parsec.DEFAULT_BOUNDS
        elif kind == "nurbs":
            bounds = nurbs.default_bounds()
        elif kind == "hicks_henne":
            bounds = hicks_henne.default_bounds(magnitude)
        elif kind in ("dbm", "dbm_i"):
            if baselines is None:
                baselines = morph.builtin_baselines(grid)
            bounds = morph.bounds(len(baselines), kind)
        else:
            raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    return ShapeGenerator(kind, grid, bounds, baselines, repair, q)


# --------------------------------------------------------------------------
# reconstruction
# --------------------------------------------------------------------------


@dataclass
class Reconstruction:
    airfoil: str
    method: str
    params: np.ndarray
    mae: float
    trace: list[float] = field(default_factory=list)
    generations: int = 0
    stopped_early: bool = False


def mae_objective(gen: ShapeGenerator, target: CollocatedAirfoil, penalty: float = PENALTY_MAE) -> Callable:
    """Batch objective: MAE of each design vector's shape to ``target``."""
    t = target.y
    F = gen.grid.F

    def f(V):
        Y = gen.generate_batch(V)
        m = geometry.mae_many(Y, t, F)
        return np.where(np.isfinite(m), m, penalty)

    return f


def reconstruct(target: CollocatedAirfoil, gen: ShapeGenerator, cfg: GaConfig,
                penalty: float = PENALTY_MAE) -> Reconstruction:
    """Minimize the MAE between generated shapes and ``target``.

    The initial population holds the NACA 0012 design vector plus random
    members; the run stops at ``cfg.early_stop`` (Kulfan floor unless the
    config sets another value) or the generation cap.
    """
    if target.grid != gen.grid:
        raise ValueError(f"target on F={target.grid.F}, generator on F={gen.grid.F}")
    if cfg.early_stop is None:
        cfg = GaConfig(**{**cfg.to_dict(), "early_stop": KULFAN_MAE})
    # batch evaluation is vectorized; worker processes are not used here
    res = ga_minimize(mae_objective(gen, target, penalty), gen.bounds, cfg, init=gen.seed()[None, :], batch=True)
    return Reconstruction(target.name, gen.kind, res.best_genome, res.best_value, res.trace,
                          res.generations, res.stopped_early)


def within(results: list[Reconstruction], tol: float) -> float:
    """Fraction of reconstructions with MAE at or below ``tol``."""
    if not results:
        return 0.0
    return float(np.mean([r.mae <= tol for r in results]))


def trace_csv(results: list[Reconstruction]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["airfoil", "method", "generation", "best_mae"])
    for r in results:
        for g, v in enumerate(r.trace):
            w.writerow([r.airfoil, r.method, g, repr(float(v))])
    return buf.getvalue()


def summary_json(results: list[Reconstruction], tolerances=None) -> str:
    """Percent of targets within each MAE tolerance, per method."""
    if tolerances is None:
        tolerances = [float(t) for t in np.round(np.arange(1, 21) * 0.5e-3, 6)]
    methods = sorted({r.method for r in results}, key=lambda m: KINDS.index(m) if m in KINDS else 99)
    out = {"tolerances": tolerances, "methods": {}}
    for m in methods:
        rs = [r for r in results if r.method == m]
        out["methods"][m] = {
            "n": len(rs),
            "percent_within": [100.0 * within(rs, t) for t in tolerances],
            "mae": {r.airfoil: float(r.mae) for r in rs},
        }
    return json.dumps(out, indent=1)
