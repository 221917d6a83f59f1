"""Elitist NSGA-II with a deduplicated rank-0 archive."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ga import GaConfig, as_bounds, evaluate, initial_population
from .operators import binary_tournament, make_offspring
from .pareto import ParetoArchive, crowding_distance, hypervolume_2d, non_dominated_sort, to_minimization


@dataclass
class GenerationMetrics:
    generation: int
    front0_size: int
    best: tuple[float, ...]
    hypervolume: float


@dataclass
class NsgaResult:
    archive: ParetoArchive
    population: np.ndarray
    objectives: np.ndarray
    history: list[GenerationMetrics] = field(default_factory=list)


def rank_and_crowd(objs, sense: str) -> tuple[np.ndarray, np.ndarray]:
    n = len(objs)
    rank = np.empty(n, dtype=int)
    crowd = np.empty(n)
    for r, idx in enumerate(non_dominated_sort(objs, sense)):
        rank[idx] = r
        crowd[idx] = crowding_distance(objs[idx])
    return rank, crowd


def environmental_selection(objs, n: int, sense: str) -> np.ndarray:
    """Indices of the ``n`` survivors: whole fronts first, the last one cut by crowding."""
    chosen: list[int] = []
    for front in non_dominated_sort(objs, sense):
        if len(chosen) + len(front) <= n:
            chosen.extend(front.tolist())
            if len(chosen) == n:
                break
            continue
        cd = crowding_distance(objs[front])
        order = np.argsort(-cd, kind="stable")
        chosen.extend(front[order[: n - len(chosen)]].tolist())
        break
    return np.array(chosen, dtype=int)


def _metrics(gen, objs, sense, ref) -> GenerationMetrics:
    front = non_dominated_sort(objs, sense)[0]
    best = objs.max(axis=0) if sense == "max" else objs.min(axis=0)
    hv = float("nan")
    if ref is not None and objs.shape[1] == 2:
        hv = hypervolume_2d(objs[front], ref, sense)
    return GenerationMetrics(gen, len(front), tuple(float(v) for v in best), hv)


def nsga2(
    f: Callable,
    bounds,
    cfg: GaConfig,
    init=None,
    sense: str = "max",
    batch: bool = False,
    ref_point=None,
    callback: Callable | None = None,
    dedup_tol: float = 1e-9,
) -> NsgaResult:
    """Run NSGA-II on ``f`` (genome -> K objectives) inside the box ``bounds``.

    ``init`` rows seed the initial population; ``callback(gen, pop, objs)`` is
    invoked after every generation including the initial one.
    """
    lo, hi = as_bounds(bounds)
    d = len(lo)
    n = cfg.population
    rng = np.random.default_rng(cfg.seed)

    def score(X):
        v = np.atleast_2d(evaluate(f, X, batch, cfg.workers))
        return v.reshape(len(X), -1)

    pop = initial_population(lo, hi, n, rng, init)
    objs = score(pop)
    history = [_metrics(0, objs, sense, ref_point)]
    if callback:
        callback(0, pop, objs)

    for gen in range(1, cfg.max_generations + 1):
        rank, crowd = rank_and_crowd(objs, sense)
        keys = np.column_stack([rank, -crowd])
        parents = pop[binary_tournament(keys, n, rng)]
        kids = make_offspring(parents, lo, hi, n, rng, cfg, d)
        kid_objs = score(kids)
        all_x = np.vstack([pop, kids])
        all_f = np.vstack([objs, kid_objs])
        keep = environmental_selection(all_f, n, sense)
        pop, objs = all_x[keep], all_f[keep]
        history.append(_metrics(gen, objs, sense, ref_point))
        if callback:
            callback(gen, pop, objs)

    archive = ParetoArchive.from_population(pop, objs, sense, dedup_tol)
    return NsgaResult(archive, pop, objs, history)


def seeded_init(f: Callable, bounds, cfg: GaConfig, k: int = 2, sense: str = "max", per_objective: int = 2,
                batch: bool = False) -> np.ndarray:
    """Single-objective optima used to seed an NSGA-II population.

    Runs one :func:`ga_minimize` per objective (seed offset by the objective
    index) and repeats each optimum ``per_objective`` times; variation
    separates the copies in the first generation.
    """
    from .ga import ga_minimize

    seeds = []
    for j in range(k):
        if batch:
            def fj(X, j=j):
                return to_minimization(np.atleast_2d(f(X)), sense)[:, j]
        else:
            fj = _ObjectiveComponent(f, j, sense)
        sub = GaConfig(**{**cfg.to_dict(), "seed": cfg.seed + 1000 + j})
        res = ga_minimize(fj, bounds, sub, batch=batch)
        seeds.extend([res.best_genome] * per_objective)
    return np.array(seeds)


class _ObjectiveComponent:
    """Picklable wrapper returning one minimization-sense component of ``f``."""

    def __init__(self, f, j, sense):
        self.f, self.j, self.sense = f, j, sense

    def __call__(self, x):
        v = np.asarray(self.f(x), dtype=float)
        return float(-v[self.j] if self.sense == "max" else v[self.j])


def metrics_csv(history: list[GenerationMetrics]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    k = len(history[0].best) if history else 2
    w.writerow(["generation", "front0_size", *[f"best_f{i + 1}" for i in range(k)], "hypervolume"])
    for m in history:
        w.writerow([m.generation, m.front0_size, *[repr(v) for v in m.best], repr(m.hypervolume)])
    return buf.getvalue()


def archive_csv(archive: ParetoArchive, obj_names=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if not len(archive):
        w.writerow(["empty"])
        return buf.getvalue()
    d = len(archive.members[0].genome)
    k = len(archive.members[0].objectives)
    obj_names = obj_names or [f"f{i + 1}" for i in range(k)]
    w.writerow([*[f"w{i + 1}" for i in range(d)], *obj_names])
    for m in archive.members:
        w.writerow([*[repr(float(v)) for v in m.genome], *[repr(float(v)) for v in m.objectives]])
    return buf.getvalue()


def archive_json(archive: ParetoArchive, obj_names=None) -> str:
    members = []
    for m in archive.members:
        k = len(m.objectives)
        names = obj_names or [f"f{i + 1}" for i in range(k)]
        members.append({
            "genome": [float(v) for v in m.genome],
            "objectives": dict(zip(names, (float(v) for v in m.objectives))),
            "crowding": None if not np.isfinite(m.crowding) else float(m.crowding),
        })
    return json.dumps({"sense": archive.sense, "dedup_tol": archive.dedup_tol, "members": members}, indent=1)
