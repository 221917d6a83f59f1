"""Dominance, non-dominated sorting, crowding distance and hypervolume."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractError

SENSES = ("max", "min")


def _check_sense(sense: str) -> None:
    if sense not in SENSES:
        raise ValueError(f"sense must be 'max' or 'min', got {sense!r}")


def to_minimization(objs, sense: str) -> np.ndarray:
    _check_sense(sense)
    objs = np.asarray(objs, dtype=float)
    return -objs if sense == "max" else objs


def dominates(a, b, sense: str = "max") -> bool:
    """True iff ``a`` is at least as good as ``b`` everywhere and strictly better somewhere."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ContractError(f"objective vectors differ in length: {a.shape} vs {b.shape}")
    a, b = to_minimization(a, sense), to_minimization(b, sense)
    return bool(np.all(a <= b) and np.any(a < b))


def dominance_matrix(objs, sense: str = "max") -> np.ndarray:
    """``D[i, j]`` is True when point i dominates point j."""
    f = to_minimization(objs, sense)
    le = np.all(f[:, None, :] <= f[None, :, :], axis=2)
    lt = np.any(f[:, None, :] < f[None, :, :], axis=2)
    return le & lt


def non_dominated_sort(objs, sense: str = "max") -> list[np.ndarray]:
    """Partition point indices into successive non-dominated fronts."""
    objs = np.atleast_2d(np.asarray(objs, dtype=float))
    n = len(objs)
    if n == 0:
        return []
    dom = dominance_matrix(objs, sense)
    n_dominators = dom.sum(axis=0)
    fronts = []
    current = np.nonzero(n_dominators == 0)[0]
    while len(current):
        fronts.append(current)
        n_dominators = n_dominators - dom[current].sum(axis=0)
        n_dominators[current] = -1
        current = np.nonzero(n_dominators == 0)[0]
    return fronts


def front_ranks(objs, sense: str = "max") -> np.ndarray:
    ranks = np.empty(len(objs), dtype=int)
    for r, idx in enumerate(non_dominated_sort(objs, sense)):
        ranks[idx] = r
    return ranks


def crowding_distance(objs) -> np.ndarray:
    """Crowding distance of the points of one front (objective space).

    Extremes get ``inf``; an objective with zero range adds nothing.
    """
    f = np.atleast_2d(np.asarray(objs, dtype=float))
    m, k = f.shape
    dist = np.zeros(m)
    if m <= 2:
        return np.full(m, np.inf)
    for j in range(k):
        order = np.argsort(f[:, j], kind="stable")
        col = f[order, j]
        span = col[-1] - col[0]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        if span > 0:
            dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist


def hypervolume_2d(objs, ref, sense: str = "max") -> float:
    """Area dominated by a bi-objective point set and bounded by ``ref``."""
    f = to_minimization(np.atleast_2d(objs), sense)
    r = to_minimization(np.asarray(ref, dtype=float), sense)
    if f.shape[1] != 2:
        raise ContractError("hypervolume_2d needs exactly two objectives")
    f = f[np.all(f < r, axis=1)]
    if len(f) == 0:
        return 0.0
    f = f[np.lexsort((f[:, 1], f[:, 0]))]
    area, best2 = 0.0, r[1]
    for f1, f2 in f:
        if f2 < best2:
            area += (r[0] - f1) * (best2 - f2)
            best2 = f2
    return float(area)


@dataclass
class Individual:
    genome: np.ndarray
    objectives: np.ndarray
    rank: int = 0
    crowding: float = 0.0


@dataclass
class ParetoArchive:
    """Rank-0 individuals with near-duplicate genomes removed."""

    members: list[Individual] = field(default_factory=list)
    dedup_tol: float = 1e-9
    sense: str = "max"

    @classmethod
    def from_population(cls, genomes, objectives, sense: str = "max", dedup_tol: float = 1e-9) -> ParetoArchive:
        genomes = np.atleast_2d(np.asarray(genomes, dtype=float))
        objectives = np.atleast_2d(np.asarray(objectives, dtype=float))
        fronts = non_dominated_sort(objectives, sense)
        if not fronts:
            return cls([], dedup_tol, sense)
        idx = fronts[0]
        # deterministic order: by first objective then genome
        idx = idx[np.lexsort((*genomes[idx].T[::-1], objectives[idx, 0]))]
        kept: list[int] = []
        for i in idx:
            if all(np.max(np.abs(genomes[i] - genomes[j])) > dedup_tol for j in kept):
                kept.append(int(i))
        crowd = crowding_distance(objectives[kept]) if kept else np.array([])
        members = [
            Individual(genomes[i].copy(), objectives[i].copy(), 0, float(c)) for i, c in zip(kept, crowd)
        ]
        return cls(members, dedup_tol, sense)

    def __len__(self):
        return len(self.members)

    @property
    def genomes(self) -> np.ndarray:
        return np.array([m.genome for m in self.members])

    @property
    def objectives(self) -> np.ndarray:
        return np.array([m.objectives for m in self.members])

    def is_mutually_non_dominated(self) -> bool:
        objs = self.objectives
        if len(objs) < 2:
            return True
        return not dominance_matrix(objs, self.sense).any()
