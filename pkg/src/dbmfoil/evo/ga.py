"""Single-objective real-coded GA and the shared configuration/evaluation helpers."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from ..errors import ConfigurationError
from .operators import binary_tournament, make_offspring


@dataclass(frozen=True)
class GaConfig:
    population: int = 100
    max_generations: int = 500
    seed: int = 0
    crossover_rate: float = 0.9
    mutation_rate: float | None = None  # None means 1/d
    mutation_scale: float = 1.0
    elitism_fraction: float = 0.5  # share of survivors taken from parents+offspring by rank
    early_stop: float | None = None
    eta_crossover: float = 15.0
    eta_mutation: float = 20.0
    workers: int = 1

    def __post_init__(self):
        if self.population < 4 or self.population % 2:
            raise ConfigurationError(f"population must be even and >= 4, got {self.population}")
        if self.max_generations < 0:
            raise ConfigurationError("max_generations must be non-negative")
        for name in ("crossover_rate", "elitism_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1], got {v}")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ConfigurationError(f"mutation_rate must lie in [0, 1], got {self.mutation_rate}")
        if self.mutation_scale <= 0:
            raise ConfigurationError("mutation_scale must be positive")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


def as_bounds(bounds) -> tuple[np.ndarray, np.ndarray]:
    b = np.asarray(bounds, dtype=float)
    if b.ndim != 2 or b.shape[1] != 2:
        raise ConfigurationError(f"bounds must have shape (d, 2), got {b.shape}")
    if not np.all(np.isfinite(b)) or np.any(b[:, 0] > b[:, 1]):
        raise ConfigurationError("bounds must be finite with lo <= hi")
    return b[:, 0].copy(), b[:, 1].copy()


def initial_population(lo, hi, n: int, rng: np.random.Generator, init=None) -> np.ndarray:
    """``init`` rows first (clipped into the box), the remainder uniform random."""
    pop = rng.uniform(lo, hi, size=(n, len(lo)))
    if init is not None:
        seeds = np.atleast_2d(np.asarray(init, dtype=float))[:n]
        pop[: len(seeds)] = np.clip(seeds, lo, hi)
    return pop


def evaluate(f: Callable, X: np.ndarray, batch: bool = False, workers: int = 1) -> np.ndarray:
    """Objective values for each row of ``X``, gathered in row order."""
    if batch:
        return np.asarray(f(X), dtype=float)
    if workers > 1 and len(X) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            vals = list(ex.map(f, list(X), chunksize=max(1, len(X) // (4 * workers))))
    else:
        vals = [f(x) for x in X]
    return np.asarray(vals, dtype=float)


@dataclass
class GaResult:
    best_genome: np.ndarray
    best_value: float
    trace: list[float] = field(default_factory=list)  # best-so-far per generation, index 0 = initial
    generations: int = 0
    stopped_early: bool = False


def _survivors(pop, fit, kids, kid_fit, n_elite):
    """Best ``n_elite`` of parents and offspring, then the best remaining offspring.

    Returned sorted by fitness, so row 0 is the best.
    """
    n = len(pop)
    X = np.vstack([pop, kids])
    F = np.concatenate([fit, kid_fit])
    order = np.argsort(F, kind="stable")
    elite = order[:n_elite]
    rest = order[n_elite:]
    rest = rest[rest >= n][: n - n_elite]
    chosen = np.sort(np.concatenate([elite, rest]))
    chosen = chosen[np.argsort(F[chosen], kind="stable")]
    return X[chosen], F[chosen]


def ga_minimize(f: Callable, bounds, cfg: GaConfig, init=None, batch: bool = False) -> GaResult:
    """Minimize a scalar function over a box with an elitist real-coded GA.

    ``f`` maps a genome to a float, or with ``batch=True`` an (n, d) array to n
    floats. Non-finite values are treated as ``inf``.
    """
    lo, hi = as_bounds(bounds)
    d = len(lo)
    rng = np.random.default_rng(cfg.seed)
    n = cfg.population
    n_elite = max(1, math.ceil(cfg.elitism_fraction * n))

    def score(X):
        v = evaluate(f, X, batch, cfg.workers).reshape(-1)
        return np.where(np.isfinite(v), v, np.inf)

    pop = initial_population(lo, hi, n, rng, init)
    fit = score(pop)
    best = int(np.argmin(fit))
    best_x, best_v = pop[best].copy(), float(fit[best])
    trace = [best_v]

    def done():
        return cfg.early_stop is not None and best_v <= cfg.early_stop

    gen = 0
    while gen < cfg.max_generations and not done():
        gen += 1
        parents = pop[binary_tournament(fit[:, None], n, rng)]
        kids = make_offspring(parents, lo, hi, n, rng, cfg, d)
        kid_fit = score(kids)
        pop, fit = _survivors(pop, fit, kids, kid_fit, n_elite)
        if fit[0] < best_v:
            best_x, best_v = pop[0].copy(), float(fit[0])
        trace.append(best_v)

    return GaResult(best_x, best_v, trace, gen, done())
