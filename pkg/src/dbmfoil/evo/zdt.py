"""ZDT bi-objective test problems (minimization) and their analytic fronts."""

from __future__ import annotations

import numpy as np

from ..errors import ContractError

PROBLEMS = ("zdt1", "zdt2", "zdt4", "zdt6")

# smallest attainable f1 on the ZDT6 front: 1 - exp(-4 w) sin^6(6 pi w) is minimal near w = 0.0817
ZDT6_F1_MIN = 0.2807753191


def zdt_bounds(problem: str, n: int = 25) -> np.ndarray:
    _check(problem)
    b = np.tile([0.0, 1.0], (n, 1))
    if problem == "zdt4":
        b[1:] = [-5.0, 5.0]
    return b


def _check(problem: str):
    if problem not in PROBLEMS:
        raise ValueError(f"unknown problem {problem!r}; choose from {PROBLEMS}")


def zdt_batch(problem: str, W, check: bool = True) -> np.ndarray:
    """(m, 2) objective values for the rows of ``W``."""
    _check(problem)
    W = np.atleast_2d(np.asarray(W, dtype=float))
    n = W.shape[1]
    if n < 2:
        raise ContractError("ZDT problems need at least two variables")
    if check:
        b = zdt_bounds(problem, n)
        if np.any(W < b[:, 0]) or np.any(W > b[:, 1]):
            raise ContractError(f"{problem}: decision vector outside bounds")
    w1, rest = W[:, 0], W[:, 1:]
    if problem in ("zdt1", "zdt2"):
        g = 1.0 + 9.0 * rest.sum(axis=1) / (n - 1)
        f1 = w1
        h = 1.0 - np.sqrt(f1 / g) if problem == "zdt1" else 1.0 - (f1 / g) ** 2
    elif problem == "zdt4":
        g = 1.0 + 10.0 * (n - 1) + np.sum(rest**2 - 10.0 * np.cos(4.0 * np.pi * rest), axis=1)
        f1 = w1
        h = 1.0 - np.sqrt(f1 / g)
    else:
        f1 = 1.0 - np.exp(-4.0 * w1) * np.sin(6.0 * np.pi * w1) ** 6
        g = 1.0 + 9.0 * (rest.sum(axis=1) / (n - 1)) ** 0.25
        h = 1.0 - (f1 / g) ** 2
    return np.column_stack([f1, g * h])


def zdt(problem: str, w) -> tuple[float, float]:
    f = zdt_batch(problem, np.asarray(w, dtype=float)[None, :])[0]
    return float(f[0]), float(f[1])


def zdt_g(problem: str, w) -> float:
    """The distance function g; it equals 1 exactly on the Pareto-optimal set."""
    w = np.asarray(w, dtype=float)
    n, rest = len(w), w[1:]
    if problem in ("zdt1", "zdt2"):
        return float(1.0 + 9.0 * rest.sum() / (n - 1))
    if problem == "zdt4":
        return float(1.0 + 10.0 * (n - 1) + np.sum(rest**2 - 10.0 * np.cos(4.0 * np.pi * rest)))
    _check(problem)
    return float(1.0 + 9.0 * (rest.sum() / (n - 1)) ** 0.25)


def zdt_front(problem: str, f1) -> np.ndarray:
    """Analytic Pareto-front value of f2 at the given f1."""
    _check(problem)
    f1 = np.asarray(f1, dtype=float)
    if problem in ("zdt1", "zdt4"):
        return 1.0 - np.sqrt(f1)
    return 1.0 - f1**2


def front_samples(problem: str, n: int = 200) -> np.ndarray:
    lo = ZDT6_F1_MIN if problem == "zdt6" else 0.0
    f1 = np.linspace(lo, 1.0, n)
    return np.column_stack([f1, zdt_front(problem, f1)])


def mean_vertical_deviation(problem: str, F) -> float:
    """Mean |f2 - f2*(f1)| of a point set against the analytic front."""
    F = np.atleast_2d(np.asarray(F, dtype=float))
    return float(np.mean(np.abs(F[:, 1] - zdt_front(problem, F[:, 0]))))


REF_POINTS = {"zdt1": (1.1, 1.1), "zdt2": (1.1, 1.1), "zdt4": (1.1, 2.0), "zdt6": (1.1, 1.1)}


def benchmark(problem: str, cfg, n: int = 25, seed_generations: int | None = None):
    """NSGA-II on one ZDT problem, seeded like the airfoil optimizer.

    Each objective is first minimized alone with :func:`ga_minimize` for
    ``seed_generations`` (default: the full ``cfg.max_generations``) and the
    optima join the initial population. Returns ``(result, deviation)``.
    """
    from .ga import GaConfig
    from .nsga2 import nsga2, seeded_init

    _check(problem)
    b = zdt_bounds(problem, n)

    def f(X):
        return zdt_batch(problem, X)

    gens = cfg.max_generations if seed_generations is None else seed_generations
    init = None
    if gens > 0:
        init = seeded_init(f, b, GaConfig(**{**cfg.to_dict(), "max_generations": gens}), sense="min", batch=True)
    res = nsga2(f, b, cfg, init=init, sense="min", batch=True, ref_point=REF_POINTS[problem])
    return res, mean_vertical_deviation(problem, res.archive.objectives)
