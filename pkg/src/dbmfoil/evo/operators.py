"""Real-coded variation operators: bounded SBX and polynomial mutation."""

from __future__ import annotations

import numpy as np


def sbx_crossover(p1, p2, lo, hi, rng: np.random.Generator, eta: float = 15.0, var_prob: float = 0.5):
    """Bounded simulated binary crossover of two parent vectors.

    Each variable is recombined with probability ``var_prob``; the spread
    factor is truncated so children stay inside ``[lo, hi]``.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    c1, c2 = p1.copy(), p2.copy()
    d = len(p1)
    u = rng.random(d)
    active = (rng.random(d) < var_prob) & (np.abs(p1 - p2) > 1e-14)
    swap = rng.random(d) < 0.5
    if not np.any(active):
        return c1, c2
    a = np.minimum(p1, p2)[active]
    b = np.maximum(p1, p2)[active]
    l, h, uu = lo[active], hi[active], u[active]
    span = b - a

    def child(beta_bound):
        alpha = 2.0 - beta_bound ** (-(eta + 1.0))
        betaq = np.where(
            uu <= 1.0 / alpha,
            (uu * alpha) ** (1.0 / (eta + 1.0)),
            (1.0 / (2.0 - uu * alpha)) ** (1.0 / (eta + 1.0)),
        )
        return betaq

    bq1 = child(1.0 + 2.0 * (a - l) / span)
    bq2 = child(1.0 + 2.0 * (h - b) / span)
    y1 = np.clip(0.5 * ((a + b) - bq1 * span), l, h)
    y2 = np.clip(0.5 * ((a + b) + bq2 * span), l, h)
    s = swap[active]
    c1[active] = np.where(s, y2, y1)
    c2[active] = np.where(s, y1, y2)
    return c1, c2


def polynomial_mutation(x, lo, hi, rng: np.random.Generator, rate: float, eta: float = 20.0, scale: float = 1.0):
    """Bounded polynomial mutation; each variable mutates with probability ``rate``."""
    x = np.asarray(x, dtype=float).copy()
    d = len(x)
    mask = rng.random(d) < rate
    u = rng.random(d)
    if not np.any(mask):
        return x
    span = hi - lo
    with np.errstate(divide="ignore", invalid="ignore"):
        d1 = np.where(span > 0, (x - lo) / span, 0.0)
        d2 = np.where(span > 0, (hi - x) / span, 0.0)
    mpow = 1.0 / (eta + 1.0)
    left = u < 0.5
    xy1 = 1.0 - d1
    val1 = 2.0 * u + (1.0 - 2.0 * u) * xy1 ** (eta + 1.0)
    dq1 = np.abs(val1) ** mpow - 1.0
    xy2 = 1.0 - d2
    val2 = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy2 ** (eta + 1.0)
    dq2 = 1.0 - np.abs(val2) ** mpow
    deltaq = np.where(left, dq1, dq2)
    x[mask] = np.clip(x[mask] + scale * deltaq[mask] * span[mask], lo[mask], hi[mask])
    return x


def binary_tournament(keys: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Pick ``n`` winners; ``keys`` is an (m, k) array compared lexicographically, smaller wins."""
    keys = np.atleast_2d(keys)
    m = len(keys)
    a = rng.integers(0, m, n)
    b = rng.integers(0, m, n)
    win = np.empty(n, dtype=int)
    for t in range(n):
        ka, kb = keys[a[t]], keys[b[t]]
        pick = a[t]
        for va, vb in zip(ka, kb):
            if va < vb:
                break
            if vb < va:
                pick = b[t]
                break
        win[t] = pick
    return win


def make_offspring(parents, lo, hi, n_children: int, rng, cfg, d: int) -> np.ndarray:
    """Pair consecutive parents, recombine and mutate into ``n_children`` vectors."""
    rate = cfg.mutation_rate if cfg.mutation_rate is not None else 1.0 / d
    kids = []
    for k in range(0, n_children, 2):
        p1 = parents[k % len(parents)]
        p2 = parents[(k + 1) % len(parents)]
        if rng.random() < cfg.crossover_rate:
            c1, c2 = sbx_crossover(p1, p2, lo, hi, rng, eta=cfg.eta_crossover)
        else:
            c1, c2 = p1.copy(), p2.copy()
        kids.append(polynomial_mutation(c1, lo, hi, rng, rate, cfg.eta_mutation, cfg.mutation_scale))
        kids.append(polynomial_mutation(c2, lo, hi, rng, rate, cfg.eta_mutation, cfg.mutation_scale))
    return np.array(kids[:n_children])
