"""Rational cubic B-spline (NURBS) surfaces anchored at the LE and TE.

Each surface has six control points: the leading edge at the origin, four
free interior points with weights, and the trailing edge at ``(1, y_te)``.
The clamped knot vector has evenly spaced interior knots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import GenerationFailure
from ..geometry import CollocatedAirfoil, CollocationGrid

DEGREE = 3
N_FREE = 4
KNOTS = np.array([0.0, 0.0, 0.0, 0.0, 1 / 3, 2 / 3, 1.0, 1.0, 1.0, 1.0])
FOLD_TOL = 1e-4


def bspline_basis(u, knots=KNOTS, degree: int = DEGREE) -> np.ndarray:
    """Cox-de Boor basis values, shape (len(u), n_ctrl).

    ``u == knots[-1]`` is assigned to the last non-empty span so the clamped
    curve interpolates its final control point.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    t = np.asarray(knots, dtype=float)
    n_ctrl = len(t) - degree - 1
    last = np.max(np.nonzero(t[:-1] < t[1:])[0])
    N = np.zeros((len(u), len(t) - 1))
    for i in range(len(t) - 1):
        if t[i] < t[i + 1]:
            N[:, i] = (u >= t[i]) & (u < t[i + 1])
    N[u == t[-1], last] = 1.0
    for p in range(1, degree + 1):
        M = np.zeros((len(u), len(t) - 1 - p))
        for i in range(len(t) - 1 - p):
            d1 = t[i + p] - t[i]
            d2 = t[i + p + 1] - t[i + 1]
            if d1 > 0:
                M[:, i] += (u - t[i]) / d1 * N[:, i]
            if d2 > 0:
                M[:, i] += (t[i + p + 1] - u) / d2 * N[:, i + 1]
        N = M
    return N[:, :n_ctrl]


def rational_curve(u, ctrl, weights, knots=KNOTS, degree: int = DEGREE) -> np.ndarray:
    """Points of the rational B-spline, shape (len(u), 2)."""
    ctrl = np.asarray(ctrl, dtype=float)
    w = np.asarray(weights, dtype=float)
    B = bspline_basis(u, knots, degree)
    Bw = B * w
    return (Bw @ ctrl) / Bw.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class NurbsParams:
    """Interior control points (4, 2) and weights (4,) per surface, plus TE ordinates."""

    ctrl_up: np.ndarray
    w_up: np.ndarray
    ctrl_lo: np.ndarray
    w_lo: np.ndarray
    y_te_up: float
    y_te_lo: float

    @classmethod
    def from_vector(cls, v) -> NurbsParams:
        """Vector layout: [x1 y1 .. x4 y4 | w1..w4] upper, same for lower, then y_te_up, y_te_lo."""
        v = np.asarray(v, dtype=float)
        if v.shape != (26,):
            raise ValueError(f"NURBS needs 26 values, got shape {v.shape}")
        up, lo = v[:12], v[12:24]
        return cls(up[:8].reshape(4, 2), up[8:], lo[:8].reshape(4, 2), lo[8:], float(v[24]), float(v[25]))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([
            np.ravel(self.ctrl_up), self.w_up, np.ravel(self.ctrl_lo), self.w_lo, [self.y_te_up, self.y_te_lo]
        ])

    def control_net(self, surface: str) -> tuple[np.ndarray, np.ndarray]:
        """Full (6, 2) control net and (6,) weights of one surface."""
        if surface == "upper":
            inner, w, y_te = self.ctrl_up, self.w_up, self.y_te_up
        else:
            inner, w, y_te = self.ctrl_lo, self.w_lo, self.y_te_lo
        net = np.vstack([[0.0, 0.0], inner, [1.0, y_te]])
        return net, np.concatenate([[1.0], w, [1.0]])


def _parameter_samples(n: int) -> np.ndarray:
    # quadratic clustering near u = 0 where x(u) moves slowly at a round nose
    s = np.linspace(0.0, 1.0, n)
    return s * s * (3.0 - 2.0 * s) * 0.5 + 0.5 * s


def surface_on_grid(net, w, xs, n_samples: int) -> np.ndarray:
    if np.any(np.asarray(w) <= 0):
        raise GenerationFailure("NURBS weights must be positive")
    pts = rational_curve(_parameter_samples(n_samples), net, w)
    x, y = pts[:, 0], pts[:, 1]
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise GenerationFailure("NURBS curve is not finite")
    run_max = np.maximum.accumulate(x)
    if np.max(run_max - x) > FOLD_TOL:
        raise GenerationFailure("NURBS curve folds back in x")
    keep = np.append(True, np.diff(run_max) > 0)
    return np.interp(xs, run_max[keep], y[keep])


def nurbs_generate(p: NurbsParams, grid: CollocationGrid, name: str = "nurbs") -> CollocatedAirfoil:
    n_samples = max(801, 4 * grid.le_index + 1)
    xs = grid.surface_x
    yu = surface_on_grid(*p.control_net("upper"), xs, n_samples)
    yl = surface_on_grid(*p.control_net("lower"), xs, n_samples)
    return CollocatedAirfoil.from_surfaces(grid, yu, yl, name)


# Least-squares fit of the free net to NACA 0012 at F = 400, used as the
# seeded individual of a reconstruction run.
NACA0012_UPPER = np.array([
    [0.0, 0.0212301], [0.0825396, 0.0531697], [0.353072, 0.0672010], [0.748285, 0.0366555],
])
NACA0012_WEIGHTS = np.array([1.12657, 1.31655, 1.28413, 0.950006])


def naca_seed() -> NurbsParams:
    lower = NACA0012_UPPER * [1.0, -1.0]
    return NurbsParams(NACA0012_UPPER.copy(), NACA0012_WEIGHTS.copy(), lower, NACA0012_WEIGHTS.copy(), 0.0, 0.0)


def default_bounds() -> np.ndarray:
    up = [[0.0, 1.0], [-0.1, 0.3]] * 4 + [[0.2, 5.0]] * 4
    lo = [[0.0, 1.0], [-0.3, 0.1]] * 4 + [[0.2, 5.0]] * 4
    return np.array(up + lo + [[-0.05, 0.05], [-0.05, 0.05]])
