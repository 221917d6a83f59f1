"""PARSEC parameterization: each surface is a half-power polynomial.

    y(x) = sum_{n=1..6} a_n x^(n - 1/2)

The six coefficients per surface are fixed by the leading-edge radius, the
crest position, height and curvature, the trailing-edge ordinate and the
trailing-edge slope. Trailing-edge slopes are ``tan(alpha_te -/+ beta_te/2)``
for the upper/lower surface, angles in degrees.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass

import numpy as np

from ..errors import GenerationFailure
from ..geometry import CollocatedAirfoil, CollocationGrid
from . import naca as _naca

NAMES = (
    "r_le_up", "r_le_lo", "x_up", "y_up", "y_xx_up", "x_lo", "y_lo", "y_xx_lo",
    "y_te", "t_te", "alpha_te", "beta_te",
)

_POW = np.arange(6) + 0.5
_COND_MAX = 1e12


@dataclass(frozen=True)
class ParsecParams:
    r_le_up: float
    r_le_lo: float
    x_up: float
    y_up: float
    y_xx_up: float
    x_lo: float
    y_lo: float
    y_xx_lo: float
    y_te: float
    t_te: float
    alpha_te: float
    beta_te: float

    @classmethod
    def from_vector(cls, v) -> ParsecParams:
        v = np.asarray(v, dtype=float)
        if v.shape != (12,):
            raise ValueError(f"PARSEC needs 12 values, got shape {v.shape}")
        return cls(*map(float, v))

    def to_vector(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    def violations(self) -> list[str]:
        out = []
        if not (self.r_le_up > 0 and self.r_le_lo > 0):
            out.append("leading-edge radii must be positive")
        if not (0 < self.x_up < 1 and 0 < self.x_lo < 1):
            out.append("crest abscissae must lie in (0, 1)")
        if self.t_te < 0:
            out.append("trailing-edge thickness must be non-negative")
        return out


def _system(r_le: float, sign: float, xc: float, yc: float, yxx: float, y_end: float, slope_end: float):
    p = _POW
    A = np.array([
        [1.0, 0, 0, 0, 0, 0],
        np.ones(6),
        xc**p,
        p * xc ** (p - 1),
        p * (p - 1) * xc ** (p - 2),
        p,
    ])
    rhs = np.array([sign * np.sqrt(2.0 * r_le), y_end, yc, 0.0, yxx, slope_end])
    return A, rhs


def surface_coefficients(p: ParsecParams) -> tuple[np.ndarray, np.ndarray]:
    """Polynomial coefficients (upper, lower); raises GenerationFailure if singular."""
    bad = p.violations()
    if bad:
        raise GenerationFailure("; ".join(bad))
    a_te, b_te = np.radians(p.alpha_te), np.radians(p.beta_te)
    systems = (
        _system(p.r_le_up, 1.0, p.x_up, p.y_up, p.y_xx_up, p.y_te + 0.5 * p.t_te, np.tan(a_te - 0.5 * b_te)),
        _system(p.r_le_lo, -1.0, p.x_lo, p.y_lo, p.y_xx_lo, p.y_te - 0.5 * p.t_te, np.tan(a_te + 0.5 * b_te)),
    )
    out = []
    for A, rhs in systems:
        if not np.all(np.isfinite(A)) or np.linalg.cond(A) > _COND_MAX:
            raise GenerationFailure("PARSEC condition matrix is singular")
        out.append(np.linalg.solve(A, rhs))
    return out[0], out[1]


def evaluate(coeffs, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return (x[..., None] ** _POW) @ coeffs


def derivative(coeffs, x, order: int = 1) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    c = np.ones(6)
    for k in range(order):
        c = c * (_POW - k)
    return (x[..., None] ** (_POW - order)) @ (c * coeffs)


def parsec_generate(p: ParsecParams, grid: CollocationGrid, name: str = "parsec") -> CollocatedAirfoil:
    a_up, a_lo = surface_coefficients(p)
    xs = grid.surface_x
    yu, yl = evaluate(a_up, xs), evaluate(a_lo, xs)
    # both surfaces start at exactly 0 because every power is positive
    if not (np.all(np.isfinite(yu)) and np.all(np.isfinite(yl))):
        raise GenerationFailure("PARSEC produced non-finite ordinates")
    return CollocatedAirfoil.from_surfaces(grid, yu, yl, name)


def naca_seed(t: float = 0.12) -> ParsecParams:
    """PARSEC features read off the symmetric NACA thickness distribution."""
    x = np.linspace(0.0, 1.0, 200001)
    yt = _naca.thickness(x, t)
    k = int(np.argmax(yt))
    h = x[1] - x[0]
    yxx = (yt[k + 1] - 2 * yt[k] + yt[k - 1]) / h**2
    # y ~ a1 sqrt(x) near the nose, so r_le = a1^2 / 2 with a1 = 5 t 0.2969
    r_le = 0.5 * (5.0 * t * 0.2969) ** 2
    a0, a1, a2, a3, a4 = 0.2969, -0.1260, -0.3516, 0.2843, -0.1036
    slope_te = 5.0 * t * (0.5 * a0 + a1 + 2 * a2 + 3 * a3 + 4 * a4)
    beta = -2.0 * np.degrees(np.arctan(slope_te))
    return ParsecParams(r_le, r_le, x[k], yt[k], yxx, x[k], -yt[k], -yxx, 0.0, 0.0, 0.0, beta)


# generous default box; covers thin cambered and thick symmetric sections
DEFAULT_BOUNDS = np.array([
    [0.001, 0.05],   # r_le_up
    [0.001, 0.05],   # r_le_lo
    [0.1, 0.7],      # x_up
    [0.0, 0.2],      # y_up
    [-2.0, 0.0],     # y_xx_up
    [0.1, 0.7],      # x_lo
    [-0.2, 0.1],     # y_lo
    [-0.5, 2.0],     # y_xx_lo
    [-0.05, 0.05],   # y_te
    [0.0, 0.02],     # t_te
    [-30.0, 30.0],   # alpha_te (deg)
    [0.0, 40.0],     # beta_te (deg)
])
