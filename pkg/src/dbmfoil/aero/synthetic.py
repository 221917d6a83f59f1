"""Closed-form polar model for desk-scale runs and tests.

The model reads three features from the collocated shape: the signed camber
of largest magnitude ``m``, the maximum thickness ``t`` and the LE bluntness
``b = thickness(x=0.02) / t``. With ``m_eff = 0.08 tanh(m / 0.08)``::

    alpha_0     = -114.6 m_eff                        [deg]
    alpha_stall = 4 + 16 S((t - 0.12) / 0.04) + 2 (b - 0.45)
    sigma       = 1 / (1 + exp((alpha - alpha_stall) / 2))
    C_l         = 0.11 (alpha - alpha_0) sigma
    C_d         = r (0.004 + 0.1 t^2) + k C_l^2 + 0.05 (1 - sigma)
    k           = 0.012 / (1 + 25 max(m_eff, 0)),  r = (1e6 / Re)^0.2

with ``S`` the logistic function. Thin cambered shapes reach high C_l/C_d
and thick ones stall late, which gives a genuine trade-off between the two
objectives. C_l has exactly one local maximum in alpha. Shapes whose
surfaces cross, whose maximum thickness is below ``MIN_THICKNESS`` or whose
nose is knife-sharp (bluntness below ``MIN_BLUNTNESS``, e.g. a section
flipped front to back) return a polar with no converged rows, as a panel
code would.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import CollocatedAirfoil
from .polar import FlowCondition, Polar

LIFT_SLOPE = 0.11  # per degree
MIN_THICKNESS = 0.01
MIN_BLUNTNESS = 0.1
_RAD_TO_DEG_2 = 114.6


@dataclass(frozen=True)
class ShapeFeatures:
    camber: float
    thickness: float
    bluntness: float
    min_thickness: float


def features(shape: CollocatedAirfoil) -> ShapeFeatures:
    t = shape.thickness()
    c = shape.camber()
    xs = shape.grid.surface_x
    t_max = float(np.max(t))
    i = int(np.argmax(np.abs(c)))
    t02 = float(np.interp(0.02, xs, t))
    blunt = t02 / t_max if t_max > 0 else 0.0
    return ShapeFeatures(float(c[i]), t_max, blunt, float(np.min(t)))


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def model(f: ShapeFeatures, alphas, re: float = 1e6) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(alphas, dtype=float)
    m_eff = 0.08 * np.tanh(f.camber / 0.08)
    alpha0 = -_RAD_TO_DEG_2 * m_eff
    alpha_stall = 4.0 + 16.0 * _sigmoid((f.thickness - 0.12) / 0.04) + 2.0 * (f.bluntness - 0.45)
    sigma = 1.0 / (1.0 + np.exp((a - alpha_stall) / 2.0))
    cl = LIFT_SLOPE * (a - alpha0) * sigma
    k = 0.012 / (1.0 + 25.0 * max(m_eff, 0.0))
    d0 = (1e6 / re) ** 0.2 * (0.004 + 0.1 * f.thickness**2)
    cd = d0 + k * cl**2 + 0.05 * (1.0 - sigma)
    return cl, cd


class SyntheticEvaluator:
    """Deterministic stand-in for a panel code; always converges on valid shapes."""

    name = "synthetic"

    def __call__(self, shape: CollocatedAirfoil, flow: FlowCondition, alphas) -> Polar:
        alphas = np.asarray(alphas, dtype=float)
        f = features(shape)
        if f.min_thickness < -1e-9 or f.thickness < MIN_THICKNESS or f.bluntness < MIN_BLUNTNESS:
            nan = np.full(len(alphas), np.nan)
            return Polar(alphas, nan, nan, np.zeros(len(alphas), bool))
        cl, cd = model(f, alphas, flow.re)
        return Polar(alphas, cl, cd, np.ones(len(alphas), bool))
