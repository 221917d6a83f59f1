"""Hicks-Henne bump functions added to a NACA 0012 base profile.

Bump i on a surface is ``m_i * sin(pi * x**e_i) ** p_i`` with
``e_i = ln 0.5 / ln h_i`` so that it peaks at ``x = h_i``.  The width
variable sets the sharpness ``p_i = q * 0.5 / w_i``: ``w_i = 0.5`` gives the
plain ``sin^q`` bump, smaller values narrow it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import CollocatedAirfoil, CollocationGrid
from . import naca as _naca

N_BUMPS = 6
DEFAULT_Q = 3.0
# cosine-distributed peak locations in (0, 1)
PEAKS = 0.5 * (1.0 - np.cos(np.pi * np.arange(1, N_BUMPS + 1) / (N_BUMPS + 1)))


@dataclass(frozen=True)
class HicksHenneParams:
    widths_up: np.ndarray
    mags_up: np.ndarray
    widths_lo: np.ndarray
    mags_lo: np.ndarray

    @classmethod
    def from_vector(cls, v) -> HicksHenneParams:
        """Layout: 6 upper widths, 6 upper magnitudes, 6 lower widths, 6 lower magnitudes."""
        v = np.asarray(v, dtype=float)
        if v.shape != (4 * N_BUMPS,):
            raise ValueError(f"Hicks-Henne needs {4 * N_BUMPS} values, got shape {v.shape}")
        return cls(*(v[k * N_BUMPS:(k + 1) * N_BUMPS] for k in range(4)))

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.widths_up, self.mags_up, self.widths_lo, self.mags_lo])


def bump(x, h: float, width: float = 0.5, q: float = DEFAULT_Q) -> np.ndarray:
    """Unit-height bump peaking at ``x = h``; zero at both ends of [0, 1]."""
    if not 0.0 < h < 1.0:
        raise ValueError("bump peak must lie in (0, 1)")
    if not 0.0 < width:
        raise ValueError("bump width must be positive")
    x = np.asarray(x, dtype=float)
    e = np.log(0.5) / np.log(h)
    s = np.sin(np.pi * x**e)
    # sin(pi) is 1.2e-16, not 0; the bump is defined to vanish at the trailing edge
    s = np.where(x >= 1.0, 0.0, np.abs(s))
    return s ** (q * 0.5 / width)


def bump_sum(x, widths, mags, q: float = DEFAULT_Q, peaks=PEAKS) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for h, w, m in zip(peaks, widths, mags):
        if m != 0.0:
            out = out + m * bump(x, h, w, q)
    return out


def hicks_henne_generate(p: HicksHenneParams, grid: CollocationGrid, q: float = DEFAULT_Q,
                         name: str = "hicks_henne") -> CollocatedAirfoil:
    xs = grid.surface_x
    yt = _naca.thickness(xs, 0.12)
    yu = yt + bump_sum(xs, p.widths_up, p.mags_up, q)
    yl = -yt + bump_sum(xs, p.widths_lo, p.mags_lo, q)
    return CollocatedAirfoil.from_surfaces(grid, yu, yl, name)


def naca_seed() -> HicksHenneParams:
    w = np.full(N_BUMPS, 0.5)
    z = np.zeros(N_BUMPS)
    return HicksHenneParams(w, z, w.copy(), z.copy())


def default_bounds(mag: float = 0.1) -> np.ndarray:
    widths = [[0.05, 0.95]] * N_BUMPS
    mags = [[-mag, mag]] * N_BUMPS
    return np.array(widths + mags + widths + mags)
