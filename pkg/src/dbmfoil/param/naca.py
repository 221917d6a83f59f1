"""NACA 4- and 5-digit section generators (closed trailing edge)."""

from __future__ import annotations

import numpy as np

from ..geometry import CollocatedAirfoil, CollocationGrid, RawAirfoil, collocate, normalize

# closed-TE variant of the standard thickness polynomial
_THICKNESS_COEFFS = (0.2969, -0.1260, -0.3516, 0.2843, -0.1036)

# (r, k1) for standard 5-digit mean lines with design cl = 0.3
_FIVE_DIGIT_STD = {
    1: (0.0580, 361.400),
    2: (0.1260, 51.640),
    3: (0.2025, 15.957),
    4: (0.2900, 6.643),
    5: (0.3910, 3.230),
}
# (r, k1, k2/k1) for reflexed 5-digit mean lines
_FIVE_DIGIT_REFLEX = {
    2: (0.1300, 51.990, 0.000764),
    3: (0.2170, 15.793, 0.00677),
    4: (0.3180, 6.520, 0.0303),
    5: (0.4410, 3.191, 0.1355),
}


def thickness(x, t: float) -> np.ndarray:
    """Half-thickness distribution of a symmetric NACA section."""
    x = np.asarray(x, dtype=float)
    a0, a1, a2, a3, a4 = _THICKNESS_COEFFS
    yt = 5.0 * t * (a0 * np.sqrt(x) + a1 * x + a2 * x**2 + a3 * x**3 + a4 * x**4)
    # the coefficients sum to zero; remove round-off at the closed trailing edge
    return np.where(x == 1.0, 0.0, yt)


def camber4(x, m: float, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Mean line and slope of a 4-digit section."""
    x = np.asarray(x, dtype=float)
    if m == 0.0:
        return np.zeros_like(x), np.zeros_like(x)
    fwd = x < p
    yc = np.where(fwd, m / p**2 * (2 * p * x - x**2), m / (1 - p) ** 2 * (1 - 2 * p + 2 * p * x - x**2))
    dyc = np.where(fwd, 2 * m / p**2 * (p - x), 2 * m / (1 - p) ** 2 * (p - x))
    return yc, dyc


def camber5(x, code: str) -> tuple[np.ndarray, np.ndarray]:
    """Mean line and slope of a 5-digit section given its first three digits."""
    x = np.asarray(x, dtype=float)
    design_cl = 0.15 * int(code[0])
    pos = int(code[1])
    reflex = int(code[2])
    scale = design_cl / 0.3
    if reflex == 0:
        r, k1 = _FIVE_DIGIT_STD[pos]
        fwd = x < r
        yc = np.where(fwd, k1 / 6 * (x**3 - 3 * r * x**2 + r**2 * (3 - r) * x), k1 * r**3 / 6 * (1 - x))
        dyc = np.where(fwd, k1 / 6 * (3 * x**2 - 6 * r * x + r**2 * (3 - r)), -k1 * r**3 / 6)
    else:
        r, k1, k21 = _FIVE_DIGIT_REFLEX[pos]
        fwd = x < r
        common = -k21 * (1 - r) ** 3 * x - r**3 * x + r**3
        yc = np.where(fwd, k1 / 6 * ((x - r) ** 3 + common), k1 / 6 * (k21 * (x - r) ** 3 + common))
        dcommon = -k21 * (1 - r) ** 3 - r**3
        dyc = np.where(fwd, k1 / 6 * (3 * (x - r) ** 2 + dcommon), k1 / 6 * (3 * k21 * (x - r) ** 2 + dcommon))
    return scale * yc, scale * dyc


def _assemble(x, yc, dyc, yt, name: str) -> RawAirfoil:
    theta = np.arctan(dyc)
    xu, yu = x - yt * np.sin(theta), yc + yt * np.cos(theta)
    xl, yl = x + yt * np.sin(theta), yc - yt * np.cos(theta)
    pts = np.vstack([np.column_stack([xu, yu])[::-1], np.column_stack([xl, yl])[1:]])
    return RawAirfoil(name, pts)


def _cosine_x(n: int) -> np.ndarray:
    return 0.5 * (1.0 - np.cos(np.linspace(0.0, np.pi, n)))


def naca4_raw(m: float, p: float, t: float, n: int = 2001) -> RawAirfoil:
    """Contour points of a NACA 4-digit section with ``n`` points per surface."""
    if t <= 0:
        raise ValueError("thickness must be positive")
    if not 0 <= m < 1:
        raise ValueError("camber must lie in [0, 1)")
    if m > 0 and not 0 < p < 1:
        raise ValueError("camber position must lie in (0, 1)")
    x = _cosine_x(n)
    yc, dyc = camber4(x, m, p)
    name = f"NACA {round(m * 100):d}{round(p * 10):d}{round(t * 100):02d}"
    return _assemble(x, yc, dyc, thickness(x, t), name)


def naca5_raw(code: str, n: int = 2001) -> RawAirfoil:
    """Contour points of a NACA 5-digit section, e.g. ``"23112"``."""
    code = code.strip()
    if len(code) != 5 or not code.isdigit():
        raise ValueError(f"not a 5-digit NACA code: {code!r}")
    x = _cosine_x(n)
    yc, dyc = camber5(x, code[:3])
    t = int(code[3:]) / 100.0
    return _assemble(x, yc, dyc, thickness(x, t), f"NACA {code}")


def naca4(m: float, p: float, t: float, grid: CollocationGrid) -> CollocatedAirfoil:
    """NACA 4-digit section on the collocation grid.

    Symmetric sections are evaluated directly at the grid abscissae; cambered
    ones are built from a dense contour and resampled.
    """
    if m == 0.0:
        if t <= 0:
            raise ValueError("thickness must be positive")
        yt = thickness(grid.surface_x, t)
        return CollocatedAirfoil.from_surfaces(grid, yt, -yt, f"NACA 00{round(t * 100):02d}")
    raw = naca4_raw(m, p, t, n=max(2001, 2 * grid.F + 1))
    return collocate(normalize(raw), grid)


def naca(code: str, grid: CollocationGrid) -> CollocatedAirfoil:
    """Collocated NACA section from a 4- or 5-digit designation."""
    code = code.strip().upper().removeprefix("NACA").strip()
    if len(code) == 4:
        return naca4(int(code[0]) / 100, int(code[1]) / 10, int(code[2:]) / 100, grid)
    raw = naca5_raw(code, n=max(2001, 2 * grid.F + 1))
    return collocate(normalize(raw), grid)
