"""Airfoil representation, file ingestion, collocation and intersection repair.

Every shape in dbmfoil is eventually a :class:`CollocatedAirfoil`: the
y-coordinates of the contour sampled at the fixed abscissae
``x_i = |1 - 2 i / F|`` for ``i = 0 .. F``.  The first half of the vector
runs along the upper surface from the trailing edge to the leading edge,
the second half along the lower surface back to the trailing edge.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AirfoilParseError,
    DegenerateInputError,
    IncompatibleGridError,
    NonRepairableShapeError,
    ResamplingError,
)

DEFAULT_F = 4000
DEFAULT_NEIGHBORHOOD = 5
DEFAULT_SMOOTH_WINDOW = 7
DEFAULT_MAX_PASSES = 20

_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eEdD][+-]?\d+)?$")


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RawAirfoil:
    """Ordered contour points, upper TE -> LE -> lower TE."""

    name: str
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise DegenerateInputError(f"{self.name!r}: points must be an (n, 2) array")
        if len(pts) < 3:
            raise DegenerateInputError(f"{self.name!r}: need at least 3 points, got {len(pts)}")
        if not np.all(np.isfinite(pts)):
            raise DegenerateInputError(f"{self.name!r}: non-finite coordinates")
        object.__setattr__(self, "points", _frozen(pts))

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    def __eq__(self, other):
        if not isinstance(other, RawAirfoil):
            return NotImplemented
        return self.name == other.name and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash((self.name, self.points.tobytes()))


@dataclass(frozen=True)
class CollocationGrid:
    """The fixed abscissae ``x_i = |1 - 2i/F|``, ``i = 0..F``."""

    F: int = DEFAULT_F

    def __post_init__(self):
        if not isinstance(self.F, (int, np.integer)) or self.F <= 0 or self.F % 2:
            raise ValueError(f"F must be an even positive integer, got {self.F!r}")
        object.__setattr__(self, "F", int(self.F))

    @cached_property
    def x(self) -> np.ndarray:
        i = np.arange(self.F + 1)
        x = np.abs(1.0 - 2.0 * i / self.F)
        # enforce exact mirror symmetry x_i == x_{F-i}
        half = self.F // 2
        x[half + 1 :] = x[:half][::-1]
        return _frozen(x)

    @property
    def n_points(self) -> int:
        return self.F + 1

    @property
    def le_index(self) -> int:
        return self.F // 2

    @cached_property
    def surface_x(self) -> np.ndarray:
        """Ascending abscissae of one surface, LE (0) to TE (1)."""
        return _frozen(self.x[self.le_index :])


@dataclass(frozen=True, eq=False)
class CollocatedAirfoil:
    """y-coordinates of a shape on a :class:`CollocationGrid`."""

    grid: CollocationGrid
    y: np.ndarray
    name: str = ""

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if y.shape != (self.grid.n_points,):
            raise ValueError(f"y must have {self.grid.n_points} entries, got shape {y.shape}")
        if not np.all(np.isfinite(y)):
            raise ValueError("collocated y contains non-finite values")
        object.__setattr__(self, "y", _frozen(y))

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def upper(self) -> np.ndarray:
        """Upper surface y ordered LE -> TE."""
        return self.y[: self.grid.le_index + 1][::-1]

    @property
    def lower(self) -> np.ndarray:
        """Lower surface y ordered LE -> TE."""
        return self.y[self.grid.le_index :]

    @classmethod
    def from_surfaces(cls, grid: CollocationGrid, upper, lower, name: str = "") -> CollocatedAirfoil:
        """Build from LE->TE surface arrays sampled at ``grid.surface_x``."""
        upper = np.asarray(upper, dtype=float)
        lower = np.asarray(lower, dtype=float)
        y = np.concatenate([upper[::-1], lower[1:]])
        y[grid.le_index] = 0.5 * (upper[0] + lower[0])
        return cls(grid, y, name)

    def with_y(self, y, name: str | None = None) -> CollocatedAirfoil:
        return CollocatedAirfoil(self.grid, y, self.name if name is None else name)

    def thickness(self) -> np.ndarray:
        return self.upper - self.lower

    def camber(self) -> np.ndarray:
        return 0.5 * (self.upper + self.lower)

    def to_points(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    def __eq__(self, other):
        if not isinstance(other, CollocatedAirfoil):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.y, other.y)

    __hash__ = None


@dataclass(frozen=True)
class IntersectionRecord:
    """Segments ``(i, i+1)`` and ``(j, j+1)`` of the contour cross."""

    i: int
    j: int
    crossing_point: tuple[float, float] = field(compare=False)


# --------------------------------------------------------------------------
# ingestion
# --------------------------------------------------------------------------


def _parse_pair(line: str, lineno: int) -> tuple[float, float]:
    fields = line.replace(",", " ").split()
    if len(fields) != 2:
        raise AirfoilParseError(f"expected two numbers, got {line.strip()!r}", lineno)
    vals = []
    for f in fields:
        if not _NUMBER.match(f):
            raise AirfoilParseError(f"not a number: {f!r}", lineno)
        vals.append(float(f.replace("d", "e").replace("D", "e")))
    return vals[0], vals[1]


def _is_numeric_line(line: str) -> bool:
    fields = line.replace(",", " ").split()
    return len(fields) == 2 and all(_NUMBER.match(f) for f in fields)


def _rows_started(rows) -> bool:
    return any(line for _, line in rows)


def detect_format(raw_text: str) -> str:
    """Guess ``"selig"`` or ``"lednicer"`` from the first numeric line.

    Lednicer files announce the point counts of both surfaces, so their
    first pair of numbers is larger than one chord.
    """
    for line in raw_text.splitlines():
        if _is_numeric_line(line):
            a, b = (float(v) for v in line.replace(",", " ").split())
            return "lednicer" if a > 1.5 and b > 1.5 else "selig"
    return "selig"


def load_airfoil(
    raw_text: str, format: str = "selig", name: str | None = None, strict: bool = True
) -> RawAirfoil:
    """Parse a UIUC-style coordinate file.

    ``format`` is ``"selig"`` (one TE->LE->TE listing), ``"lednicer"``
    (two LE->TE listings preceded by their point counts) or ``"auto"``.
    With ``strict=False`` a free-text trailer after the coordinates (common
    in hand-edited database files) ends the listing instead of raising.
    """
    if format == "auto":
        format = detect_format(raw_text)
    if format not in ("selig", "lednicer"):
        raise ValueError(f"unknown airfoil format {format!r}")

    label = name
    header_seen = False
    rows: list[tuple[int, str]] = []
    for lineno, line in enumerate(raw_text.splitlines(), start=1):
        if not line.strip():
            rows.append((lineno, ""))
            continue
        if not header_seen and not _rows_started(rows) and not _is_numeric_line(line):
            # a leading text line is the airfoil name
            header_seen = True
            label = label or line.strip()
            continue
        if not strict and _rows_started(rows) and not _is_numeric_line(line):
            break
        rows.append((lineno, line))
    label = label or "airfoil"

    if format == "selig":
        pts = [_parse_pair(line, n) for n, line in rows if line]
        if len(pts) < 3:
            raise DegenerateInputError(f"{label!r}: need at least 3 points, got {len(pts)}")
        return RawAirfoil(label, np.array(pts))

    # Lednicer: counts line, then upper block, blank, lower block
    nonblank = [(n, line) for n, line in rows if line]
    if not nonblank:
        raise DegenerateInputError(f"{label!r}: empty file")
    n0, counts = nonblank[0]
    nu, nl = _parse_pair(counts, n0)
    nu, nl = int(round(nu)), int(round(nl))
    body = [_parse_pair(line, n) for n, line in nonblank[1:]]
    if len(body) != nu + nl:
        raise AirfoilParseError(f"header announces {nu}+{nl} points, found {len(body)}", n0)
    upper = np.array(body[:nu])
    lower = np.array(body[nu:])
    if len(upper) and len(lower) and np.allclose(upper[0], lower[0]):
        lower = lower[1:]
    pts = np.vstack([upper[::-1], lower])
    if len(pts) < 3:
        raise DegenerateInputError(f"{label!r}: need at least 3 points, got {len(pts)}")
    return RawAirfoil(label, pts)


def read_airfoil(path, format: str = "auto", strict: bool = True) -> RawAirfoil:
    """Read a coordinate file from disk (format auto-detected by default)."""
    with open(path, encoding="utf-8", errors="replace") as fh:
        text = fh.read()
    return load_airfoil(text, format=format, strict=strict)


def dump_selig(a: RawAirfoil) -> str:
    out = [a.name]
    out += [f"{x:.8f} {y:.8f}" for x, y in a.points]
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# normalization and collocation
# --------------------------------------------------------------------------


def normalize(a: RawAirfoil) -> RawAirfoil:
    """Translate the leading edge to x = 0 and scale to unit chord."""
    x, y = a.x, a.y
    xmin, xmax = x.min(), x.max()
    chord = xmax - xmin
    if not chord > 0:
        raise DegenerateInputError(f"{a.name!r}: zero chord")
    if xmin == 0.0 and chord == 1.0:
        return a
    pts = np.column_stack([(x - xmin) / chord, y / chord])
    # pin the extremes so the result is exactly unit chord
    pts[np.argmin(x), 0] = 0.0
    pts[np.argmax(x), 0] = 1.0
    return RawAirfoil(a.name, pts)


def split_surfaces(a: RawAirfoil) -> tuple[np.ndarray, np.ndarray]:
    """Split at the minimum-x point into (upper, lower), both ordered LE -> TE."""
    ile = int(np.argmin(a.x))
    upper = a.points[: ile + 1][::-1]
    lower = a.points[ile:]
    return upper, lower


def _resample_surface(pts: np.ndarray, xs: np.ndarray, which: str, name: str) -> np.ndarray:
    px, py = pts[:, 0], pts[:, 1]
    if len(px) < 2:
        raise ResamplingError(f"{name!r}: {which} surface has fewer than 2 points")
    dx = np.diff(px)
    if np.any(dx < 0):
        k = int(np.argmax(dx < 0))
        raise ResamplingError(
            f"{name!r}: {which} surface x is not monotone near x={px[k]:.6g}"
        )
    # repeated abscissae keep their first value
    keep = np.append(True, dx > 0)
    if np.sum(keep) < 2:
        raise ResamplingError(f"{name!r}: {which} surface spans no x range")
    return np.interp(xs, px[keep], py[keep])


def collocate(a: RawAirfoil | CollocatedAirfoil, grid: CollocationGrid) -> CollocatedAirfoil:
    """Resample a normalized shape onto ``grid`` by piecewise-linear interpolation.

    A surface that stops short of x = 1 is extended with its last y value.
    """
    if isinstance(a, CollocatedAirfoil):
        if a.grid == grid:
            return a
        upper = np.interp(grid.surface_x, a.grid.surface_x, a.upper)
        lower = np.interp(grid.surface_x, a.grid.surface_x, a.lower)
        return CollocatedAirfoil.from_surfaces(grid, upper, lower, a.name)

    upper, lower = split_surfaces(a)
    xs = grid.surface_x
    yu = _resample_surface(upper, xs, "upper", a.name)
    yl = _resample_surface(lower, xs, "lower", a.name)
    return CollocatedAirfoil.from_surfaces(grid, yu, yl, a.name)


def mirror(a: CollocatedAirfoil, name: str | None = None) -> CollocatedAirfoil:
    """Reflect a shape about x = 0.5 so the trailing edge becomes the leading edge."""
    return CollocatedAirfoil.from_surfaces(
        a.grid, a.upper[::-1], a.lower[::-1], a.name if name is None else name
    )


# --------------------------------------------------------------------------
# shape metric
# --------------------------------------------------------------------------


def mae(a: CollocatedAirfoil, b: CollocatedAirfoil) -> float:
    """Mean absolute error ``(2/F) * sum_i |y_i^a - y_i^b|`` over all F+1 points."""
    if a.grid != b.grid:
        raise IncompatibleGridError(f"grid F={a.grid.F} vs F={b.grid.F}")
    return float(2.0 / a.grid.F * np.sum(np.abs(a.y - b.y)))


def mae_many(ys: np.ndarray, target: np.ndarray, F: int) -> np.ndarray:
    """Row-wise MAE of a stack of collocation vectors against one target."""
    return 2.0 / F * np.sum(np.abs(ys - target), axis=-1)


# --------------------------------------------------------------------------
# intersections
# --------------------------------------------------------------------------


def _surface_gap(y: np.ndarray, F: int) -> np.ndarray:
    # gap[k] = upper minus lower at x_k, k = 0 .. F/2
    half = F // 2
    return y[: half + 1] - y[F - np.arange(half + 1)]


def find_intersections(a: CollocatedAirfoil) -> list[IntersectionRecord]:
    """Proper crossings of the closed contour with itself.

    Both surfaces are single-valued in x on the shared grid, so two
    non-adjacent segments can only cross where the upper segment over
    ``[x_{k+1}, x_k]`` and the lower segment over the same interval swap
    order.  Touching at a vertex and coincident runs are not crossings.
    """
    F = a.grid.F
    y, x = a.y, a.grid.x
    gap = _surface_gap(y, F)
    ks = np.nonzero(gap[:-1] * gap[1:] < 0)[0]
    out = []
    for k in ks:
        k = int(k)
        t = gap[k] / (gap[k] - gap[k + 1])
        px = x[k] + t * (x[k + 1] - x[k])
        py = y[k] + t * (y[k + 1] - y[k])
        out.append(IntersectionRecord(k, F - k - 1, (float(px), float(py))))
    return out


def moving_average(y: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average; the window shrinks symmetrically at the ends."""
    if window < 1 or window % 2 == 0:
        raise ValueError(f"smooth window must be odd and >= 1, got {window}")
    y = np.asarray(y, dtype=float)
    if window == 1:
        return y.copy()
    n = len(y)
    h = window // 2
    c = np.concatenate([[0.0], np.cumsum(y)])
    idx = np.arange(n)
    half = np.minimum(h, np.minimum(idx, n - 1 - idx))
    return (c[idx + half + 1] - c[idx - half]) / (2 * half + 1)


def _stiffen(y: np.ndarray, F: int, k: int, n: int) -> None:
    # re-interpolate n points on each side of the crossing in interval (k, k+1)
    # on the upper surface and the mirrored interval on the lower surface
    half = F // 2
    lo = max(k - n, 0)
    hi = min(k + 1 + n, half)
    if hi - lo >= 2:
        idx = np.arange(lo + 1, hi)
        y[idx] = np.interp(idx, [lo, hi], [y[lo], y[hi]])
    llo = max(F - hi, half)
    lhi = min(F - lo, F)
    if lhi - llo >= 2:
        idx = np.arange(llo + 1, lhi)
        y[idx] = np.interp(idx, [llo, lhi], [y[llo], y[lhi]])


def remove_intersections(
    a: CollocatedAirfoil,
    neighborhood: int = DEFAULT_NEIGHBORHOOD,
    smooth_window: int = DEFAULT_SMOOTH_WINDOW,
    max_passes: int = DEFAULT_MAX_PASSES,
) -> CollocatedAirfoil:
    """Flip, stiffen and smooth a self-intersecting collocation vector.

    Each pass flips the vector between the bracketing indices of every
    detected crossing (working from the trailing edge inwards), then
    replaces ``neighborhood`` points on each side of every former crossing
    by linear interpolation in index space.  When no crossing remains a
    centered moving average of width ``smooth_window`` is applied; if the
    smoothing reintroduces a crossing the loop continues.

    Raises
    ------
    NonRepairableShapeError
        If crossings persist after ``max_passes`` passes.
    """
    if neighborhood < 1:
        raise ValueError("neighborhood must be >= 1")
    if smooth_window < 1 or smooth_window % 2 == 0:
        raise ValueError("smooth_window must be odd and >= 1")
    F = a.grid.F
    y = np.array(a.y)
    for _ in range(max_passes):
        crossings = find_intersections(a.with_y(y))
        if crossings:
            for rec in crossings:
                seg = y[rec.i + 1 : rec.j + 1]
                y[rec.i + 1 : rec.j + 1] = seg[::-1]
            for rec in crossings:
                _stiffen(y, F, rec.i, neighborhood)
            continue
        smoothed = moving_average(y, smooth_window)
        if not find_intersections(a.with_y(smoothed)):
            return a.with_y(smoothed)
        y = smoothed
    raise NonRepairableShapeError(
        f"{a.name or 'shape'}: intersections remain after {max_passes} passes"
    )


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------


def to_csv(a: CollocatedAirfoil) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "x", "y"])
    for i, (x, y) in enumerate(zip(a.x, a.y)):
        w.writerow([i, repr(float(x)), repr(float(y))])
    return buf.getvalue()


def from_csv(text: str, name: str = "") -> CollocatedAirfoil:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise AirfoilParseError("empty collocated CSV")
    y = np.array([float(r["y"]) for r in rows])
    return CollocatedAirfoil(CollocationGrid(len(y) - 1), y, name)


def to_json(a: CollocatedAirfoil) -> str:
    return json.dumps({"name": a.name, "F": a.grid.F, "y": [float(v) for v in a.y]})


def from_json(text: str) -> CollocatedAirfoil:
    rec = json.loads(text)
    return CollocatedAirfoil(CollocationGrid(int(rec["F"])), rec["y"], rec.get("name", ""))


def stack(shapes: Sequence[CollocatedAirfoil]) -> np.ndarray:
    """(N, F+1) matrix of collocation vectors; all shapes must share a grid."""
    if not shapes:
        raise ValueError("no shapes")
    grid = shapes[0].grid
    for s in shapes[1:]:
        if s.grid != grid:
            raise IncompatibleGridError(f"grid F={grid.F} vs F={s.grid.F}")
    return np.vstack([s.y for s in shapes])


def max_thickness(a: CollocatedAirfoil) -> float:
    return float(np.max(a.thickness()))


def prepare(raw: RawAirfoil, grid: CollocationGrid) -> CollocatedAirfoil:
    """normalize + collocate in one step."""
    return collocate(normalize(raw), grid)


def iter_names(shapes: Iterable[CollocatedAirfoil]) -> list[str]:
    return [s.name for s in shapes]
