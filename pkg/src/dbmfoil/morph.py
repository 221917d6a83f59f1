"""The Design-by-Morphing design space.

A morphed shape is the weight-normalized sum of baseline collocation
vectors::

    P = sum_n w_n S_n / sum_m w_m

Negative weights extrapolate beyond the convex hull of the baselines and may
produce self-intersecting contours, which :func:`morph` repairs on request.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from . import geometry
from .errors import ConfigurationError, ContractError, DegenerateWeightsError, IncompatibleGridError
from .geometry import CollocatedAirfoil, CollocationGrid

EPS_NORM = 1e-6
MODES = ("dbm", "dbm_i")


@dataclass(frozen=True, eq=False)
class BaselineSet:
    """Ordered baseline shapes sharing one collocation grid."""

    shapes: tuple[CollocatedAirfoil, ...]

    def __post_init__(self):
        shapes = tuple(self.shapes)
        if len(shapes) < 2:
            raise ContractError("a baseline set needs at least two shapes")
        grid = shapes[0].grid
        for s in shapes:
            if s.grid != grid:
                raise IncompatibleGridError(f"{s.name!r} is on F={s.grid.F}, expected F={grid.F}")
        object.__setattr__(self, "shapes", shapes)
        matrix = geometry.stack(shapes)
        matrix.setflags(write=False)
        object.__setattr__(self, "_matrix", matrix)

    @property
    def grid(self) -> CollocationGrid:
        return self.shapes[0].grid

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.shapes]

    @property
    def matrix(self) -> np.ndarray:
        """(N, F+1) stack of collocation vectors."""
        return self._matrix

    def __len__(self):
        return len(self.shapes)

    def __getitem__(self, i):
        return self.shapes[i]

    def subset(self, indices: Sequence[int]) -> BaselineSet:
        return BaselineSet(tuple(self.shapes[i] for i in indices))

    def check_clean(self) -> list[str]:
        """Names of baselines that self-intersect (should be empty)."""
        return [s.name for s in self.shapes if geometry.find_intersections(s)]


@dataclass(frozen=True)
class Violation:
    """One broken constraint of a weight vector; ``baseline`` is 1-based."""

    kind: str
    message: str
    baseline: int | None = None


# --------------------------------------------------------------------------
# baseline loading
# --------------------------------------------------------------------------


def _load_entry(entry: dict, root: Path, grid: CollocationGrid) -> CollocatedAirfoil:
    from .param.naca import naca  # local import: param depends on geometry only

    name = entry.get("name")
    if "naca" in entry:
        shape = naca(str(entry["naca"]), grid)
    elif "path" in entry:
        try:
            raw = geometry.read_airfoil(root / entry["path"], format=entry.get("format", "auto"))
        except OSError as exc:
            raise ConfigurationError(f"cannot read baseline file {root / entry['path']}: {exc}") from exc
        shape = geometry.prepare(raw, grid)
    elif "y" in entry:
        shape = geometry.collocate(
            CollocatedAirfoil(CollocationGrid(len(entry["y"]) - 1), entry["y"]), grid
        )
    else:
        raise ConfigurationError(f"manifest entry {entry!r} needs 'path', 'naca' or 'y'")
    transform = entry.get("transform")
    if transform == "mirror":
        shape = geometry.mirror(shape)
    elif transform is not None:
        raise ConfigurationError(f"unknown transform {transform!r}")
    return shape.with_y(shape.y, name=name or shape.name)


def load_shapes(path, grid: CollocationGrid) -> list[CollocatedAirfoil]:
    """Shapes of a JSON manifest ``[{name, path}, ...]``; paths are relative to the manifest."""
    path = Path(path)
    try:
        entries = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read baseline manifest {path}: {exc}") from exc
    if not isinstance(entries, list):
        raise ConfigurationError(f"{path}: manifest must be a JSON list")
    return [_load_entry(e, path.parent, grid) for e in entries]


def load_manifest(path, grid: CollocationGrid) -> BaselineSet:
    """Baseline set from a JSON manifest (see :func:`load_shapes`)."""
    return BaselineSet(tuple(load_shapes(path, grid)))


def data_path(name: str) -> Path:
    """Location of a bundled data directory (``baselines`` or ``uiuc_sample``)."""
    return Path(str(resources.files("dbmfoil") / "data" / name))


def builtin_baselines(grid: CollocationGrid | None = None) -> BaselineSet:
    """The 25 bundled baseline airfoils in their canonical order."""
    return load_manifest(data_path("baselines") / "manifest.json", grid or CollocationGrid())


def builtin_sample(grid: CollocationGrid | None = None) -> BaselineSet:
    """The bundled fixed 20-airfoil UIUC reconstruction sample."""
    return load_manifest(data_path("uiuc_sample") / "manifest.json", grid or CollocationGrid())


# --------------------------------------------------------------------------
# morphing
# --------------------------------------------------------------------------


def normalized_weights(w, eps: float = EPS_NORM) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    total = w.sum(axis=-1, keepdims=True)
    if np.any(np.abs(total) <= eps):
        raise DegenerateWeightsError(f"weight sum {float(np.min(np.abs(total))):.3g} is below {eps}")
    return w / total


def _combine(W_hat: np.ndarray, M: np.ndarray) -> np.ndarray:
    # fixed accumulation order so a row's result does not depend on the batch it is in
    out = W_hat[:, 0, None] * M[0]
    for n in range(1, M.shape[0]):
        out += W_hat[:, n, None] * M[n]
    return out


def morph_vectors(b: BaselineSet, W, eps: float = EPS_NORM) -> np.ndarray:
    """Unrepaired morphs for a stack of weight vectors, shape (m, F+1).

    Rows with a degenerate weight sum come back as NaN instead of raising so
    that a whole GA population can be scored in one call.
    """
    W = np.atleast_2d(np.asarray(W, dtype=float))
    if W.shape[1] != len(b):
        raise ValueError(f"expected {len(b)} weights per row, got {W.shape[1]}")
    total = W.sum(axis=1)
    ok = np.abs(total) > eps
    out = np.full((len(W), b.grid.n_points), np.nan)
    if np.any(ok):
        out[ok] = _combine(W[ok] / total[ok, None], b.matrix)
    return out


def morph(
    b: BaselineSet,
    w,
    repair: bool = True,
    *,
    neighborhood: int = geometry.DEFAULT_NEIGHBORHOOD,
    smooth_window: int = geometry.DEFAULT_SMOOTH_WINDOW,
    max_passes: int = geometry.DEFAULT_MAX_PASSES,
    eps: float = EPS_NORM,
    name: str = "morph",
) -> CollocatedAirfoil:
    """Morph the baselines with weights ``w``.

    With ``repair`` the result is passed through
    :func:`geometry.remove_intersections` whenever it self-intersects; a
    clean morph is returned as is.

    Raises
    ------
    DegenerateWeightsError
        If ``|sum(w)| <= eps``.
    NonRepairableShapeError
        If repair is requested and fails.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (len(b),):
        raise ValueError(f"expected {len(b)} weights, got shape {w.shape}")
    y = _combine(normalized_weights(w, eps)[None, :], b.matrix)[0]
    shape = CollocatedAirfoil(b.grid, y, name)
    if repair and geometry.find_intersections(shape):
        shape = geometry.remove_intersections(shape, neighborhood, smooth_window, max_passes)
    return shape


def validate(w, mode: str = "dbm", eps: float = EPS_NORM) -> list[Violation]:
    """Constraint violations of ``w`` for the given mode; empty means valid."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    w = np.asarray(w, dtype=float)
    out = []
    for n, v in enumerate(w, start=1):
        if not np.isfinite(v):
            out.append(Violation("non_finite", f"w{n} is not finite", n))
        elif v < -1.0 or v > 1.0:
            out.append(Violation("bound", f"w{n} = {v:g} outside [-1, 1]", n))
        if mode == "dbm_i" and v < 0:
            out.append(Violation("sign", f"w{n} = {v:g} is negative in interpolation-only mode", n))
    if abs(w.sum()) <= eps:
        out.append(Violation("degenerate_sum", f"degenerate sum: |sum(w)| = {abs(w.sum()):.3g} <= {eps}"))
    return out


def bounds(n: int, mode: str = "dbm") -> np.ndarray:
    """(n, 2) box of the weight space for ``mode``."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    lo = 0.0 if mode == "dbm_i" else -1.0
    return np.tile([lo, 1.0], (n, 1))


def random_weights(rng_seed: int, mode: str = "dbm", n: int = 25) -> np.ndarray:
    """Uniform sample of the mode's weight box, deterministic in ``rng_seed``."""
    box = bounds(n, mode)
    rng = np.random.default_rng(rng_seed)
    return rng.uniform(box[:, 0], box[:, 1])


def unit_weights(n: int, index: int) -> np.ndarray:
    w = np.zeros(n)
    w[index] = 1.0
    return w


# --------------------------------------------------------------------------
# weight files
# --------------------------------------------------------------------------


def read_weights(path) -> np.ndarray:
    """Weight rows from a CSV (one row of floats per vector) or a JSON array."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        data = json.loads(text)
        arr = np.array(data, dtype=float)
        return np.atleast_2d(arr)
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    parsed = []
    for r in rows:
        try:
            parsed.append([float(c) for c in r])
        except ValueError:
            if parsed:
                raise
            continue  # header row
    return np.array(parsed, dtype=float)


def write_weights_csv(W) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in np.atleast_2d(W):
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()
