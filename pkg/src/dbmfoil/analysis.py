"""PCA and k-means over sets of optimal weight vectors.

Clustering works in the raw weight space. The baselines need not be linearly
independent, so distances between weight vectors are only a proxy for
distances between shapes.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from . import morph
from .errors import ContractError
from .geometry import CollocatedAirfoil


@dataclass(frozen=True)
class PcaResult:
    mean: np.ndarray
    axes: np.ndarray  # (d, d), row i is axis i
    explained_variance: np.ndarray
    explained_variance_ratio: np.ndarray | None  # None when every point is identical

    @property
    def degenerate(self) -> bool:
        return self.explained_variance_ratio is None

    def project(self, points, n_axes: int | None = None) -> np.ndarray:
        X = np.atleast_2d(np.asarray(points, dtype=float)) - self.mean
        return X @ self.axes[:n_axes].T

    def reconstruct(self, coords) -> np.ndarray:
        coords = np.atleast_2d(coords)
        return self.mean + coords @ self.axes[: coords.shape[1]]

    def to_json(self) -> str:
        ratio = None if self.degenerate else [float(v) for v in self.explained_variance_ratio]
        return json.dumps({
            "mean": [float(v) for v in self.mean],
            "axes": [[float(v) for v in a] for a in self.axes],
            "explained_variance": [float(v) for v in self.explained_variance],
            "explained_variance_ratio": ratio,
        }, indent=1)


def pca(points) -> PcaResult:
    """Eigen-decomposition of the sample covariance, axes in descending variance.

    Each axis is signed so its largest-magnitude component is positive.
    """
    X = np.atleast_2d(np.asarray(points, dtype=float))
    n, d = X.shape
    if n < 2 or d < 1:
        raise ContractError("PCA needs at least two points of dimension >= 1")
    mean = X.mean(axis=0)
    C = np.cov(X - mean, rowvar=False, ddof=1).reshape(d, d)
    vals, vecs = np.linalg.eigh(C)
    order = np.argsort(vals, kind="stable")[::-1]
    vals = np.clip(vals[order], 0.0, None)
    axes = vecs[:, order].T.copy()
    for a in axes:
        if a[np.argmax(np.abs(a))] < 0:
            a *= -1.0
    total = vals.sum()
    ratio = vals / total if total > 0 else None
    return PcaResult(mean, axes, vals, ratio)


@dataclass(frozen=True)
class Clustering:
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    history: tuple[float, ...] = ()

    @property
    def k(self) -> int:
        return len(self.centroids)


def _inertia(X, C, labels) -> float:
    return float(np.sum((X - C[labels]) ** 2))


def _assign(X, C):
    d2 = ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)


def _plus_plus(X, k, rng) -> np.ndarray:
    centers = [X[rng.integers(len(X))]]
    for _ in range(1, k):
        d2 = np.min(((X[:, None, :] - np.array(centers)[None]) ** 2).sum(axis=2), axis=1)
        if d2.sum() == 0:
            centers.append(X[rng.integers(len(X))])
        else:
            centers.append(X[rng.choice(len(X), p=d2 / d2.sum())])
    return np.array(centers)


def _lloyd(X, C, max_iter, tol):
    labels = _assign(X, C)
    hist = [_inertia(X, C, labels)]
    for _ in range(max_iter):
        newC = C.copy()
        for j in range(len(C)):
            members = X[labels == j]
            if len(members):
                newC[j] = members.mean(axis=0)
        new_labels = _assign(X, newC)
        hist.append(_inertia(X, newC, new_labels))
        C, labels = newC, new_labels
        if hist[-2] - hist[-1] < tol:
            break
    return labels, C, hist


def kmeans(points, k: int, seed: int, restarts: int = 10, max_iter: int = 300, tol: float = 1e-10) -> Clustering:
    """k-means++ seeded Lloyd iteration; the restart with the lowest inertia wins."""
    X = np.atleast_2d(np.asarray(points, dtype=float))
    if k < 1:
        raise ContractError("k must be at least 1")
    if k > len(np.unique(X, axis=0)):
        raise ContractError(f"k = {k} exceeds the number of distinct points")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        labels, C, hist = _lloyd(X, _plus_plus(X, k, rng), max_iter, tol)
        if best is None or hist[-1] < best.inertia:
            best = Clustering(labels, C, hist[-1], tuple(hist))
    return best


@dataclass(frozen=True)
class ClusterMeans:
    means: list[np.ndarray | None]  # None for an empty cluster
    sizes: list[int]
    total: np.ndarray


def cluster_mean_weights(genomes, clustering: Clustering) -> ClusterMeans:
    X = np.atleast_2d(np.asarray(genomes, dtype=float))
    if len(X) != len(clustering.assignments):
        raise ContractError("clustering does not match the genome set")
    means, sizes = [], []
    for j in range(clustering.k):
        members = X[clustering.assignments == j]
        sizes.append(len(members))
        means.append(members.mean(axis=0) if len(members) else None)
    return ClusterMeans(means, sizes, X.mean(axis=0))


def pca_axis_weights(result: PcaResult, axis: int, scale: float) -> np.ndarray:
    if not 0 <= axis < len(result.axes):
        raise ContractError(f"axis {axis} out of range")
    return result.mean + scale * result.axes[axis]


def pca_axis_shape(b: morph.BaselineSet, result: PcaResult, axis: int, scale: float,
                   repair: bool = True) -> CollocatedAirfoil:
    """Morph of ``mean + scale * axis`` in weight space."""
    w = pca_axis_weights(result, axis, scale)
    return morph.morph(b, w, repair=repair, name=f"pca{axis + 1}{scale:+g}")


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------


def assignments_csv(clustering: Clustering) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["genome_id", "cluster"])
    for i, c in enumerate(clustering.assignments):
        w.writerow([i, int(c)])
    return buf.getvalue()


def scatter_csv(result: PcaResult, genomes, clustering: Clustering) -> str:
    P = result.project(genomes, 2)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pc1", "pc2", "cluster"])
    for (p1, *rest), c in zip(P, clustering.assignments):
        w.writerow([repr(float(p1)), repr(float(rest[0])) if rest else "0.0", int(c)])
    return buf.getvalue()


def cluster_means_csv(cm: ClusterMeans) -> str:
    d = len(cm.total)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["group", "size", *[f"w{i + 1}" for i in range(d)]])
    for j, (m, s) in enumerate(zip(cm.means, cm.sizes)):
        w.writerow([f"cluster{j}", s, *(["" for _ in range(d)] if m is None else [repr(float(v)) for v in m])])
    w.writerow(["total", sum(cm.sizes), *[repr(float(v)) for v in cm.total]])
    return buf.getvalue()
