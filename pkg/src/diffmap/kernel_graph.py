"""Gaussian affinity graphs and their random-walk (Markov) normalization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DegenerateDegreeError,
    DiffmapError,
    IsolatedPointError,
    ZeroScaleError,
)

__all__ = [
    "PointCloud",
    "KernelConfig",
    "AffinityGraph",
    "MarkovMatrix",
    "squared_distances",
    "build_affinity",
    "normalize_markov",
    "select_epsilon",
    "markov_from_cloud",
]


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PointCloud:
    """``n`` points in ``p`` dimensions, optionally with integer labels."""

    points: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise DiffmapError("points must be an n x p array")
        if pts.shape[0] < 2:
            raise DiffmapError("a point cloud needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise DiffmapError("point coordinates must be finite")
        object.__setattr__(self, "points", _frozen(pts))
        if self.labels is not None:
            lab = np.asarray(self.labels)
            if lab.shape != (pts.shape[0],):
                raise DiffmapError("labels must have one entry per point")
            object.__setattr__(self, "labels", _frozen(lab, dtype=np.int64))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def p(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class KernelConfig:
    """Kernel parameters.

    ``epsilon`` is both the squared length scale of the Gaussian kernel and
    the time step of the induced random walk. For ``family="self_tuning"``
    the global ``epsilon`` is replaced by ``sigma_i * sigma_j`` where
    ``sigma_i`` is the distance from point ``i`` to its
    ``self_tuning_k``-th nearest neighbour.
    """

    epsilon: float = 1.0
    family: str = "gaussian"
    self_tuning_k: int = 7
    sparsify_tol: float = 0.0

    def __post_init__(self):
        if self.family not in ("gaussian", "self_tuning"):
            raise DiffmapError(f"unknown kernel family {self.family!r}")
        if not (self.epsilon > 0 and np.isfinite(self.epsilon)):
            raise DiffmapError("epsilon must be positive")
        if not (0.0 <= self.sparsify_tol < 1.0):
            raise DiffmapError("sparsify_tol must lie in [0, 1)")
        if int(self.self_tuning_k) < 1:
            raise DiffmapError("self_tuning_k must be a positive integer")


@dataclass(frozen=True)
class AffinityGraph:
    L: np.ndarray
    degrees: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "L", _frozen(self.L))
        object.__setattr__(self, "degrees", _frozen(self.degrees))

    @property
    def n(self) -> int:
        return self.L.shape[0]


@dataclass(frozen=True)
class MarkovMatrix:
    """Row-stochastic matrix ``M = D^-1 L`` together with the degrees ``D``."""

    M: np.ndarray
    degrees: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "M", _frozen(self.M))
        object.__setattr__(self, "degrees", _frozen(self.degrees))

    @property
    def n(self) -> int:
        return self.M.shape[0]

    def symmetric(self) -> np.ndarray:
        """Return the conjugate ``D^{1/2} M D^{-1/2}``, symmetrized exactly."""
        s = np.sqrt(self.degrees)
        ms = s[:, None] * self.M / s[None, :]
        return 0.5 * (ms + ms.T)


def squared_distances(points) -> np.ndarray:
    """Dense matrix of squared Euclidean distances, accumulated per coordinate.

    Each entry is formed as ``sum_k (x_ik - x_jk)**2`` so the result is
    exactly symmetric with an exactly zero diagonal.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    d2 = np.zeros((x.shape[0], x.shape[0]))
    for k in range(x.shape[1]):
        diff = x[:, None, k] - x[None, :, k]
        d2 += diff * diff
    return d2


def _knn_distances(d2: np.ndarray, k: int) -> np.ndarray:
    # column 0 of the sorted rows is the point itself
    n = d2.shape[0]
    k = min(int(k), n - 1)
    return np.sqrt(np.sort(d2, axis=1)[:, k])


def build_affinity(cloud: PointCloud, config: KernelConfig) -> AffinityGraph:
    """Pairwise kernel matrix ``L`` and degree vector of a point cloud."""
    d2 = squared_distances(cloud.points)
    if config.family == "gaussian":
        L = np.exp(-d2 / (2.0 * config.epsilon))
    else:
        sigma = _knn_distances(d2, config.self_tuning_k)
        if np.any(sigma <= 0):
            bad = int(np.flatnonzero(sigma <= 0)[0])
            raise ZeroScaleError(
                f"point {bad} has {config.self_tuning_k} coincident neighbours; "
                "local scale is zero"
            )
        L = np.exp(-d2 / (2.0 * np.outer(sigma, sigma)))
    if config.sparsify_tol > 0:
        L[L < config.sparsify_tol] = 0.0
        L = np.maximum(L, L.T)
    degrees = L.sum(axis=1)
    zero = np.flatnonzero(degrees <= 0)
    if zero.size:
        raise IsolatedPointError(zero[0])
    return AffinityGraph(L=L, degrees=degrees)


def normalize_markov(graph: AffinityGraph) -> MarkovMatrix:
    d = np.asarray(graph.degrees, dtype=float)
    if np.any(~(d > 0)):
        bad = int(np.flatnonzero(~(d > 0))[0])
        raise DegenerateDegreeError(f"degree of point {bad} is not positive")
    return MarkovMatrix(M=graph.L / d[:, None], degrees=d)


def select_epsilon(cloud: PointCloud, rule: str = "median_sqdist", k: int = 7) -> float:
    """Data-driven kernel scale.

    Parameters
    ----------
    rule : {"median_sqdist", "knn_scale"}
        ``median_sqdist`` is the median over all ``n(n-1)/2`` squared pairwise
        distances; ``knn_scale`` is the mean squared distance to the ``k``-th
        nearest neighbour.
    """
    d2 = squared_distances(cloud.points)
    if rule == "median_sqdist":
        iu = np.triu_indices(cloud.n, k=1)
        eps = float(np.median(d2[iu]))
    elif rule == "knn_scale":
        eps = float(np.mean(_knn_distances(d2, k) ** 2))
    else:
        raise DiffmapError(f"unknown epsilon rule {rule!r}")
    if not eps > 0:
        raise ZeroScaleError("points are coincident; cannot derive a kernel scale")
    return eps


def markov_from_cloud(cloud: PointCloud, config: KernelConfig) -> MarkovMatrix:
    return normalize_markov(build_affinity(cloud, config))
