"""Spectral-gap detection and k-means clustering in diffusion coordinates."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .diffusion import DiffusionMap
from .errors import DegenerateClusterError, DiffmapError, InsufficientSpectrumError

__all__ = [
    "GapReport",
    "ClusterResult",
    "detect_gap",
    "cluster",
    "kmeans",
    "canonical_labels",
    "permutation_accuracy",
]


@dataclass(frozen=True)
class GapReport:
    """Chosen cluster count and the eigenvalue ratios behind the choice.

    ``ratios[j - 1] = lambda_j / lambda_{j-1}`` for ``j = 1..len(ratios)``;
    ``k`` is the ``j`` with the smallest ratio.
    """

    eigenvalues: np.ndarray
    k: int
    gap_ratio: float
    ratios: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "k": int(self.k),
            "gap_ratio": float(self.gap_ratio),
            "ratios": [float(x) for x in self.ratios],
        }


@dataclass(frozen=True)
class ClusterResult:
    labels: np.ndarray
    k: int
    inertia: float
    iterations: int = 0


def detect_gap(eigenvalues, max_k: int = 10) -> GapReport:
    """Locate the sharpest relative drop ``lambda_j / lambda_{j-1}``.

    Ties go to the smallest ``j``. A nonpositive eigenvalue counts as a
    complete drop (ratio 0); ratios past it are undefined and not scanned.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size < 3:
        raise InsufficientSpectrumError("need at least three eigenvalues to locate a gap")
    if np.any(np.diff(lam) > 1e-12):
        raise DiffmapError("eigenvalues must be sorted in descending order")
    if max_k < 1:
        raise DiffmapError("max_k must be at least 1")
    max_k = min(int(max_k), lam.size - 1)
    ratios = []
    for j in range(1, max_k + 1):
        if lam[j - 1] <= 0:
            break
        ratios.append(max(lam[j] / lam[j - 1], 0.0))
    ratios = np.array(ratios)
    k = int(np.argmin(ratios)) + 1
    return GapReport(eigenvalues=lam.copy(), k=k, gap_ratio=float(ratios[k - 1]), ratios=ratios)


def canonical_labels(labels) -> np.ndarray:
    """Renumber clusters in order of their first member."""
    labels = np.asarray(labels)
    _, first = np.unique(labels, return_index=True)
    order = labels[np.sort(first)]
    mapping = {old: new for new, old in enumerate(order)}
    return np.array([mapping[x] for x in labels], dtype=np.int64)


def _farthest_point_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    idx = [int(rng.integers(X.shape[0]))]
    d2 = np.sum((X - X[idx[0]]) ** 2, axis=1)
    for _ in range(1, k):
        nxt = int(np.argmax(d2))
        idx.append(nxt)
        d2 = np.minimum(d2, np.sum((X - X[nxt]) ** 2, axis=1))
    return X[idx].copy()


def _assign(X, centers):
    d2 = np.zeros((X.shape[0], centers.shape[0]))
    for c in range(centers.shape[0]):
        diff = X - centers[c]
        d2[:, c] = np.sum(diff * diff, axis=1)
    labels = np.argmin(d2, axis=1)
    return labels, d2


def kmeans(X, k: int, seed: int = 0, max_iter: int = 500, rtol: float = 1e-10) -> ClusterResult:
    """Lloyd's algorithm from a seeded farthest-point start."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if k < 1:
        raise DiffmapError("k must be positive")
    n_distinct = np.unique(X, axis=0).shape[0]
    if k > n_distinct:
        raise DegenerateClusterError(f"cannot form {k} clusters from {n_distinct} distinct rows")
    rng = np.random.default_rng(seed)
    centers = _farthest_point_init(X, k, rng)
    inertia = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        labels, d2 = _assign(X, centers)
        for c in range(k):
            members = labels == c
            if not members.any():
                # re-seed an empty cluster at the point worst served by its center
                far = int(np.argmax(d2[np.arange(X.shape[0]), labels]))
                labels[far] = c
                members = labels == c
            centers[c] = X[members].mean(axis=0)
        labels, d2 = _assign(X, centers)
        new_inertia = float(np.sum(d2[np.arange(X.shape[0]), labels]))
        converged = abs(inertia - new_inertia) <= rtol * max(new_inertia, 1e-300)
        inertia = new_inertia
        if converged:
            break
    return ClusterResult(labels=canonical_labels(labels), k=k, inertia=inertia, iterations=it)


def cluster(dmap, k: int, seed: int = 0) -> ClusterResult:
    """k-means on the rows of a :class:`DiffusionMap` (or a raw coordinate array)."""
    if k < 2:
        raise DiffmapError("clustering needs k >= 2")
    coords = dmap.coords if isinstance(dmap, DiffusionMap) else dmap
    return kmeans(coords, k, seed=seed)


def permutation_accuracy(labels, truth) -> float:
    """Best agreement over all relabelings of ``labels`` (exhaustive matching)."""
    labels = np.asarray(labels)
    truth = np.asarray(truth)
    ours = np.unique(labels)
    theirs = np.unique(truth)
    best = 0
    targets = list(theirs) + [None] * max(0, len(ours) - len(theirs))
    for perm in itertools.permutations(targets, len(ours)):
        hits = sum(np.sum((labels == a) & (truth == b)) for a, b in zip(ours, perm) if b is not None)
        best = max(best, int(hits))
    return best / labels.size
