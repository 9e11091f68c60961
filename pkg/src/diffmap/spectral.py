"""Eigendecomposition of a random-walk matrix through its symmetric conjugate.

The Markov matrix ``M = D^-1 L`` is similar to the symmetric matrix
``M_s = D^{1/2} M D^{-1/2}``. With ``v_j`` the orthonormal eigenvectors of
``M_s`` the left and right eigenvectors of ``M`` are

    phi_j = v_j * sqrt(d) / s,    psi_j = v_j * s / sqrt(d),    s = sqrt(sum(d))

which makes the pairs bi-orthonormal, ``psi_0 == 1`` and ``phi_0 = d / sum(d)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .errors import (
    DiffmapError,
    NegativeEigenvalueError,
    ReducibleGraphError,
    SolverError,
    TruncationWarning,
)
from .kernel_graph import MarkovMatrix

__all__ = [
    "SpectralDecomposition",
    "decompose",
    "stationary_distribution",
    "transition_probability",
    "eigenvalue_powers",
    "DENSE_LIMIT",
    "REDUCIBLE_TOL",
]

DENSE_LIMIT = 2000
REDUCIBLE_TOL = 1e-8


@dataclass(frozen=True)
class SpectralDecomposition:
    """Top ``m`` eigenpairs of a Markov matrix.

    Columns of ``right_vectors`` are the ``psi_j`` and columns of
    ``left_vectors`` the ``phi_j``; ``eigenvalues`` is sorted descending.
    ``markov`` keeps the source matrix so direct (non-spectral) checks can be
    run against the same chain.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    degrees: np.ndarray
    markov: Optional[MarkovMatrix] = None

    def __post_init__(self):
        for name in ("eigenvalues", "right_vectors", "left_vectors", "degrees"):
            a = np.array(getattr(self, name), dtype=float, copy=True)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def n(self) -> int:
        return self.right_vectors.shape[0]

    @property
    def m(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def is_full(self) -> bool:
        return self.m == self.n

    def biorthogonality_error(self) -> float:
        g = self.left_vectors.T @ self.right_vectors
        return float(np.max(np.abs(g - np.eye(self.m))))


def sign_anchor(vectors: np.ndarray, rtol: float = 1e-8) -> np.ndarray:
    """Row index of the largest-magnitude entry of each column.

    Entries within ``rtol`` of the column maximum count as tied and the
    lowest index wins, so symmetric vectors get the same anchor whatever the
    rounding noise.
    """
    a = np.abs(vectors)
    return np.argmax(a >= (1.0 - rtol) * a.max(axis=0), axis=0)


def _fix_signs(psi: np.ndarray) -> np.ndarray:
    # largest-|entry| of each column positive
    idx = sign_anchor(psi)
    signs = np.sign(psi[idx, np.arange(psi.shape[1])])
    signs[signs == 0] = 1.0
    return signs


def _top_eigenpairs(ms: np.ndarray, m: int):
    n = ms.shape[0]
    if n <= DENSE_LIMIT:
        try:
            w, v = scipy.linalg.eigh(ms, subset_by_index=[n - m, n - 1])
        except np.linalg.LinAlgError as exc:
            raise SolverError(str(exc)) from exc
    else:
        try:
            w, v = scipy.sparse.linalg.eigsh(
                ms, k=m, which="LA", tol=1e-10, v0=np.ones(n), maxiter=100 * n
            )
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            raise SolverError(f"Lanczos iteration did not converge: {exc}") from exc
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def decompose(markov: MarkovMatrix, m: Optional[int] = None) -> SpectralDecomposition:
    """Top-``m`` eigendecomposition of ``markov`` (all ``n`` when ``m`` is None).

    Raises
    ------
    ReducibleGraphError
        If the second eigenvalue exceeds ``1 - 1e-8``, i.e. the graph is
        effectively disconnected.
    SolverError
        If the eigensolver fails or the top eigenvalue is not 1.
    """
    n = markov.n
    m = n if m is None else int(m)
    if not 1 <= m <= n:
        raise DiffmapError(f"number of eigenpairs must be in [1, {n}], got {m}")
    d = np.asarray(markov.degrees, dtype=float)
    w, v = _top_eigenpairs(markov.symmetric(), max(m, min(2, n)))

    if abs(w[0] - 1.0) > 1e-10:
        raise SolverError(f"leading eigenvalue {w[0]!r} differs from 1")
    if w.size > 1 and w[1] > 1.0 - REDUCIBLE_TOL:
        raise ReducibleGraphError(
            f"second eigenvalue {w[1]!r} is numerically 1; the graph is disconnected"
        )
    w, v = w[:m], v[:, :m]

    sqrt_d = np.sqrt(d)
    scale = np.sqrt(d.sum())
    psi = v / sqrt_d[:, None] * scale
    phi = v * sqrt_d[:, None] / scale
    signs = _fix_signs(psi)
    return SpectralDecomposition(
        eigenvalues=w,
        right_vectors=psi * signs,
        left_vectors=phi * signs,
        degrees=d,
        markov=markov,
    )


def stationary_distribution(decomp: SpectralDecomposition) -> np.ndarray:
    """The left eigenvector ``phi_0``: stationary law of the walk on the graph.

    Proportional to the degrees, so for a Gaussian kernel it is also the
    Parzen window density estimate at each point.
    """
    return decomp.left_vectors[:, 0].copy()


def eigenvalue_powers(eigenvalues, t) -> np.ndarray:
    """``lambda_j ** t``; real ``t`` is rejected when any eigenvalue is negative."""
    lam = np.asarray(eigenvalues, dtype=float)
    if t < 0:
        raise DiffmapError("time must be nonnegative")
    if float(t).is_integer():
        return np.power(lam, int(t))
    if np.any(lam < 0):
        raise NegativeEigenvalueError("non-integer time with negative eigenvalues is undefined")
    return np.power(lam, float(t))


def transition_probability(decomp: SpectralDecomposition, i: int, steps: int) -> np.ndarray:
    """Distribution ``p(t, . | x_i)`` after ``steps`` steps of the walk.

    Reconstructed from the eigenbasis; exact (up to rounding) only when the
    decomposition is full, otherwise a ``TruncationWarning`` is issued.
    """
    n = decomp.n
    if not 0 <= i < n:
        raise DiffmapError(f"point index {i} out of range")
    if steps < 0:
        raise DiffmapError("steps must be nonnegative")
    if steps == 0:
        e = np.zeros(n)
        e[i] = 1.0
        return e
    if not decomp.is_full:
        warnings.warn(
            f"reconstruction from {decomp.m} of {n} eigenpairs is truncated",
            TruncationWarning,
            stacklevel=2,
        )
    coeff = eigenvalue_powers(decomp.eigenvalues, steps) * decomp.right_vectors[i]
    coeff[0] = 1.0
    return decomp.left_vectors @ coeff
