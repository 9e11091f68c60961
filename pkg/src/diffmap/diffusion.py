"""Diffusion maps, diffusion distances and truncated transition kernels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DiffmapError, DimensionError, UndefinedRatioError
from .kernel_graph import squared_distances
from .spectral import SpectralDecomposition, eigenvalue_powers

__all__ = [
    "DiffusionMap",
    "TruncatedKernel",
    "diffusion_map",
    "diffusion_distance",
    "diffusion_distance_matrix",
    "transition_matrix_power",
    "truncated_kernel",
    "truncation_error_ratio",
    "truncation_mse",
    "basis_fit_mse",
]


@dataclass(frozen=True)
class DiffusionMap:
    """Row ``i`` of ``coords`` is ``(lambda_j**t * psi_j(x_i))`` for ``j = 1..k``."""

    t: float
    k: int
    coords: np.ndarray
    eigenvalues: np.ndarray

    def __post_init__(self):
        for name in ("coords", "eigenvalues"):
            a = np.array(getattr(self, name), dtype=float, copy=True)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def n(self) -> int:
        return self.coords.shape[0]


def _check_rank(decomp: SpectralDecomposition, k: int):
    if not 1 <= k <= decomp.m - 1:
        raise DimensionError(f"k must lie in [1, {decomp.m - 1}], got {k}")


def diffusion_map(decomp: SpectralDecomposition, t: float = 1, k: int = 2) -> DiffusionMap:
    _check_rank(decomp, k)
    lam = decomp.eigenvalues[1 : k + 1]
    coords = decomp.right_vectors[:, 1 : k + 1] * eigenvalue_powers(lam, t)
    return DiffusionMap(t=t, k=k, coords=coords, eigenvalues=decomp.eigenvalues[: k + 1])


@dataclass(frozen=True)
class TruncatedKernel:
    """Rank-``k`` approximation of the ``t``-step transition kernel."""

    decomp: SpectralDecomposition
    k: int
    t: float

    def __post_init__(self):
        _check_rank(self.decomp, self.k)

    def __call__(self, i: int) -> np.ndarray:
        return truncated_kernel(self.decomp, self.k, self.t, i)

    def matrix(self) -> np.ndarray:
        """All rows ``p_hat(t, . | x_i)`` stacked into an ``n x n`` array."""
        d = self.decomp
        lam_t = eigenvalue_powers(d.eigenvalues[1 : self.k + 1], self.t)
        psi = d.right_vectors[:, 1 : self.k + 1] * lam_t
        return d.left_vectors[:, 0][None, :] + psi @ d.left_vectors[:, 1 : self.k + 1].T


def truncated_kernel(decomp: SpectralDecomposition, k: int, t: float, i: int) -> np.ndarray:
    """``phi_0 + sum_{j<=k} lambda_j**t psi_j(x_i) phi_j`` (entries are not clipped)."""
    _check_rank(decomp, k)
    if not 0 <= i < decomp.n:
        raise DiffmapError(f"point index {i} out of range")
    lam_t = eigenvalue_powers(decomp.eigenvalues[1 : k + 1], t)
    coeff = lam_t * decomp.right_vectors[i, 1 : k + 1]
    return decomp.left_vectors[:, 0] + decomp.left_vectors[:, 1 : k + 1] @ coeff


def transition_matrix_power(decomp: SpectralDecomposition, t: int) -> np.ndarray:
    """``M**t`` by repeated multiplication of the stored Markov matrix."""
    if decomp.markov is None:
        raise DiffmapError("decomposition does not carry its Markov matrix")
    if int(t) != t or t < 0:
        raise DiffmapError("direct evaluation needs a nonnegative integer time")
    return np.linalg.matrix_power(np.asarray(decomp.markov.M), int(t))


def _stationary_from_degrees(decomp: SpectralDecomposition) -> np.ndarray:
    d = decomp.degrees
    return d / d.sum()


def diffusion_distance(
    decomp: SpectralDecomposition,
    i: int,
    j: int,
    t: float = 1,
    method: str = "spectral",
    squared: bool = False,
) -> float:
    """Diffusion distance ``D_t(x_i, x_j)``.

    ``method="direct"`` sums ``(p(t,y|x_i) - p(t,y|x_j))**2 / phi_0(y)`` over
    the rows of the powered Markov matrix; ``method="spectral"`` sums
    ``lambda_l**(2t) (psi_l(x_i) - psi_l(x_j))**2`` over the nontrivial
    eigenpairs held by ``decomp``.
    """
    n = decomp.n
    if not (0 <= i < n and 0 <= j < n):
        raise DiffmapError("point index out of range")
    if i == j:
        return 0.0
    if method == "direct":
        if decomp.markov is None:
            raise DiffmapError("direct method needs the Markov matrix")
        if int(t) != t:
            raise DiffmapError("direct method is defined for integer t only")
        M = np.asarray(decomp.markov.M)
        e = np.zeros((2, n))
        e[0, i] = e[1, j] = 1.0
        for _ in range(int(t)):
            e = e @ M
        diff = e[0] - e[1]
        d2 = float(np.sum(diff * diff / _stationary_from_degrees(decomp)))
    elif method == "spectral":
        lam_t = eigenvalue_powers(decomp.eigenvalues[1:], t)
        diff = (decomp.right_vectors[i, 1:] - decomp.right_vectors[j, 1:]) * lam_t
        d2 = float(np.sum(diff * diff))
    else:
        raise DiffmapError(f"unknown method {method!r}")
    return d2 if squared else float(np.sqrt(d2))


def diffusion_distance_matrix(
    decomp: SpectralDecomposition, t: float = 1, method: str = "spectral", squared: bool = False
) -> np.ndarray:
    """All pairwise diffusion distances, computed by either route."""
    if method == "direct":
        P = transition_matrix_power(decomp, t)
        d2 = squared_distances(P / np.sqrt(_stationary_from_degrees(decomp)))
    elif method == "spectral":
        lam_t = eigenvalue_powers(decomp.eigenvalues[1:], t)
        d2 = squared_distances(decomp.right_vectors[:, 1:] * lam_t)
    else:
        raise DiffmapError(f"unknown method {method!r}")
    return d2 if squared else np.sqrt(d2)


def truncation_error_ratio(decomp: SpectralDecomposition, k: int, t: float) -> float:
    """``(lambda_{k+1} / lambda_k)**t``, the decay rate of the truncation error."""
    if not 1 <= k <= decomp.m - 2:
        raise DimensionError(f"k must lie in [1, {decomp.m - 2}], got {k}")
    lam_k, lam_next = decomp.eigenvalues[k], decomp.eigenvalues[k + 1]
    if lam_k <= 0:
        raise UndefinedRatioError(f"lambda_{k} = {lam_k!r} is not positive")
    return float(eigenvalue_powers([lam_next / lam_k], t)[0])


def _weighted_mse(P: np.ndarray, P_hat: np.ndarray, pi: np.ndarray) -> float:
    r = P - P_hat
    return float(pi @ ((r * r) @ (1.0 / pi)))


def truncation_mse(decomp: SpectralDecomposition, k: int, t: int) -> float:
    """Stationary-weighted mean squared error of the rank-``k`` eigen-truncation.

    The outer average over starting points uses ``phi_0(x)``; the inner norm
    weights each target ``y`` by ``1 / phi_0(y)``.
    """
    P = transition_matrix_power(decomp, t)
    pi = _stationary_from_degrees(decomp)
    return _weighted_mse(P, TruncatedKernel(decomp, k, t).matrix(), pi)


def basis_fit_mse(decomp: SpectralDecomposition, basis: np.ndarray, t: int) -> float:
    """Weighted MSE of the best approximation ``phi_0 + sum_j a_j(x) w_j``.

    ``basis`` is ``n x k`` with the candidate ``w_j`` as columns; the
    coefficients are fitted per starting point by weighted least squares in
    the ``1 / phi_0`` norm.
    """
    P = transition_matrix_power(decomp, t)
    pi = _stationary_from_degrees(decomp)
    w = 1.0 / np.sqrt(pi)
    G = np.asarray(basis, dtype=float) * w[:, None]
    R = (P - pi[None, :]) * w[None, :]
    coef, *_ = np.linalg.lstsq(G, R.T, rcond=None)
    P_hat = pi[None, :] + (np.asarray(basis) @ coef).T
    return _weighted_mse(P, P_hat, pi)
