"""Finite-difference backward Fokker-Planck operator with reflecting walls.

The generator of ``dx = -grad(2U) dt + sqrt(2D) dW`` is

    H psi = D lap(psi) - 2 grad(U) . grad(psi)
          = D exp(2U/D) div(exp(-2U/D) grad(psi)),

and it is the second (flux) form that is discretized here. Nodes sit at cell
centres of a uniform tensor grid; a face between two active cells carries the
weight ``exp(-(U_b - U_a)/D) * D / h**2`` from ``a`` to ``b``, which is a
second-order central scheme for both the Laplacian and the drift. Faces to
inactive cells or to the outside carry nothing: this is the mirrored ghost
node condition ``d psi / dn = 0`` on the cell face.

Because ``exp(-2U_a/D) H_ab`` is symmetric in ``(a, b)``, conjugating by
``exp(-U/D)`` gives a symmetric matrix and a symmetric eigensolver applies.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg

from .errors import DiffmapError, GridError, ParseError, RangeError, SolverError
from .geometry import Dumbbell
from .spectral import SpectralDecomposition, sign_anchor

__all__ = [
    "Potential",
    "const",
    "double_well",
    "harmonic",
    "table",
    "parse_potential",
    "PotentialGrid",
    "FPOperator",
    "FPSpectrum",
    "SpectrumComparison",
    "discretize_fp",
    "fp_eigenpairs",
    "compare_spectra",
    "dumbbell_grid",
]

MIN_NODES = 16
DENSE_LIMIT = 3000


# --- potentials ------------------------------------------------------------


@dataclass(frozen=True)
class Potential:
    """Closed-form potential ``U`` with its gradient.

    ``value`` maps an array of shape ``(..., p)`` to ``(...)`` and
    ``gradient`` maps it to ``(..., p)``.
    """

    name: str
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x):
        return self.value(np.asarray(x, dtype=float))

    def grad(self, x):
        return self.gradient(np.asarray(x, dtype=float))


def const(c: float = 0.0) -> Potential:
    return Potential(
        f"const:{c:g}",
        lambda x: np.full(x.shape[:-1], float(c)),
        lambda x: np.zeros_like(x),
    )


def double_well(a: float = 1.0, b: float = 1.0) -> Potential:
    """``U = a (x0**2 - b**2)**2``; minima at ``x0 = +-b``, barrier height ``a b**4``."""

    def value(x):
        return a * (x[..., 0] ** 2 - b**2) ** 2

    def gradient(x):
        g = np.zeros_like(x)
        g[..., 0] = 4 * a * x[..., 0] * (x[..., 0] ** 2 - b**2)
        return g

    return Potential(f"double_well:{a:g},{b:g}", value, gradient)


def harmonic(k: float = 1.0) -> Potential:
    return Potential(
        f"harmonic:{k:g}",
        lambda x: 0.5 * k * np.sum(x * x, axis=-1),
        lambda x: k * x,
    )


def table(xs: Sequence[float], us: Sequence[float], name: str = "table") -> Potential:
    """Piecewise-linear 1-D potential through the points ``(xs, us)``."""
    xs = np.asarray(xs, dtype=float)
    us = np.asarray(us, dtype=float)
    if xs.ndim != 1 or xs.shape != us.shape or xs.size < 2:
        raise DiffmapError("potential table needs matching 1-D x and U columns")
    order = np.argsort(xs)
    xs, us = xs[order], us[order]
    if np.any(np.diff(xs) <= 0):
        raise DiffmapError("potential table x values must be distinct")
    slopes = np.diff(us) / np.diff(xs)

    def value(x):
        return np.interp(x[..., 0], xs, us)

    def gradient(x):
        seg = np.clip(np.searchsorted(xs, x[..., 0], side="right") - 1, 0, slopes.size - 1)
        g = np.zeros_like(x)
        g[..., 0] = slopes[seg]
        return g

    return Potential(name, value, gradient)


def _load_table(path: str) -> Potential:
    xs, us = [], []
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 3:
        raise ParseError("potential table needs a header and at least two rows")
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ParseError("expected two columns (x, U)", row=r)
        try:
            xs.append(float(row[0]))
            us.append(float(row[1]))
        except ValueError as exc:
            raise ParseError(str(exc), row=r) from None
    return table(xs, us, name=f"table:{os.path.basename(path)}")


def parse_potential(spec: str) -> Potential:
    """``const[:c]``, ``double_well[:a,b]``, ``harmonic[:k]`` or a CSV path of ``(x, U)``."""
    name, _, args = spec.partition(":")
    builders = {"const": const, "double_well": double_well, "harmonic": harmonic}
    if name in builders:
        params = [float(a) for a in args.split(",")] if args else []
        return builders[name](*params)
    if os.path.exists(spec):
        return _load_table(spec)
    raise DiffmapError(f"unknown potential {spec!r}")


# --- grid and operator -----------------------------------------------------


@dataclass(frozen=True)
class PotentialGrid:
    """Potential sampled at the cell centres of a uniform 1-D or 2-D grid.

    ``axes`` holds one ``(lo, hi, nodes)`` triple per dimension. ``mask``
    marks active cells (all cells when omitted); the operator lives on the
    active cells only and the mask boundary is reflecting.
    """

    axes: tuple
    U: np.ndarray
    mask: Optional[np.ndarray] = None

    def __post_init__(self):
        axes = tuple((float(lo), float(hi), int(n)) for lo, hi, n in self.axes)
        if len(axes) not in (1, 2):
            raise GridError("only 1-D and 2-D grids are supported")
        for lo, hi, n in axes:
            if not hi > lo:
                raise GridError(f"degenerate axis [{lo}, {hi}]")
            if n < MIN_NODES:
                raise GridError(f"each axis needs at least {MIN_NODES} nodes")
        shape = tuple(n for _, _, n in axes)
        U = np.array(self.U, dtype=float).reshape(shape)
        mask = np.ones(shape, bool) if self.mask is None else np.array(self.mask, bool)
        if mask.shape != shape:
            raise GridError("mask shape does not match the grid")
        if not mask.any():
            raise GridError("mask has no active cells")
        if not np.all(np.isfinite(U[mask])):
            raise GridError("potential must be finite on active cells")
        U.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def from_potential(cls, potential: Potential, axes, mask_fn=None) -> "PotentialGrid":
        axes = tuple((float(lo), float(hi), int(n)) for lo, hi, n in axes)
        if any(not hi > lo for lo, hi, _ in axes):
            raise GridError("degenerate axis")
        centres = [lo + (np.arange(n) + 0.5) * (hi - lo) / n for lo, hi, n in axes]
        mesh = np.stack(np.meshgrid(*centres, indexing="ij"), axis=-1)
        mask = None if mask_fn is None else mask_fn(mesh)
        return cls(axes=axes, U=potential(mesh), mask=mask)

    @property
    def dims(self) -> int:
        return len(self.axes)

    @property
    def spacing(self) -> tuple:
        return tuple((hi - lo) / n for lo, hi, n in self.axes)

    def centres(self, axis: int = 0) -> np.ndarray:
        lo, hi, n = self.axes[axis]
        return lo + (np.arange(n) + 0.5) * (hi - lo) / n

    def active_points(self) -> np.ndarray:
        """Coordinates of active cells, shape ``(N, dims)``, in operator order."""
        mesh = np.stack(np.meshgrid(*[self.centres(a) for a in range(self.dims)], indexing="ij"), -1)
        return mesh[self.mask]

    @property
    def size(self) -> int:
        return int(self.mask.sum())


@dataclass(frozen=True)
class FPOperator:
    """Sparse discretization of the backward generator on the active cells.

    ``laplacian`` is the matching discretization of ``D * lap`` alone, so
    ``drift = matrix - laplacian`` isolates the ``-2 grad U . grad`` part.
    """

    matrix: sp.csr_matrix
    laplacian: sp.csr_matrix
    grid: PotentialGrid
    diffusion: float
    U_active: np.ndarray

    @property
    def drift(self) -> sp.csr_matrix:
        return (self.matrix - self.laplacian).tocsr()

    @property
    def weights(self) -> np.ndarray:
        """Detailed-balance weights ``exp(-2U/D)`` at the active cells."""
        return np.exp(-2.0 * self.U_active / self.diffusion)

    def symmetrized(self) -> sp.csr_matrix:
        """``exp(-U/D) H exp(U/D)``, symmetric by construction."""
        s = np.exp(-self.U_active / self.diffusion)
        return (sp.diags(s) @ self.matrix @ sp.diags(1.0 / s)).tocsr()


def _face_pairs(grid: PotentialGrid):
    """Yield ``(a, b, h)`` index arrays of active neighbour pairs along each axis."""
    index = -np.ones(grid.mask.shape, dtype=np.int64)
    index[grid.mask] = np.arange(grid.size)
    for axis, h in enumerate(grid.spacing):
        lo = [slice(None)] * grid.dims
        hi = [slice(None)] * grid.dims
        lo[axis] = slice(0, -1)
        hi[axis] = slice(1, None)
        a, b = index[tuple(lo)], index[tuple(hi)]
        ok = (a >= 0) & (b >= 0)
        yield a[ok], b[ok], h


def discretize_fp(grid: PotentialGrid, diffusion: float = 1.0) -> FPOperator:
    """Assemble ``H = D lap - 2 grad U . grad`` with reflecting boundaries."""
    if not diffusion > 0:
        raise DiffmapError("diffusion coefficient must be positive")
    D = float(diffusion)
    U = grid.U[grid.mask]
    N = grid.size
    rows, cols, vals, lap_vals = [], [], [], []
    for a, b, h in _face_pairs(grid):
        c = D / h**2
        du = U[b] - U[a]
        rows += [a, b]
        cols += [b, a]
        vals += [c * np.exp(-du / D), c * np.exp(du / D)]
        lap_vals += [np.full(a.size, c), np.full(a.size, c)]
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    lap_vals = np.concatenate(lap_vals)

    def assemble(v):
        off = sp.coo_matrix((v, (rows, cols)), shape=(N, N)).tocsr()
        diag = -np.asarray(off.sum(axis=1)).ravel()
        return (off + sp.diags(diag)).tocsr()

    return FPOperator(
        matrix=assemble(vals),
        laplacian=assemble(lap_vals),
        grid=grid,
        diffusion=D,
        U_active=U,
    )


@dataclass(frozen=True)
class FPSpectrum:
    """Smallest-magnitude eigenpairs of the generator.

    ``eigenvalues`` are nonpositive and ordered by increasing magnitude;
    ``eigenfunctions`` holds one column per mode, scaled to max-abs 1 with
    the largest-magnitude entry positive.
    """

    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    points: np.ndarray

    def evaluate(self, j: int, x) -> np.ndarray:
        """Linear interpolation of eigenfunction ``j`` at 1-D locations ``x``."""
        if self.points.shape[1] != 1:
            raise DiffmapError("interpolation is implemented for 1-D grids")
        return np.interp(np.asarray(x, dtype=float).ravel(), self.points[:, 0], self.eigenfunctions[:, j])


def fp_eigenpairs(op: FPOperator, count: int) -> FPSpectrum:
    N = op.grid.size
    if not 1 <= count <= N:
        raise RangeError(f"count must be in [1, {N}]")
    S = op.symmetrized()
    S = 0.5 * (S + S.T)
    try:
        if N <= DENSE_LIMIT:
            w, v = scipy.linalg.eigh(S.toarray(), subset_by_index=[N - count, N - 1])
        else:
            # all eigenvalues are <= 0, so those nearest a small positive shift
            # are the ones of smallest magnitude
            sigma = 1e-8 * float(np.max(np.abs(S.diagonal())))
            w, v = scipy.sparse.linalg.eigsh(S.tocsc(), k=count, sigma=sigma, which="LM")
    except (np.linalg.LinAlgError, scipy.sparse.linalg.ArpackError) as exc:
        raise SolverError(str(exc)) from exc
    order = np.argsort(np.abs(w))
    w, v = w[order], v[:, order]
    psi = v * np.exp(op.U_active / op.diffusion)[:, None]
    idx = sign_anchor(psi)
    psi = psi / psi[idx, np.arange(psi.shape[1])]
    return FPSpectrum(eigenvalues=w, eigenfunctions=psi, points=op.grid.active_points())


def dumbbell_grid(geometry: Dumbbell, h: float) -> PotentialGrid:
    """Uniform-density (``U = 0``) grid on the cells whose centres lie in ``geometry``."""
    (x0, x1), (y0, y1) = geometry.bounds
    nx = int(round((x1 - x0) / h))
    ny = int(round((y1 - y0) / h))
    return PotentialGrid.from_potential(
        const(0.0), ((x0, x1, nx), (y0, y1, ny)), mask_fn=geometry.contains
    )


# --- graph versus continuum -----------------------------------------------


@dataclass(frozen=True)
class SpectrumComparison:
    """Graph rates ``(lambda_j - 1)/eps`` against generator eigenvalues ``mu_j``.

    ``ratios[j - 1] = graph_rates[j] / fp_rates[j]`` for ``j = 1..count``. A
    constant ratio across modes means the two spectra agree up to the time
    normalization of the kernel; ``fitted_constant`` is their mean and
    ``spread`` is ``max(ratios) / min(ratios) - 1``.
    """

    graph_rates: np.ndarray
    fp_rates: np.ndarray
    ratios: np.ndarray

    @property
    def fitted_constant(self) -> float:
        return float(np.mean(self.ratios))

    @property
    def spread(self) -> float:
        return float(np.max(self.ratios) / np.min(self.ratios) - 1.0)

    def mode_consistency(self, j: int) -> float:
        """``ratio_j / ratio_1``; 1 when mode ``j`` scales like mode 1."""
        return float(self.ratios[j - 1] / self.ratios[0])

    def slow_mode_count(self, threshold: float) -> int:
        """Number of graph modes (including ``j = 0``) with ``|rate| < threshold``."""
        return int(np.sum(np.abs(self.graph_rates) < threshold))

    def to_dict(self) -> dict:
        return {
            "graph_rates": [float(x) for x in self.graph_rates],
            "fp_rates": [float(x) for x in self.fp_rates],
            "ratios": [float(x) for x in self.ratios],
            "fitted_constant": self.fitted_constant,
            "spread": self.spread,
        }


def compare_spectra(decomp: SpectralDecomposition, epsilon: float, fp, count: int) -> SpectrumComparison:
    """Match the leading ``count`` nontrivial graph and generator modes."""
    mu = np.asarray(fp.eigenvalues if isinstance(fp, FPSpectrum) else fp, dtype=float)
    if count < 1 or count > decomp.m - 1 or count > mu.size - 1:
        raise RangeError(f"count {count} exceeds the available modes")
    graph = (decomp.eigenvalues[: count + 1] - 1.0) / epsilon
    fp_rates = mu[: count + 1]
    return SpectrumComparison(graph_rates=graph, fp_rates=fp_rates, ratios=graph[1:] / fp_rates[1:])
