"""Euler-Maruyama simulation of overdamped Langevin dynamics and exit times.

The process is ``dx = -grad(2U) dt + sqrt(2D) dW`` inside a box with
reflecting walls. Trials draw from independent streams seeded by
``(seed, trial_index)``, so estimates do not depend on how trials are batched.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.optimize

from .errors import DiffmapError, StepSizeError, TruncatedSampleWarning
from .fokker_planck import Potential

__all__ = [
    "Box",
    "LangevinConfig",
    "Trajectory",
    "ExitTimeEstimate",
    "check_step_size",
    "simulate",
    "mean_exit_time",
    "well_minimum",
]

_BLOCK = 1024
QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)


@dataclass(frozen=True)
class Box:
    """Axis-aligned closed box ``lo <= x <= hi`` (one entry per coordinate)."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        if len(lo) != len(hi) or any(h < l for l, h in zip(lo, hi)):
            raise DiffmapError("box bounds must satisfy lo <= hi coordinate-wise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return len(self.lo)

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.all((x >= np.array(self.lo)) & (x <= np.array(self.hi)), axis=-1)

    def disjoint(self, other: "Box") -> bool:
        return any(h1 < l2 or h2 < l1 for l1, h1, l2, h2 in zip(self.lo, self.hi, other.lo, other.hi))


@dataclass(frozen=True)
class LangevinConfig:
    diffusion_D: float = 1.0
    dt: float = 1e-3
    max_steps: int = 1_000_000
    seed: int = 0
    domain: Box = field(default_factory=lambda: Box((-2.0,), (2.0,)))

    def __post_init__(self):
        if not isinstance(self.domain, Box):
            lo, hi = self.domain
            object.__setattr__(self, "domain", Box(lo, hi))
        if self.diffusion_D < 0:
            raise DiffmapError("diffusion coefficient must be nonnegative")
        if not self.dt > 0:
            raise DiffmapError("time step must be positive")
        if self.max_steps < 1:
            raise DiffmapError("max_steps must be positive")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    positions: np.ndarray


@dataclass(frozen=True)
class ExitTimeEstimate:
    mean: float
    std_error: float
    samples: int
    quantiles: dict
    truncated: int = 0
    times: np.ndarray = field(default=None, repr=False)

    @property
    def cv(self) -> float:
        """Coefficient of variation; 1 for an exponential law."""
        return float(np.std(self.times, ddof=1) / np.mean(self.times))

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "samples": self.samples,
            "truncated": self.truncated,
            "cv": self.cv if self.samples > 1 else None,
            "quantiles": {f"{q:g}": v for q, v in self.quantiles.items()},
        }


def _grid_over(box: Box, total: int = 40_001) -> np.ndarray:
    per = max(2, int(round(total ** (1.0 / box.dim))))
    axes = [np.linspace(l, h, per) for l, h in zip(box.lo, box.hi)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, box.dim)


def check_step_size(potential: Potential, config: LangevinConfig) -> float:
    """Return ``dt * max |grad(2U)|`` over the domain; raise if it is not below 0.5."""
    g = potential.grad(_grid_over(config.domain))
    worst = float(config.dt * np.max(np.linalg.norm(2.0 * g, axis=-1)))
    if not worst < 0.5:
        raise StepSizeError(f"dt * max|grad 2U| = {worst:.3g} violates the stability bound 0.5")
    return worst


def _reflect(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    out = (x < lo) | (x > hi)
    if not out.any():
        return x
    width = np.broadcast_to(hi - lo, x.shape)
    lo_b = np.broadcast_to(lo, x.shape)
    y = np.mod(x[out] - lo_b[out], 2.0 * width[out])
    y = np.where(y > width[out], 2.0 * width[out] - y, y)
    x = x.copy()
    x[out] = lo_b[out] + y
    return x


def simulate(
    potential: Potential,
    start,
    config: LangevinConfig,
    n_steps: Optional[int] = None,
    thin: int = 1,
) -> Trajectory:
    """One Euler-Maruyama path of ``n_steps`` steps (default ``config.max_steps``)."""
    check_step_size(potential, config)
    x = np.atleast_1d(np.asarray(start, dtype=float)).copy()
    if x.shape != (config.domain.dim,) or not config.domain.contains(x):
        raise DiffmapError("start point must lie inside the domain")
    n_steps = config.max_steps if n_steps is None else int(n_steps)
    lo, hi = np.array(config.domain.lo), np.array(config.domain.hi)
    rng = np.random.default_rng(config.seed)
    dt = config.dt
    amp = np.sqrt(2.0 * config.diffusion_D * dt)
    out = [x.copy()]
    times = [0.0]
    done = 0
    while done < n_steps:
        B = min(_BLOCK, n_steps - done)
        noise = rng.standard_normal((B, x.size))
        for b in range(B):
            x = x - 2.0 * potential.grad(x) * dt + amp * noise[b]
            x = _reflect(x, lo, hi)
            step = done + b + 1
            if step % thin == 0:
                out.append(x.copy())
                times.append(step * dt)
        done += B
    return Trajectory(times=np.array(times), positions=np.array(out))


def well_minimum(potential: Potential, region: Box) -> np.ndarray:
    """Location of the smallest value of ``potential`` within ``region``."""
    pts = _grid_over(region)
    best = pts[np.argmin(potential(pts))]
    res = scipy.optimize.minimize(
        lambda z: float(potential(z)),
        best,
        jac=lambda z: potential.grad(z),
        bounds=list(zip(region.lo, region.hi)),
        method="L-BFGS-B",
        options={"ftol": 1e-15, "gtol": 1e-12},
    )
    return res.x if potential(res.x) <= potential(best) else best


def mean_exit_time(
    potential: Potential,
    start_well: Box,
    exit_region: Box,
    config: LangevinConfig,
    trials: int = 1000,
    start=None,
) -> ExitTimeEstimate:
    """First-passage time from the bottom of ``start_well`` into ``exit_region``.

    Trajectories still running after ``config.max_steps`` are dropped from
    the average and counted in ``truncated`` (with a ``TruncatedSampleWarning``).
    """
    if trials < 1:
        raise DiffmapError("trials must be at least 1")
    if not start_well.disjoint(exit_region):
        raise DiffmapError("start well and exit region must be disjoint")
    check_step_size(potential, config)
    x0 = well_minimum(potential, start_well) if start is None else np.atleast_1d(start).astype(float)

    p = config.domain.dim
    lo, hi = np.array(config.domain.lo), np.array(config.domain.hi)
    dt = config.dt
    amp = np.sqrt(2.0 * config.diffusion_D * dt)
    rngs = [np.random.default_rng([config.seed, i]) for i in range(trials)]
    steps_taken = np.full(trials, -1, dtype=np.int64)

    active = np.arange(trials)
    x = np.tile(x0, (trials, 1))
    done = 0
    while active.size and done < config.max_steps:
        B = min(_BLOCK, config.max_steps - done)
        noise = np.stack([rngs[i].standard_normal((B, p)) for i in active], axis=1)
        xa = x[active]
        hit_at = np.full(active.size, -1, dtype=np.int64)
        for b in range(B):
            xa = xa - 2.0 * potential.grad(xa) * dt + amp * noise[b]
            xa = _reflect(xa, lo, hi)
            new = (hit_at < 0) & exit_region.contains(xa)
            hit_at[new] = done + b + 1
        x[active] = xa
        finished = hit_at >= 0
        steps_taken[active[finished]] = hit_at[finished]
        active = active[~finished]
        done += B

    ok = steps_taken >= 0
    truncated = int(trials - ok.sum())
    if truncated:
        warnings.warn(
            f"{truncated} of {trials} trajectories did not exit within {config.max_steps} steps",
            TruncatedSampleWarning,
            stacklevel=2,
        )
    if not ok.any():
        raise DiffmapError("no trajectory reached the exit region")
    times = steps_taken[ok] * dt
    mean = float(np.mean(times))
    se = float(np.std(times, ddof=1) / np.sqrt(times.size)) if times.size > 1 else 0.0
    qs = {q: float(v) for q, v in zip(QUANTILES, np.quantile(times, QUANTILES))}
    return ExitTimeEstimate(
        mean=mean, std_error=se, samples=int(times.size), quantiles=qs, truncated=truncated, times=times
    )
