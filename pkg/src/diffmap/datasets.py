"""Seeded synthetic point clouds and CSV ingestion."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DiffmapError, GeometryError, ParseError
from .fokker_planck import parse_potential
from .geometry import Dumbbell
from .kernel_graph import PointCloud

__all__ = [
    "DatasetSpec",
    "generate",
    "load_csv",
    "save_csv",
    "basin_labels",
    "METROPOLIS_STEP",
    "BURN_IN",
    "THIN",
]

METROPOLIS_STEP = 0.5
BURN_IN = 1000
THIN = 10
MIN_ACCEPTANCE = 0.01


@dataclass(frozen=True)
class DatasetSpec:
    """What to generate, plus the seed.

    ``kind`` is one of ``gaussians``, ``dumbbell2d`` and ``boltzmann1d``;
    ``params`` holds the kind-specific parameters exactly as they appear in
    the JSON form (see the ``gaussians``/``dumbbell2d``/``boltzmann1d``
    constructors).
    """

    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        p = self.params
        if self.kind == "gaussians":
            comps = p.get("components", [])
            if not comps:
                raise DiffmapError("gaussians needs at least one component")
            for c in comps:
                if c["count"] < 1 or c["sigma"] <= 0:
                    raise DiffmapError("component counts must be >= 1 and sigmas > 0")
            if len({len(c["center"]) for c in comps}) != 1:
                raise DiffmapError("all centers must have the same dimension")
        elif self.kind == "dumbbell2d":
            if p["count"] < 1:
                raise DiffmapError("count must be >= 1")
            if not p["channel_width"] < p["box_size"]:
                raise DiffmapError("channel width must be smaller than the box")
        elif self.kind == "boltzmann1d":
            lo, hi = p["domain"]
            if p["count"] < 1 or not hi > lo:
                raise DiffmapError("boltzmann1d needs count >= 1 and a nondegenerate domain")
        else:
            raise DiffmapError(f"unknown dataset kind {self.kind!r}")

    @classmethod
    def gaussians(cls, components, seed: int = 0) -> "DatasetSpec":
        """``components`` is a sequence of ``(center, sigma, count)``."""
        comps = [
            {"center": [float(v) for v in np.atleast_1d(c)], "sigma": float(s), "count": int(n)}
            for c, s, n in components
        ]
        return cls("gaussians", {"components": comps}, seed)

    @classmethod
    def dumbbell2d(cls, box_size=1.0, channel_width=0.1, channel_length=0.5, count=1500, seed=0):
        params = {
            "box_size": float(box_size),
            "channel_width": float(channel_width),
            "channel_length": float(channel_length),
            "count": int(count),
        }
        return cls("dumbbell2d", params, seed)

    @classmethod
    def boltzmann1d(cls, potential: str, domain=(-2.0, 2.0), count=1000, seed=0):
        params = {"potential": str(potential), "domain": [float(domain[0]), float(domain[1])], "count": int(count)}
        return cls("boltzmann1d", params, seed)

    @property
    def geometry(self) -> Dumbbell:
        p = self.params
        return Dumbbell(p["box_size"], p["channel_width"], p["channel_length"])

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, **self.params, "seed": self.seed}, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DatasetSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DiffmapError(f"dataset spec is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise DiffmapError("dataset spec must be a JSON object")
        try:
            kind = data.pop("kind")
        except KeyError:
            raise DiffmapError("dataset spec needs a 'kind'") from None
        seed = int(data.pop("seed", 0))
        try:
            return cls(kind, data, seed)
        except KeyError as exc:
            raise DiffmapError(f"dataset spec is missing {exc}") from None


def _gaussians(params, rng):
    pts, labels = [], []
    for lab, c in enumerate(params["components"]):
        center = np.asarray(c["center"], dtype=float)
        pts.append(center + c["sigma"] * rng.standard_normal((c["count"], center.size)))
        labels.append(np.full(c["count"], lab))
    return np.vstack(pts), np.concatenate(labels)


def _dumbbell(spec, rng):
    geom = spec.geometry
    count = spec.params["count"]
    (x0, x1), (y0, y1) = geom.bounds
    lo, hi = np.array([x0, y0]), np.array([x1, y1])
    accepted, proposed = [], 0
    n_acc = 0
    while n_acc < count:
        batch = max(1024, 2 * (count - n_acc))
        cand = lo + (hi - lo) * rng.random((batch, 2))
        proposed += batch
        keep = cand[geom.contains(cand)]
        accepted.append(keep)
        n_acc += keep.shape[0]
        if n_acc / proposed < MIN_ACCEPTANCE:
            raise GeometryError("rejection sampler acceptance below 1%")
    pts = np.vstack(accepted)[:count]
    return pts, geom.container(pts)


def basin_labels(potential, x, domain, resolution: int = 20001) -> np.ndarray:
    """Index of the potential well containing each 1-D location ``x``.

    Wells are separated at the interior local maxima of ``potential`` on a
    fine grid over ``domain``.
    """
    grid = np.linspace(domain[0], domain[1], resolution)
    u = potential(grid[:, None])
    interior = np.flatnonzero((u[1:-1] > u[:-2]) & (u[1:-1] >= u[2:])) + 1
    cuts = grid[interior]
    return np.searchsorted(cuts, np.asarray(x, dtype=float).ravel()).astype(np.int64)


def _boltzmann(params, rng):
    pot = parse_potential(params["potential"])
    lo, hi = params["domain"]
    count = params["count"]
    grid = np.linspace(lo, hi, 4001)
    x = float(grid[np.argmin(pot(grid[:, None]))])
    ux = float(pot(np.array([x])))
    total = BURN_IN + THIN * count
    steps = METROPOLIS_STEP * rng.standard_normal(total)
    logu = np.log(rng.random(total))
    out = np.empty(count)
    for s in range(total):
        y = x + steps[s]
        if lo <= y <= hi:
            uy = float(pot(np.array([y])))
            if logu[s] < ux - uy:
                x, ux = y, uy
        if s >= BURN_IN and (s - BURN_IN) % THIN == THIN - 1:
            out[(s - BURN_IN) // THIN] = x
    return out[:, None], basin_labels(pot, out, (lo, hi))


def generate(spec: DatasetSpec) -> PointCloud:
    """Draw the point cloud described by ``spec``; identical specs give identical clouds."""
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "gaussians":
        pts, labels = _gaussians(spec.params, rng)
    elif spec.kind == "dumbbell2d":
        pts, labels = _dumbbell(spec, rng)
    else:
        pts, labels = _boltzmann(spec.params, rng)
    return PointCloud(points=pts, labels=labels)


# --- CSV -------------------------------------------------------------------


def save_csv(cloud: PointCloud, path) -> None:
    """Write ``cloud`` with a header ``x0,...,x{p-1}[,label]`` and 17 significant digits."""
    header = [f"x{k}" for k in range(cloud.p)]
    if cloud.labels is not None:
        header.append("label")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(cloud.n):
            row = [format(v, ".17g") for v in cloud.points[i]]
            if cloud.labels is not None:
                row.append(str(int(cloud.labels[i])))
            w.writerow(row)


def load_csv(path) -> PointCloud:
    """Read a cloud written by :func:`save_csv` (or any CSV with a header row).

    A final column named ``label`` is read as integer ground truth.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise ParseError("empty file")
    header = [h.strip() for h in rows[0]]
    has_label = header[-1].lower() == "label"
    width = len(header)
    if width - has_label < 1:
        raise ParseError("no coordinate columns", row=1)
    if len(rows) < 3:
        raise ParseError("need at least two data rows")
    pts, labels = [], []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise ParseError(f"expected {width} fields, found {len(row)}", row=r)
        try:
            pts.append([float(v) for v in row[: width - has_label]])
            if has_label:
                labels.append(int(row[-1]))
        except ValueError as exc:
            raise ParseError(str(exc), row=r) from None
    return PointCloud(points=np.array(pts), labels=np.array(labels) if has_label else None)
