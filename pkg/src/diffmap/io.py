"""Plain-text exports: CSV for arrays, JSON for reports.

Floats are written with 17 significant digits so every value round-trips
exactly; output is byte-identical for identical inputs.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .errors import ParseError


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_matrix_csv(path, matrix, prefix: str = "c") -> None:
    """Row-major dump of a 2-D array with columns ``prefix0, prefix1, ...``."""
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    write_csv(path, [f"{prefix}{j}" for j in range(a.shape[1])], a)


def write_spectrum_csv(path, eigenvalues) -> None:
    write_csv(path, ["j", "lambda"], ((j, lam) for j, lam in enumerate(eigenvalues)))


def write_embedding_csv(path, coords) -> None:
    """Columns ``id, psi1..psik`` holding the (already time-scaled) coordinates."""
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    header = ["id"] + [f"psi{j + 1}" for j in range(coords.shape[1])]
    write_csv(path, header, ([i, *row] for i, row in enumerate(coords)))


def read_embedding_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2 or rows[0][0] != "id":
        raise ParseError("not an embedding file")
    try:
        return np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def write_labels_csv(path, labels) -> None:
    write_csv(path, ["id", "label"], enumerate(np.asarray(labels, dtype=np.int64)))


def write_trajectory_csv(path, times, positions) -> None:
    positions = np.asarray(positions, dtype=float).reshape(len(times), -1)
    header = ["t"] + [f"x{k}" for k in range(positions.shape[1])]
    write_csv(path, header, ([t, *x] for t, x in zip(times, positions)))


def write_eigenfunction_csv(path, points, values) -> None:
    """Node coordinates followed by one column per eigenfunction."""
    points = np.asarray(points, dtype=float).reshape(len(points), -1)
    values = np.asarray(values, dtype=float).reshape(len(points), -1)
    header = [f"x{k}" for k in range(points.shape[1])] + [f"f{j}" for j in range(values.shape[1])]
    write_csv(path, header, np.hstack([points, values]))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(_plain(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
