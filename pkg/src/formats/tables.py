"""CSV codecs: metric matrices, wall tables, envelopes and row reports."""

import csv
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from ..boxspace import EnvelopePair
from ..errors import BadInput


def save_rows_csv(path: str | Path, fieldnames: list[str], rows: Sequence[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        if value == float("inf"):
            return "inf"
        return repr(value) if not value.is_integer() else str(int(value))
    return str(value)


def save_matrix_csv(matrix: np.ndarray, path: str | Path, prefix: str = "") -> Path:
    """Header row of column indices (optionally prefixed), then one row per matrix row."""
    matrix = np.asarray(matrix)
    header = [f"{prefix}{j}" for j in range(matrix.shape[1])]
    return save_rows_csv(path, header, matrix.tolist())


def save_metric_csv(d: np.ndarray, path: str | Path) -> Path:
    return save_matrix_csv(d, path)


def save_walls_csv(walls: np.ndarray, path: str | Path) -> Path:
    return save_matrix_csv(walls, path, prefix="e")


def save_envelope_csv(env: EnvelopePair, path: str | Path) -> Path:
    return save_rows_csv(path, ["t", "rho_minus", "rho_plus"], env.rows())


def load_metric_csv(path: str | Path) -> np.ndarray:
    """Read a square metric CSV written by save_metric_csv.

    Raises:
        BadInput: if the file is missing, non-numeric, or not square
    """
    path = Path(path)
    if not path.is_file():
        raise BadInput(f"Metric file {str(path)!r} not found")
    with path.open(encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise BadInput(f"{path}: empty metric file")
    try:
        values = [[float(cell) for cell in row] for row in rows[1:] if row]
    except ValueError as e:
        raise BadInput(f"{path}: non-numeric entry ({e})") from e
    if any(len(row) != len(rows[0]) for row in values) or len(values) != len(rows[0]):
        raise BadInput(f"{path}: metric must be square with one row per header column")
    d = np.array(values, dtype=float).reshape(len(values), len(rows[0]))
    if np.all(d == np.round(d)):
        d = d.astype(np.int64)
    return d
