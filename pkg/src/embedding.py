"""Hilbert-space data for box spaces.

- wall_embedding: 0/1 coordinates whose squared Euclidean distances are the
  wall box metric
- negative_type_check: minimum eigenvalue of the centred kernel -1/2 J D J
- gaussian_unit_map: unit vectors with inner products exp(-t D)
- propA_ball_map: normalized ball indicators with the smallest workable radius
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .boxspace import BoxSpace, chain_matrix
from .config import get_settings
from .errors import KernelNotPSD, MissingWallData, NonIntegralGap, NoValidS
from .linalg import eig_sym

__all__ = [
    "NegativeTypeReport",
    "PointCloud",
    "UnitVectorMap",
    "eig_sym",
    "gaussian_unit_map",
    "negative_type_check",
    "propA_ball_map",
    "wall_box_metric",
    "wall_embedding",
]


@dataclass(frozen=True)
class PointCloud:
    coordinates: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.coordinates.shape[0]

    @property
    def dimension(self) -> int:
        return self.coordinates.shape[1]

    def squared_distances(self) -> np.ndarray:
        x = self.coordinates.astype(np.int64 if np.issubdtype(self.coordinates.dtype, np.integer) else float)
        sq = np.sum(x * x, axis=1)
        return sq[:, None] + sq[None, :] - 2 * (x @ x.T)


@dataclass(frozen=True)
class UnitVectorMap:
    vectors: np.ndarray = field(repr=False)

    @cached_property
    def gram(self) -> np.ndarray:
        return self.vectors @ self.vectors.T

    def norm_error(self) -> float:
        if self.vectors.shape[0] == 0:
            return 0.0
        return float(np.max(np.abs(np.linalg.norm(self.vectors, axis=1) - 1.0)))


@dataclass(frozen=True)
class NegativeTypeReport:
    min_eigenvalue: float
    is_negative_type: bool
    coordinates: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"min_eigenvalue": self.min_eigenvalue, "negative_type": self.is_negative_type}


def _require_walls(box: BoxSpace) -> list[np.ndarray]:
    walls = []
    for i, c in enumerate(box.components):
        if c.walls is None:
            raise MissingWallData(f"Component {i} carries no wall table", witness={"component": i})
        walls.append(np.asarray(c.walls, dtype=np.int64))
    return walls


def wall_box_metric(box: BoxSpace) -> np.ndarray:
    """Box metric with each component metrized by its walls (Hamming distance of wall rows)."""
    walls = _require_walls(box)
    metrics = [w @ (1 - w).T + (1 - w) @ w.T for w in walls]
    return chain_matrix(metrics, [c.basepoint for c in box.components], box.gaps)


def wall_embedding(box: BoxSpace) -> PointCloud:
    """0/1 coordinates: every component's wall bits, then the gap chain in unary.

    A point outside component j takes component j's basepoint bits (all zero).
    Squared Euclidean distance equals the wall box metric exactly.

    Raises:
        MissingWallData: if a component has no wall table
        NonIntegralGap: if a gap is not an integer
    """
    log = logging.getLogger("wall_embedding")
    walls = _require_walls(box)
    for k, gap in enumerate(box.gaps):
        if not float(gap).is_integer():
            raise NonIntegralGap(f"Gap {k} = {gap} is not an integer", witness={"index": k, "gap": gap})

    widths = [w.shape[1] for w in walls]
    line = int(sum(box.gaps))
    coords = np.zeros((box.size, sum(widths) + line), dtype=np.uint8)
    column = 0
    positions = box.chain_positions.astype(np.int64)
    line_start = sum(widths)
    for i, (w, c) in enumerate(zip(walls, box.components)):
        rows = slice(int(box.offsets[i]), int(box.offsets[i + 1]))
        base_bits = w[c.basepoint]
        coords[:, column : column + w.shape[1]] = base_bits
        coords[rows, column : column + w.shape[1]] = w
        coords[rows, line_start : line_start + positions[i]] = 1
        column += w.shape[1]

    log.info(f"{box.size} points in dimension {coords.shape[1]} ({sum(widths)} wall bits, {line} line steps)")
    return PointCloud(coordinates=coords)


def negative_type_check(d: np.ndarray, tol: float | None = None) -> NegativeTypeReport:
    """Minimum eigenvalue of -1/2 J D J; D is of negative type iff it is >= -tol.

    When it is, the report carries coordinates whose squared distances reproduce D.
    """
    log = logging.getLogger("negative_type_check")
    tol = get_settings().tol_psd if tol is None else tol
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if n <= 1:
        return NegativeTypeReport(0.0, True, np.zeros((n, 0)))

    j = np.eye(n) - np.full((n, n), 1.0 / n)
    kernel = -0.5 * j @ d @ j
    kernel = (kernel + kernel.T) / 2
    values, vectors = eig_sym(kernel)
    lowest = float(values[-1])
    ok = lowest >= -tol
    coordinates = None
    if ok:
        keep = values > tol
        coordinates = vectors[:, keep] * np.sqrt(values[keep])
    log.info(f"{n} points: min eigenvalue {lowest:.3e} ({'negative type' if ok else 'NOT negative type'})")
    return NegativeTypeReport(min_eigenvalue=lowest, is_negative_type=ok, coordinates=coordinates)


def gaussian_unit_map(d: np.ndarray, t: float, tol_psd: float | None = None) -> UnitVectorMap:
    """Unit vectors with <psi(x), psi(y)> = exp(-t d(x, y)).

    Eigenvalues in (-tol_psd, 0) are clipped to zero and rows renormalized.

    Raises:
        KernelNotPSD: if the kernel has an eigenvalue below -tol_psd
    """
    log = logging.getLogger("gaussian_unit_map")
    tol_psd = get_settings().tol_psd if tol_psd is None else tol_psd
    d = np.asarray(d, dtype=float)
    kernel = np.exp(-t * d)
    kernel = (kernel + kernel.T) / 2
    values, vectors = eig_sym(kernel)
    if values.size and values[-1] < -tol_psd:
        raise KernelNotPSD(
            f"exp(-{t:.4g} D) has eigenvalue {values[-1]:.3e}",
            witness={"t": t, "min_eigenvalue": float(values[-1])},
        )
    clipped = int(np.count_nonzero(values < 0))
    if clipped:
        log.debug(f"Clipped {clipped} eigenvalues down to {values[-1]:.3e}")
    keep = values > 0
    psi = vectors[:, keep] * np.sqrt(values[keep])
    psi = psi / np.linalg.norm(psi, axis=1, keepdims=True)
    result = UnitVectorMap(vectors=psi)
    deviation = float(np.max(np.abs(result.gram - kernel))) if d.size else 0.0
    log.info(f"t = {t:.6g}: {d.shape[0]} unit vectors in dimension {psi.shape[1]}, kernel error {deviation:.2e}")
    return result


def ball_map(d: np.ndarray, radius: float) -> UnitVectorMap:
    """Normalized indicators of closed balls of the given radius."""
    balls = (np.asarray(d) <= radius).astype(float)
    return UnitVectorMap(vectors=balls / np.sqrt(balls.sum(axis=1, keepdims=True)))


def propA_ball_map(
    d: np.ndarray | BoxSpace,
    R: float,
    eps: float,
    s_cap: float | None = None,
) -> tuple[float, UnitVectorMap]:
    """Smallest ball radius S with |1 - <phi(x), phi(y)>| < eps whenever d(x, y) <= R.

    S is searched over 0 and the observed distances up to s_cap (default: the
    total diameter).

    Raises:
        NoValidS: if no radius up to s_cap works, with the worst pair at the cap
    """
    log = logging.getLogger("propA_ball_map")
    d = d.global_matrix() if isinstance(d, BoxSpace) else np.asarray(d)
    s_cap = d.max().item() if s_cap is None else s_cap
    close = d <= R
    candidates = [0] + [s for s in np.unique(d).tolist() if 0 < s <= s_cap]

    worst = None
    for radius in candidates:
        phi = ball_map(d, radius)
        defect = np.abs(1.0 - phi.gram)[close]
        if defect.size == 0 or defect.max() < eps:
            log.info(f"R = {R}, eps = {eps}: S = {radius}")
            return radius, phi
        worst = (radius, phi)

    radius, phi = worst
    defect = np.where(close, np.abs(1.0 - phi.gram), -1.0)
    x, y = np.unravel_index(int(np.argmax(defect)), defect.shape)
    raise NoValidS(
        f"No ball radius up to {s_cap} meets eps = {eps} at R = {R}",
        witness={"pair": [int(x), int(y)], "defect": float(defect[x, y]), "radius": radius},
    )
