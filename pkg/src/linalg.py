"""Dense symmetric eigensolvers.

`eig_sym` is the single entry point used by the spectrum, negative-type and
Gaussian-kernel code. It defaults to LAPACK through numpy and keeps a cyclic
Jacobi sweep for small matrices and for cross-checking.
"""

import logging
from typing import Literal

import numpy as np

from .errors import NoConvergence, NotSymmetric

SYMMETRY_TOL = 1e-12
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
RESIDUAL_TOL = 1e-9
ORTHONORMAL_TOL = 1e-9


def _jacobi(a: np.ndarray, tol: float, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi rotations, row by row, until the off-diagonal norm vanishes."""
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n)
    scale = max(1.0, float(np.linalg.norm(a)))

    for sweep in range(max_sweeps):
        off = float(np.sqrt(2.0 * np.sum(np.triu(a, k=1) ** 2)))
        if off < tol * scale:
            return np.diag(a).copy(), v

        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                sign = 1.0 if theta >= 0 else -1.0
                t = sign / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q

                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q

                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q

    raise NoConvergence(
        f"Jacobi did not converge in {max_sweeps} sweeps",
        witness={"sweeps": max_sweeps, "size": n},
    )


def eig_sym(
    m: np.ndarray,
    method: Literal["lapack", "jacobi"] = "lapack",
) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a real symmetric matrix.

    Args:
        m: square symmetric matrix
        method: "lapack" (numpy.linalg.eigh) or "jacobi" (cyclic Jacobi sweeps)

    Returns:
        (eigenvalues sorted descending, eigenvectors as columns in the same order)

    Raises:
        NotSymmetric: if m differs from its transpose by more than 1e-12 (relative)
        NoConvergence: if the solver fails or the result misses the residual checks
    """
    log = logging.getLogger("eig_sym")
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSymmetric(f"Expected a square matrix, got shape {m.shape}")

    n = m.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))

    size = max(1.0, float(np.max(np.abs(m))))
    asym = float(np.max(np.abs(m - m.T)))
    if asym > SYMMETRY_TOL * size:
        raise NotSymmetric(
            f"Matrix is not symmetric (max |M - M^T| = {asym:.3e})",
            witness={"asymmetry": asym},
        )

    if method == "jacobi":
        values, vectors = _jacobi(m, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    else:
        try:
            values, vectors = np.linalg.eigh(m)
        except np.linalg.LinAlgError as e:
            raise NoConvergence(f"LAPACK eigh failed: {e}") from e

    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]

    norm = max(float(np.linalg.norm(m, 2)), np.finfo(float).tiny)
    residual = float(np.max(np.linalg.norm(m @ vectors - vectors * values, axis=0)))
    if residual > RESIDUAL_TOL * max(norm, 1.0):
        raise NoConvergence(
            f"Eigenpair residual {residual:.3e} exceeds tolerance",
            witness={"residual": residual},
        )
    ortho = float(np.max(np.abs(vectors.T @ vectors - np.eye(n))))
    if ortho > ORTHONORMAL_TOL:
        raise NoConvergence(
            f"Eigenvectors not orthonormal (deviation {ortho:.3e})",
            witness={"orthonormality": ortho},
        )

    log.debug(f"{method}: n={n}, lambda_max={values[0]:.6g}, lambda_min={values[-1]:.6g}")
    return values, vectors
