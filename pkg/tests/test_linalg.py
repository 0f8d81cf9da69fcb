"""Tests for the symmetric eigensolvers.

Run with: pytest tests/test_linalg.py -v
"""

import numpy as np
import pytest

from src.errors import NotSymmetric
from src.linalg import eig_sym


def random_symmetric(n: int, seed: int = 0) -> np.ndarray:
    a = np.random.default_rng(seed).normal(size=(n, n))
    return (a + a.T) / 2


class TestEigSym:
    """Eigenvalues descending, orthonormal eigenvectors."""

    @pytest.mark.parametrize("method", ["lapack", "jacobi"])
    def test_reconstructs_matrix(self, method):
        """V diag(w) V^T gives back the input."""
        m = random_symmetric(12)
        values, vectors = eig_sym(m, method=method)
        assert np.allclose(vectors @ np.diag(values) @ vectors.T, m, atol=1e-9)
        assert np.all(np.diff(values) <= 0)

    def test_methods_agree(self):
        """Jacobi sweeps match LAPACK eigenvalues."""
        m = random_symmetric(20, seed=3)
        assert np.allclose(eig_sym(m, "jacobi")[0], eig_sym(m)[0], atol=1e-10)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_jacobi_converges_with_dominant_diagonal(self, seed):
        """Tiny couplings next to large diagonal entries still reach the stopping test."""
        m = np.diag(np.arange(1.0, 13.0) * 1e3) + 1e-4 * random_symmetric(12, seed)
        values, vectors = eig_sym(m, method="jacobi")
        assert np.allclose(values, eig_sym(m)[0], atol=1e-8)
        assert np.allclose(vectors.T @ vectors, np.eye(12), atol=1e-9)

    def test_diagonal_input(self):
        """A diagonal matrix is already decomposed."""
        values, _ = eig_sym(np.diag([1.0, 3.0, 2.0]), method="jacobi")
        assert values.tolist() == pytest.approx([3.0, 2.0, 1.0])

    def test_asymmetric_raises(self):
        """Non-symmetric input is rejected."""
        with pytest.raises(NotSymmetric):
            eig_sym(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_non_square_raises(self):
        """Rectangular input is rejected."""
        with pytest.raises(NotSymmetric):
            eig_sym(np.zeros((2, 3)))

    def test_empty(self):
        """Empty matrix has no eigenvalues."""
        values, vectors = eig_sym(np.zeros((0, 0)))
        assert values.size == 0 and vectors.shape == (0, 0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
