"""Tests for wall embeddings, negative type and unit-vector maps.

Run with: pytest tests/test_embedding.py -v
"""

from pathlib import Path

import networkx as nx
import numpy as np
import pytest

from src.boxspace import Component, assemble, from_tower
from src.covers import build_tower
from src.embedding import (
    ball_map,
    gaussian_unit_map,
    negative_type_check,
    propA_ball_map,
    wall_box_metric,
    wall_embedding,
)
from src.errors import KernelNotPSD, MissingWallData, NonIntegralGap, NoValidS
from src.formats.tables import load_metric_csv
from src.multigraph import bfs_metric, cycle, path, rose
from src.nodes import DEFAULT_GRID

K23_CSV = Path(__file__).parent.parent / "data" / "k23_metric.csv"


def k23_metric() -> np.ndarray:
    return np.array(nx.floyd_warshall_numpy(nx.complete_bipartite_graph(2, 3)), dtype=np.int64)


@pytest.fixture(scope="module")
def rose_box():
    return from_tower(build_tower(rose(2), max_levels=3))


class TestWallEmbedding:
    """0/1 coordinates for the wall box metric."""

    def test_squared_distances_are_wall_metric(self, rose_box):
        """Exact identity, no tolerance."""
        cloud = wall_embedding(rose_box)
        assert cloud.size == 132
        assert np.array_equal(cloud.squared_distances(), wall_box_metric(rose_box))

    def test_cycle_tower(self):
        """Same identity for the cycle covers."""
        box = from_tower(build_tower(cycle(4), max_levels=4))
        assert np.array_equal(wall_embedding(box).squared_distances(), wall_box_metric(box))

    def test_wall_box_metric_is_negative_type(self, rose_box):
        """The wall metric passes the centred-kernel test."""
        report = negative_type_check(wall_box_metric(rose_box))
        assert report.is_negative_type

    def test_non_integral_gap(self):
        """Unary gap coordinates need integer gaps."""
        box = from_tower(build_tower(cycle(4), max_levels=3), [8.5])
        with pytest.raises(NonIntegralGap):
            wall_embedding(box)

    def test_missing_walls(self):
        """Components without walls cannot be embedded."""
        box = assemble([Component(bfs_metric(cycle(4)))])
        with pytest.raises(MissingWallData):
            wall_embedding(box)


class TestNegativeType:
    """Centred-kernel eigenvalue test."""

    def test_k23_fails(self):
        """K_{2,3} has minimum centred eigenvalue -1/5."""
        report = negative_type_check(k23_metric())
        assert not report.is_negative_type
        assert report.min_eigenvalue == pytest.approx(-0.2, abs=1e-10)
        assert report.coordinates is None

    def test_k23_from_csv(self):
        """The shipped CSV holds the same matrix."""
        assert np.array_equal(load_metric_csv(K23_CSV), k23_metric())

    def test_path_embeds(self):
        """Tree metrics are of negative type and the coordinates reproduce them."""
        d = bfs_metric(path(5))
        report = negative_type_check(d)
        assert report.is_negative_type
        x = report.coordinates
        sq = np.sum(x * x, axis=1)
        assert np.allclose(sq[:, None] + sq[None, :] - 2 * x @ x.T, d, atol=1e-8)

    def test_single_point(self):
        """One point is trivially of negative type."""
        report = negative_type_check(np.zeros((1, 1)))
        assert report.is_negative_type
        assert report.to_dict() == {"min_eigenvalue": 0.0, "negative_type": True}


class TestGaussianMap:
    """Unit vectors with exponential kernel."""

    def test_unit_norms_and_kernel(self):
        """Gram matrix is exp(-t d) on a negative-type metric."""
        d = bfs_metric(cycle(8))
        psi = gaussian_unit_map(d, 0.3)
        assert psi.norm_error() < 1e-9
        assert np.allclose(psi.gram, np.exp(-0.3 * d), atol=1e-8)

    def test_k23_kernel_not_psd(self):
        """exp(-0.15 d) on K_{2,3} has a negative eigenvalue."""
        with pytest.raises(KernelNotPSD):
            gaussian_unit_map(k23_metric(), 0.15)


class TestBallMap:
    """Property-A ball indicators."""

    def test_ball_vectors_are_unit(self):
        """Normalized indicators."""
        assert ball_map(bfs_metric(cycle(8)), 2).norm_error() < 1e-12

    def test_smallest_radius(self):
        """On C8 at R = 1 a radius-1 ball suffices for eps 0.5, radius 2 for eps 0.25."""
        d = bfs_metric(cycle(8))
        assert propA_ball_map(d, 1, 0.5)[0] == 1
        assert propA_ball_map(d, 1, 0.25)[0] == 2

    def test_no_valid_radius(self):
        """Radius capped at zero cannot work."""
        with pytest.raises(NoValidS):
            propA_ball_map(bfs_metric(cycle(8)), 1, 0.5, s_cap=0)

    def test_accepts_box_space(self):
        """A box space is measured through its global matrix."""
        box = assemble([Component(bfs_metric(cycle(4))), Component(bfs_metric(cycle(8)))])
        s, phi = propA_ball_map(box, 1, 0.5)
        assert s == 1
        assert phi.vectors.shape == (12, 12)

    @pytest.mark.parametrize("R,eps", sorted({(p["R"], p["eps"]) for p in DEFAULT_GRID}))
    def test_support_and_closeness_on_grid(self, rose_box, R, eps):
        """Each vector lives on the ball of radius S and close points stay within eps."""
        d = rose_box.global_matrix()
        s, phi = propA_ball_map(rose_box, R, eps / 2)
        assert np.all(d[phi.vectors > 0] <= s)
        assert np.all(np.abs(1.0 - phi.gram)[d <= R] < eps / 2)
        assert phi.norm_error() < 1e-12


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
