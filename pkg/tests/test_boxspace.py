"""Tests for box space assembly and distortion envelopes.

Run with: pytest tests/test_boxspace.py -v
"""

import numpy as np
import pytest

from src.boxspace import (
    CROSS_COMPONENT_FACTOR,
    BoxSpace,
    Component,
    assemble,
    combined_envelope,
    common_gaps,
    cross_component_ratio,
    cross_ratio_within,
    distortion_envelope,
    from_tower,
    generating_set_change,
    global_distance,
)
from src.covers import build_tower
from src.errors import BadGenerator, BadInput, GapTooSmall, MismatchedPointSets
from src.groups import Word
from src.multigraph import bfs_metric, cycle, rose


@pytest.fixture
def c4_c8() -> BoxSpace:
    return assemble([Component(bfs_metric(cycle(4))), Component(bfs_metric(cycle(8)))])


class TestComponent:
    """Component validation."""

    def test_non_square(self):
        """Metrics must be square."""
        with pytest.raises(BadInput):
            Component(np.zeros((2, 3)))

    def test_empty(self):
        """Empty components are not allowed."""
        with pytest.raises(BadInput):
            Component(np.zeros((0, 0)))

    def test_basepoint_range(self):
        """Basepoint must index a point."""
        with pytest.raises(BadInput):
            Component(bfs_metric(cycle(4)), basepoint=4)

    def test_wall_rows(self):
        """Wall table needs one row per point."""
        with pytest.raises(BadInput):
            Component(bfs_metric(cycle(4)), walls=np.zeros((3, 4), dtype=np.uint8))


class TestAssemble:
    """Gap rules and global distances."""

    def test_default_gap(self, c4_c8):
        """Gap is one more than the larger diameter."""
        assert c4_c8.gaps == (5,)
        assert c4_c8.sizes == [4, 8]

    def test_cross_distance(self, c4_c8):
        """2 to the basepoint, 5 along the chain, 4 out to the antipode."""
        assert global_distance(c4_c8, (0, 2), (1, 4)) == 11
        d = c4_c8.global_matrix()
        assert d[c4_c8.index(0, 2), c4_c8.index(1, 4)] == 11

    def test_in_component_distance(self, c4_c8):
        """Distances inside a component are unchanged."""
        assert global_distance(c4_c8, (1, 1), (1, 5)) == 4

    def test_global_matrix_symmetric_integral(self, c4_c8):
        """Integral metrics and gaps give an integer matrix."""
        d = c4_c8.global_matrix()
        assert np.issubdtype(d.dtype, np.integer)
        assert np.array_equal(d, d.T)

    def test_explicit_gaps(self):
        """A long explicit gap is used as given."""
        box = assemble([Component(bfs_metric(cycle(4))), Component(bfs_metric(cycle(8)))], [9])
        assert box.chain_positions.tolist() == [0, 9]

    def test_gap_too_small(self):
        """Gap equal to a neighbouring diameter is rejected."""
        with pytest.raises(GapTooSmall):
            assemble([Component(bfs_metric(cycle(4))), Component(bfs_metric(cycle(8)))], [4])

    def test_gap_count(self):
        """One gap per adjacent pair."""
        with pytest.raises(BadInput):
            assemble([Component(bfs_metric(cycle(4))), Component(bfs_metric(cycle(8)))], [9, 9])

    def test_custom_rule(self):
        """Callable gap rules see both diameters."""
        box = assemble(
            [Component(bfs_metric(cycle(4))), Component(bfs_metric(cycle(8)))],
            lambda a, b: a + b + 1,
        )
        assert box.gaps == (7,)

    def test_locate_and_index(self, c4_c8):
        """Global indices run component by component."""
        assert c4_c8.locate(4) == (1, 0)
        assert c4_c8.index(1, 3) == 7
        assert c4_c8.basepoint_indices() == [0, 4]
        assert c4_c8.component_of().tolist() == [0] * 4 + [1] * 8

    def test_from_tower(self):
        """Tower box spaces skip the seed and carry walls."""
        box = from_tower(build_tower(rose(2), max_levels=3))
        assert box.sizes == [4, 128]
        assert all(c.walls is not None for c in box.components)

    def test_common_gaps(self):
        """Each gap covers the larger of both metrics."""
        assert common_gaps([[2, 4], [1, 6]]) == [7]

    def test_common_gaps_lengths(self):
        """All diameter lists need the same length."""
        with pytest.raises(MismatchedPointSets):
            common_gaps([[2, 4], [1]])


class TestEnvelopes:
    """Compression and expansion functions."""

    def test_identical_metrics_are_diagonal(self, c4_c8):
        """rho_minus = rho_plus = t when nothing changes."""
        d = c4_c8.global_matrix()
        env = distortion_envelope(d, d)
        assert np.array_equal(env.rho_minus, env.t)
        assert np.array_equal(env.rho_plus, env.t)
        assert env.monotone and env.rho_minus_positive

    def test_doubled_metric(self):
        """Scaling by two doubles both envelopes."""
        d = bfs_metric(cycle(6))
        env = distortion_envelope(d, 2 * d)
        assert np.array_equal(env.rho_plus, 2 * env.t)
        assert np.array_equal(env.rho_minus, 2 * env.t)

    def test_mismatched_shapes(self):
        """Envelopes compare metrics on one point set."""
        with pytest.raises(MismatchedPointSets):
            distortion_envelope(bfs_metric(cycle(4)), bfs_metric(cycle(5)))

    def test_empty(self):
        """No pairs, no rows."""
        env = distortion_envelope(np.zeros((0, 0)), np.zeros((0, 0)))
        assert env.rows() == []

    def test_combined_envelope(self):
        """Widening keeps the envelope inside [t/3, 3t]."""
        d = bfs_metric(cycle(6))
        wide = combined_envelope(distortion_envelope(d, d))
        assert np.allclose(wide.rho_minus, wide.t / CROSS_COMPONENT_FACTOR)
        assert np.allclose(wide.rho_plus, CROSS_COMPONENT_FACTOR * wide.t)

    def test_combined_envelope_factor(self):
        """A wider factor widens both sides by the same amount."""
        d = bfs_metric(cycle(6))
        wide = combined_envelope(distortion_envelope(d, d), factor=5.0)
        assert np.allclose(wide.rho_minus, wide.t / 5)
        assert np.allclose(wide.rho_plus, 5 * wide.t)

    def test_summary_keys(self):
        """Summary reports the observed range."""
        summary = distortion_envelope(bfs_metric(cycle(6)), bfs_metric(cycle(6))).summary()
        assert summary["t_max"] == 3
        assert summary["observed_t"] == 4


class TestGeneratingSetChange:
    """Same points, two word metrics."""

    def test_cross_ratio_of_identical_boxes(self, c4_c8):
        """Identical boxes have ratio 1 across components."""
        assert cross_component_ratio(c4_c8, c4_c8) == (1.0, 1.0)

    def test_cross_ratio_size_mismatch(self, c4_c8):
        """Point sets must line up."""
        other = assemble([Component(bfs_metric(cycle(8))), Component(bfs_metric(cycle(4)))])
        with pytest.raises(MismatchedPointSets):
            cross_component_ratio(c4_c8, other)

    @pytest.mark.parametrize(
        "low,high,factor,expected",
        [(1 / 3, 3.0, 3.0, True), (0.3, 1.0, 3.0, False), (0.5, 3.5, 3.0, False), (0.3, 3.5, 4.0, True)],
    )
    def test_cross_ratio_bound(self, low, high, factor, expected):
        """Ratios must sit inside [1 / factor, factor]."""
        assert cross_ratio_within(low, high, factor) is expected

    def test_extra_generator_shrinks_distances(self):
        """Adding ab only shortens words, and both boxes share gaps."""
        first, second = generating_set_change(
            build_tower(rose(2), max_levels=3), [Word.parse("a"), Word.parse("b"), Word.parse("ab")]
        )
        assert first.gaps == second.gaps
        assert first.sizes == second.sizes == [4, 128]
        low, high = cross_component_ratio(first, second)
        assert 0 < low <= high <= 1.0
        assert cross_ratio_within(low, high)
        env = distortion_envelope(first.global_matrix(), second.global_matrix())
        assert env.monotone and env.rho_minus_positive

    def test_non_generating_list(self):
        """A list generating a proper subgroup is refused."""
        with pytest.raises(BadGenerator):
            generating_set_change(build_tower(rose(2), max_levels=3), [Word.parse("ab")])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
