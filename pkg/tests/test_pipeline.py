"""Tests for the verification graph: reducers, routing and full runs.

Run with: pytest tests/test_pipeline.py -v
"""

from pathlib import Path

import pytest

from src.graph import create_verification_app, recursion_limit
from src.nodes import DEFAULT_GRID, init_dependencies, intake, point_label, route_decision
from src.providers import FileSeedProvider
from src.state import append_records, keep_last, merge_lists
from src.visualization import get_pipeline_dot

CATALOGUE = Path(__file__).parent.parent / "data" / "seeds.yaml"
SMALL_GRID = [{"R": 1, "eps": 0.5, "delta": 0.5}, {"R": 2, "eps": 0.25, "delta": 0.25}]


def run(state: dict) -> dict:
    app = create_verification_app()
    return app.invoke(state, config={"recursion_limit": recursion_limit(len(state.get("grid") or DEFAULT_GRID))})


@pytest.fixture(autouse=True)
def default_provider():
    init_dependencies()
    yield
    init_dependencies()


class TestReducers:
    """State reducers used at fan-in."""

    def test_keep_last(self):
        """None never overwrites."""
        assert keep_last(1, None) == 1
        assert keep_last(1, 2) == 2

    def test_merge_lists_dedupes(self):
        """Order kept, duplicates dropped."""
        assert merge_lists(["lemma"], ["lemma", "R=1,eps=0.5,delta=0.5"]) == ["lemma", "R=1,eps=0.5,delta=0.5"]
        assert merge_lists(None, None) == []

    def test_append_records_keeps_duplicates(self):
        """Verdict dicts are appended, never merged."""
        record = {"pass": True}
        assert append_records([record], [record]) == [record, record]
        assert append_records(None, [record]) == [record]


class TestRouting:
    """route_decision and intake."""

    def test_error_stops(self):
        """A construction error goes straight to the summary."""
        assert route_decision({"error": {"error": "GapTooSmall"}, "grid": SMALL_GRID, "grid_index": 0}) == "done"

    def test_advances(self):
        """Remaining grid points are visited."""
        assert route_decision({"grid": SMALL_GRID, "grid_index": 0, "failures": []}) == "next_point"

    def test_grid_exhausted(self):
        """Last point ends the run."""
        assert route_decision({"grid": SMALL_GRID, "grid_index": 1, "failures": []}) == "done"

    def test_strict_failure_stops(self):
        """Strict runs stop at the first failure."""
        state = {"grid": SMALL_GRID, "grid_index": 0, "strict": True, "failures": [point_label(SMALL_GRID[0])]}
        assert route_decision(state) == "done"

    def test_lenient_failure_continues(self):
        """Non-strict runs record and go on."""
        state = {"grid": SMALL_GRID, "grid_index": 0, "strict": False, "failures": ["lemma"]}
        assert route_decision(state) == "next_point"

    def test_point_label(self):
        """Labels name all three parameters."""
        assert point_label({"R": 1, "eps": 0.5, "delta": 0.25}) == "R=1,eps=0.5,delta=0.25"

    def test_intake_defaults(self):
        """Empty grid falls back to the default twelve points."""
        update = intake({"extension": "semidirect-swap"})
        assert update["grid"] == DEFAULT_GRID
        assert len(update["grid"]) == 12
        assert update["kernel"] == "auto"
        assert update["error"] is None

    def test_intake_rejects_bad_point(self):
        """eps outside (0, 1] is an input error."""
        update = intake({"extension": "semidirect-swap", "grid": [{"R": 1, "eps": 0, "delta": 0.5}]})
        assert update["error"]["error"] == "BadInput"
        assert update["error"]["exit_code"] == 2
        assert update["failures"] == ["intake"]

    def test_intake_rejects_missing_key(self):
        """Every point needs R, eps and delta."""
        update = intake({"extension": "semidirect-swap", "grid": [{"R": 1}]})
        assert update["error"]["error"] == "BadInput"


class TestVerificationRun:
    """End-to-end graph runs."""

    def test_swap_extension_passes(self):
        """Two grid points, two verdicts, no failures."""
        result = run({"extension": "semidirect-swap", "grid": SMALL_GRID})
        summary = result["summary"]
        assert summary["pass"]
        assert result["passed"]
        assert summary["gamma_orders"] == [8, 256]
        assert summary["g_orders"] == [2, 2]
        assert summary["tower_sizes"] == [1, 4, 128]
        assert len(summary["verdicts"]) == 2
        assert [v["R"] for v in summary["verdicts"]] == [1, 2]
        assert all(v["pairs_checked_2"] > 0 and v["min_margin_2"] > 0 for v in summary["verdicts"])
        assert all(v["cases"]["cutoff"] == v["pairs_checked_2"] for v in summary["verdicts"])
        assert all(report["max_violation"] <= 0 for report in summary["lemma"])
        assert summary["failures"] == []
        assert summary["error"] is None

    def test_small_gaps_fail_construction(self):
        """Gap 1 does not exceed the first Gamma diameter."""
        summary = run({"extension": "semidirect-swap", "grid": SMALL_GRID[:1], "gaps": [1]})["summary"]
        assert not summary["pass"]
        assert summary["error"]["error"] == "GapTooSmall"
        assert summary["error"]["exit_code"] == 3
        assert summary["verdicts"] == []
        assert summary["failures"] == ["assemble_boxes"]

    def test_unknown_extension(self):
        """Unknown names are input errors."""
        summary = run({"extension": "no-such-extension", "grid": SMALL_GRID[:1]})["summary"]
        assert summary["error"]["error"] == "SeedNotFound"
        assert summary["error"]["exit_code"] == 2

    def test_strict_run_stops_early(self):
        """A steep induced kernel fails closeness; strict mode stops after one point."""
        result = run(
            {"extension": "semidirect-swap", "grid": SMALL_GRID, "kernel": "induced", "t": 5.0, "strict": True}
        )
        summary = result["summary"]
        assert not summary["pass"]
        assert len(summary["verdicts"]) == 1
        assert summary["failures"] == [point_label(SMALL_GRID[0])]

    def test_catalogue_provider(self):
        """init_dependencies swaps the extension source."""
        init_dependencies(FileSeedProvider.from_yaml(CATALOGUE))
        summary = run({"extension": "swap-mod4", "grid": SMALL_GRID[:1]})["summary"]
        assert summary["gamma_orders"] == [8, 256]
        assert summary["pass"]


class TestDiagram:
    """Pipeline diagram source."""

    def test_nodes_present(self):
        """Every graph node is drawn."""
        source = get_pipeline_dot().source
        for node in ("intake", "build_tower", "build_extensions", "assemble_boxes", "check_lemma", "build_phi", "verify", "next_point", "summarize"):
            assert node in source

    def test_recursion_limit_grows_with_grid(self):
        """Each grid point needs three more supersteps."""
        assert recursion_limit(12) - recursion_limit(1) >= 3 * 11


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
