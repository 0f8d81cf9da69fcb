"""Tests for the command-line subcommands and their exit codes.

Run with: pytest tests/test_cli.py -v
"""

import csv
import json
import os
from pathlib import Path

import numpy as np
import pytest

from src.config import get_settings, overridden_settings, reset_settings
from src.formats import save_metric_csv
from src.main import RunConfig, build_parser, main
from src.multigraph import bfs_metric, cycle

DATA = Path(__file__).parent.parent / "data"


def stderr_error(err: str) -> dict:
    """Last JSON object written to stderr (log lines precede it)."""
    lines = [line for line in err.splitlines() if line.startswith("{")]
    return json.loads(lines[-1])


def read_json(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


class TestTower:
    """tower subcommand."""

    def test_writes_reports(self, tmp_path):
        """JSON, CSV and one graph file per level."""
        assert main(["tower", "ags-rose", "--levels", "3", "--out", str(tmp_path)]) == 0
        assert read_json(tmp_path / "tower.json")["sizes"] == [1, 4, 128]
        assert (tmp_path / "tower.csv").read_text().splitlines()[0] == "level,size,girth,diameter"
        for level in range(3):
            assert (tmp_path / f"level_{level}.json").is_file()

    def test_dot_format(self, tmp_path):
        """--format dot writes Graphviz sources."""
        assert main(["tower", "cycle4", "--levels", "2", "--format", "dot", "--out", str(tmp_path)]) == 0
        assert "digraph" in (tmp_path / "level_1.dot").read_text()

    def test_deterministic(self, tmp_path):
        """Two runs produce byte-identical files."""
        first, second = tmp_path / "a", tmp_path / "b"
        for out in (first, second):
            assert main(["tower", "theta", "--levels", "3", "--out", str(out)]) == 0
        for name in ("tower.json", "tower.csv", "level_2.json"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_unknown_seed(self, tmp_path, capsys):
        """Unknown seeds exit 2 with a JSON error."""
        assert main(["tower", "no-such-seed", "--out", str(tmp_path)]) == 2
        assert stderr_error(capsys.readouterr().err)["error"] == "SeedNotFound"

    def test_graph_file_seed(self, tmp_path):
        """A graph JSON path works as a seed."""
        assert main(["tower", str(DATA / "bridged_seed.json"), "--levels", "2", "--out", str(tmp_path)]) == 0
        assert read_json(tmp_path / "tower.json")["sizes"] == [5, 10]

    def test_nonpositive_levels(self, tmp_path):
        """--levels 0 is a usage error."""
        assert main(["tower", "ags-rose", "--levels", "0", "--out", str(tmp_path)]) == 2


class TestWalls:
    """walls subcommand."""

    def test_cycle_cover(self, tmp_path):
        """The first C4 cover agrees past the base girth."""
        assert main(["walls", "cycle4", "--level", "1", "--out", str(tmp_path)]) == 0
        agreement = read_json(tmp_path / "agreement.json")
        assert agreement["agreement_radius"] >= 4
        assert agreement["reaches_girth"]
        with (tmp_path / "walls.csv").open() as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["e0", "e1", "e2", "e3"]
        assert len(rows) == 1 + 8

    def test_bridged_seed_warns(self, tmp_path):
        """Warnings are carried into the report."""
        assert main(["walls", "bridged", "--out", str(tmp_path)]) == 0
        assert read_json(tmp_path / "agreement.json")["warnings"]


class TestEmbed:
    """embed subcommand."""

    def test_wall_embedding(self, tmp_path):
        """ags-rose box space embeds exactly."""
        assert main(["embed", "ags-rose", "--levels", "3", "--out", str(tmp_path)]) == 0
        result = read_json(tmp_path / "negative_type.json")
        assert result["points"] == 132
        assert result["embedding_exact"]
        assert result["negative_type"]
        assert (tmp_path / "points.csv").is_file()

    def test_metric_file(self, tmp_path):
        """K_{2,3} reports a negative eigenvalue without failing the run."""
        assert main(["embed", "--metric", str(DATA / "k23_metric.csv"), "--out", str(tmp_path)]) == 0
        result = read_json(tmp_path / "negative_type.json")
        assert not result["negative_type"]
        assert result["min_eigenvalue"] == pytest.approx(-0.2, abs=1e-9)

    def test_needs_input(self, tmp_path):
        """Neither a seed nor --metric is a usage error."""
        with pytest.raises(SystemExit) as exc:
            main(["embed", "--out", str(tmp_path)])
        assert exc.value.code == 2


class TestExtVerify:
    """ext-verify subcommand."""

    def test_small_grid_passes(self, tmp_path):
        """One grid point, verdict JSON and CSV."""
        argv = ["ext-verify", "semidirect-swap", "--R", "1", "--eps", "0.5", "--delta", "0.5", "--format", "csv", "--out", str(tmp_path)]
        assert main(argv) == 0
        verdict = read_json(tmp_path / "verdict.json")
        assert verdict["pass"]
        assert len(verdict["verdicts"]) == 1
        assert (tmp_path / "verdict.csv").read_text().splitlines()[0].startswith("R,eps,delta")

    def test_small_gaps(self, tmp_path, capsys):
        """Undersized gaps are a validation error."""
        argv = ["ext-verify", "semidirect-swap", "--R", "1", "--eps", "0.5", "--delta", "0.5", "--gaps", "1", "--out", str(tmp_path)]
        assert main(argv) == 3
        assert stderr_error(capsys.readouterr().err)["error"] == "GapTooSmall"

    def test_failing_condition(self, tmp_path, capsys):
        """A failing grid point exits 4 with its witness."""
        argv = [
            "ext-verify", "semidirect-swap", "--R", "1", "--eps", "0.5", "--delta", "0.5",
            "--kernel", "induced", "--t", "5", "--out", str(tmp_path),
        ]
        assert main(argv) == 4
        error = stderr_error(capsys.readouterr().err)
        assert error["error"] == "ConditionViolated"
        assert error["witness"]["condition"] == "closeness"
        assert not read_json(tmp_path / "verdict.json")["pass"]


class TestEnvelope:
    """envelope subcommand."""

    def test_identical_metrics(self, tmp_path):
        """Same CSV twice gives the diagonal."""
        path = save_metric_csv(bfs_metric(cycle(6)), tmp_path / "d.csv")
        assert main(["envelope", str(path), str(path), "--out", str(tmp_path)]) == 0
        with (tmp_path / "envelope.csv").open() as f:
            rows = list(csv.DictReader(f))
        assert all(row["t"] == row["rho_minus"] == row["rho_plus"] for row in rows)
        assert read_json(tmp_path / "envelope.json")["monotone"]

    def test_mismatched_metrics(self, tmp_path, capsys):
        """Metrics on different point sets exit 3."""
        a = save_metric_csv(bfs_metric(cycle(4)), tmp_path / "a.csv")
        b = save_metric_csv(bfs_metric(cycle(5)), tmp_path / "b.csv")
        assert main(["envelope", str(a), str(b), "--out", str(tmp_path)]) == 3
        assert stderr_error(capsys.readouterr().err)["error"] == "MismatchedPointSets"

    def test_single_input(self, tmp_path):
        """One CSV is not enough."""
        path = save_metric_csv(np.zeros((1, 1), dtype=int), tmp_path / "d.csv")
        assert main(["envelope", str(path), "--out", str(tmp_path)]) == 2


class TestParser:
    """Argument parsing and run configuration."""

    def test_missing_subcommand(self):
        """argparse exits 2 without a subcommand."""
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_grid_defaults(self):
        """Only R given: default eps and delta fill the grid."""
        args = build_parser().parse_args(["ext-verify", "semidirect-swap", "--R", "3"])
        grid = RunConfig.from_args(args).grid()
        assert len(grid) == 4
        assert {p["R"] for p in grid} == {3.0}

    def test_default_grid(self):
        """No grid flags at all: twelve points."""
        args = build_parser().parse_args(["ext-verify", "semidirect-swap"])
        assert len(RunConfig.from_args(args).grid()) == 12

    def test_tolerance_flags_stay_in_their_run(self, tmp_path):
        """--tol-psd applies to one run; the environment and cached settings are untouched."""
        reset_settings()
        before = get_settings()
        env_before = os.environ.get("BOXSPACE_TOL_PSD")
        argv = ["embed", "--metric", str(DATA / "k23_metric.csv"), "--tol-psd", "0.5", "--out", str(tmp_path)]
        assert main(argv) == 0
        assert os.environ.get("BOXSPACE_TOL_PSD") == env_before
        assert get_settings() is before

    def test_overridden_settings_restores(self):
        """Overrides replace only the given fields and vanish on exit."""
        before = get_settings()
        with overridden_settings(tol_norm=0.125, tol_psd=None) as settings:
            assert get_settings() is settings
            assert settings.tol_norm == 0.125
            assert settings.tol_psd == before.tol_psd
        assert get_settings() is before


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
