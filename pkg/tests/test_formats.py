"""Tests for file codecs and seed providers.

Run with: pytest tests/test_formats.py -v
"""

import json
from pathlib import Path

import numpy as np
import pytest

from src.errors import BadInput, SeedNotFound
from src.formats import (
    graph_to_dot,
    load_graph,
    load_metric_csv,
    save_graph,
    save_json,
    save_metric_csv,
    save_walls_csv,
)
from src.multigraph import bridges, cycle, girth, rose, theta
from src.providers import (
    BuiltinSeedProvider,
    FileSeedProvider,
    resolve_extension,
    resolve_seed,
)

DATA = Path(__file__).parent.parent / "data"


class TestGraphFiles:
    """Graph JSON and DOT output."""

    def test_save_and_load(self, tmp_path):
        """A saved graph loads back equal."""
        path = save_graph(theta(3), tmp_path / "theta.json")
        assert load_graph(path) == theta(3)

    def test_missing_file(self, tmp_path):
        """Unknown paths are reported as unknown seeds."""
        with pytest.raises(SeedNotFound):
            load_graph(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        """Garbage is a BadInput."""
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(BadInput):
            load_graph(path)

    def test_save_json_converts_numpy(self, tmp_path):
        """numpy scalars, arrays and infinity become plain JSON."""
        path = save_json({"a": np.int64(3), "b": np.arange(2), "c": float("inf")}, tmp_path / "x.json")
        assert json.loads(path.read_text()) == {"a": 3, "b": [0, 1], "c": None}

    def test_json_is_sorted(self, tmp_path):
        """Keys are written in sorted order."""
        text = save_json({"b": 1, "a": 2}, tmp_path / "x.json").read_text()
        assert text.index('"a"') < text.index('"b"')

    def test_dot_source(self):
        """Basepoint is doubled and labels are letters."""
        source = graph_to_dot(rose(2), name="rose").source
        assert "doublecircle" in source
        assert 'label=a' in source and 'label=b' in source


class TestTables:
    """CSV codecs."""

    def test_metric_csv(self, tmp_path):
        """Metric CSV keeps integer entries."""
        d = np.array([[0, 1], [1, 0]])
        loaded = load_metric_csv(save_metric_csv(d, tmp_path / "d.csv"))
        assert np.array_equal(loaded, d)
        assert np.issubdtype(loaded.dtype, np.integer)

    def test_walls_header(self, tmp_path):
        """Wall columns are named after base edges."""
        path = save_walls_csv(np.zeros((2, 3), dtype=np.uint8), tmp_path / "w.csv")
        assert path.read_text().splitlines()[0] == "e0,e1,e2"

    def test_non_square(self, tmp_path):
        """Rows must match the header."""
        path = tmp_path / "d.csv"
        path.write_text("0,1\n0,1\n", encoding="utf-8")
        with pytest.raises(BadInput):
            load_metric_csv(path)

    def test_non_numeric(self, tmp_path):
        """Entries must parse as numbers."""
        path = tmp_path / "d.csv"
        path.write_text("0\nx\n", encoding="utf-8")
        with pytest.raises(BadInput):
            load_metric_csv(path)

    def test_missing(self, tmp_path):
        """Missing files are a BadInput."""
        with pytest.raises(BadInput):
            load_metric_csv(tmp_path / "none.csv")


class TestProviders:
    """Builtin and catalogue seeds."""

    def test_builtin_seeds(self):
        """ags-rose is the two-loop rose."""
        provider = BuiltinSeedProvider()
        assert provider.fetch_seed("ags-rose") == rose(2)
        assert provider.fetch_seed("cycle4") == cycle(4)
        assert "theta" in provider.names()

    def test_builtin_unknown(self):
        """Unknown names raise SeedNotFound."""
        with pytest.raises(SeedNotFound):
            BuiltinSeedProvider().fetch_seed("no-such-seed")
        with pytest.raises(SeedNotFound):
            BuiltinSeedProvider().fetch_extension("no-such-extension")

    def test_builtin_extension(self):
        """The swap extension acts by exchanging a and b."""
        spec = resolve_extension("semidirect-swap")
        assert spec.images == ("b", "a")
        assert spec.levels == 3
        assert spec.acting_order is None

    def test_catalogue(self):
        """The shipped catalogue has K4 and the prism."""
        provider = FileSeedProvider.from_yaml(DATA / "seeds.yaml")
        assert provider.names() == ["k4", "prism"]
        k4 = provider.fetch_seed("k4")
        assert k4.vertex_count == 4 and k4.edge_count == 6
        assert girth(provider.fetch_seed("prism")) == 3

    def test_catalogue_extension(self):
        """Catalogue extensions may name a builtin seed."""
        spec = FileSeedProvider.from_yaml(DATA / "seeds.yaml").fetch_extension("swap-mod4")
        assert spec.seed == rose(2)
        assert spec.acting_order == 4

    def test_malformed_extension(self):
        """An entry without images is rejected."""
        provider = FileSeedProvider({"extensions": {"broken": {"seed": "ags-rose"}}})
        with pytest.raises(BadInput):
            provider.fetch_extension("broken")

    def test_unknown_extension(self):
        """Only catalogue names resolve."""
        with pytest.raises(SeedNotFound):
            FileSeedProvider().fetch_extension("missing")

    def test_missing_catalogue(self, tmp_path):
        """A catalogue path must exist."""
        with pytest.raises(SeedNotFound):
            FileSeedProvider.from_yaml(tmp_path / "none.yaml")

    def test_resolve_graph_path(self):
        """Names that are not seeds are read as graph files."""
        g = resolve_seed(str(DATA / "bridged_seed.json"))
        assert g.vertex_count == 5
        assert bridges(g) == [3, 4]

    def test_resolve_unknown(self):
        """Neither a seed nor a file."""
        with pytest.raises(SeedNotFound):
            resolve_seed("definitely-not-a-seed")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
