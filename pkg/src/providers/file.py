"""Seeds read from graph JSON files or a YAML catalogue."""

from pathlib import Path

import yaml

from ..errors import BadInput, SeedNotFound
from ..formats import load_graph
from ..multigraph import LabeledMultigraph
from .base import ExtensionSpec
from .builtin import BuiltinSeedProvider


class FileSeedProvider:
    """Provider backed by a YAML catalogue of named seeds and extension specs.

    Catalogue layout:
        seeds:
          k4: {vertex_count: 4, basepoint: 0, edges: [[0, 1, 0], ...]}
        extensions:
          swap: {seed: ags-rose, levels: 3, images: [b, a], acting_order: null}

    An extension's seed may name a catalogue seed, a builtin seed, or be an inline graph.
    Names that are not in the catalogue are tried as graph JSON paths.
    """

    def __init__(self, catalogue: dict | None = None):
        self.catalogue = catalogue or {}

    @classmethod
    def from_yaml(cls, path: str | Path) -> "FileSeedProvider":
        path = Path(path)
        if not path.is_file():
            raise SeedNotFound(f"Seed catalogue {str(path)!r} not found")
        try:
            data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as e:
            raise BadInput(f"{path}: invalid YAML ({e})") from e
        if not isinstance(data, dict):
            raise BadInput(f"{path}: expected a mapping with 'seeds' and/or 'extensions'")
        return cls(data)

    def fetch_seed(self, name: str) -> LabeledMultigraph:
        seeds = self.catalogue.get("seeds") or {}
        if name in seeds:
            return LabeledMultigraph.from_dict(seeds[name])
        return load_graph(name)

    def fetch_extension(self, name: str) -> ExtensionSpec:
        extensions = self.catalogue.get("extensions") or {}
        if name not in extensions:
            raise SeedNotFound(f"No extension {name!r} in the seed catalogue")
        entry = extensions[name]
        try:
            seed = entry["seed"]
            if isinstance(seed, dict):
                graph = LabeledMultigraph.from_dict(seed)
            elif seed in (self.catalogue.get("seeds") or {}):
                graph = self.fetch_seed(seed)
            else:
                graph = BuiltinSeedProvider().fetch_seed(seed)
            return ExtensionSpec(
                name=name,
                seed=graph,
                levels=int(entry.get("levels", 3)),
                images=tuple(str(w) for w in entry["images"]),
                acting_order=entry.get("acting_order"),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise BadInput(f"Malformed extension entry {name!r}: {e}") from e

    def names(self) -> list[str]:
        return sorted((self.catalogue.get("seeds") or {}).keys())
