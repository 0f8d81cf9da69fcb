"""Seed providers - builtin families, then a YAML catalogue or graph files.

Set BOXSPACE_SEED_CATALOGUE to a YAML file to add named seeds and extension
specs (default: data/seeds.yaml when present).
"""

import os
from pathlib import Path

from ..errors import SeedNotFound
from ..multigraph import LabeledMultigraph
from .base import ExtensionSpec, SeedProvider
from .builtin import BuiltinSeedProvider
from .file import FileSeedProvider

DEFAULT_CATALOGUE = "data/seeds.yaml"


def get_file_provider() -> FileSeedProvider:
    path = os.environ.get("BOXSPACE_SEED_CATALOGUE", DEFAULT_CATALOGUE)
    if path and Path(path).is_file():
        return FileSeedProvider.from_yaml(path)
    return FileSeedProvider()


def resolve_seed(name: str) -> LabeledMultigraph:
    """Builtin seed by name, else catalogue seed, else graph JSON path."""
    try:
        return BuiltinSeedProvider().fetch_seed(name)
    except SeedNotFound:
        return get_file_provider().fetch_seed(name)


def resolve_extension(name: str) -> ExtensionSpec:
    try:
        return BuiltinSeedProvider().fetch_extension(name)
    except SeedNotFound:
        return get_file_provider().fetch_extension(name)


__all__ = [
    "BuiltinSeedProvider",
    "ExtensionSpec",
    "FileSeedProvider",
    "SeedProvider",
    "resolve_extension",
    "resolve_seed",
]
