"""Base protocol for seed providers."""

from dataclasses import dataclass
from typing import Protocol

from ..multigraph import LabeledMultigraph


@dataclass(frozen=True)
class ExtensionSpec:
    """A cover tower plus the free-group automorphism acting on every level.

    levels counts tower graphs including the seed; the seed itself is not an
    H level.
    """

    name: str
    seed: LabeledMultigraph
    levels: int
    images: tuple[str, ...]
    acting_order: int | None = None


class SeedProvider(Protocol):
    """Protocol defining the interface for seed sources."""

    def fetch_seed(self, name: str) -> LabeledMultigraph:
        """Fetch a seed graph by name.

        Raises:
            SeedNotFound: if the provider has no such seed
        """
        ...

    def fetch_extension(self, name: str) -> ExtensionSpec:
        """Fetch an extension spec by name.

        Raises:
            SeedNotFound: if the provider has no such spec
        """
        ...

    def names(self) -> list[str]:
        ...
