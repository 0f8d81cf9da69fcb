"""Seeds and extension specs that ship as code."""

from ..errors import SeedNotFound
from ..multigraph import LabeledMultigraph, bridged_seed, cycle, rose, theta
from .base import ExtensionSpec

BUILTIN_SEEDS = {
    "ags-rose": lambda: rose(2),
    "cycle4": lambda: cycle(4),
    "theta": lambda: theta(3),
    "bridged": bridged_seed,
    "semidirect-swap": lambda: rose(2),
    "dihedral": lambda: cycle(4),
}

BUILTIN_EXTENSIONS = {
    # (Z/2)^2 and the order-128 level, generators swapped: Gamma orders 8 and 256
    "semidirect-swap": lambda: ExtensionSpec("semidirect-swap", rose(2), levels=3, images=("b", "a")),
    # cycles of length 8, 16, 32 under inversion: dihedral groups
    "dihedral": lambda: ExtensionSpec("dihedral", cycle(4), levels=4, images=("A",)),
}


class BuiltinSeedProvider:
    """Provider backed by the builtin families."""

    def fetch_seed(self, name: str) -> LabeledMultigraph:
        if name not in BUILTIN_SEEDS:
            raise SeedNotFound(f"No builtin seed {name!r} (known: {', '.join(sorted(BUILTIN_SEEDS))})")
        return BUILTIN_SEEDS[name]()

    def fetch_extension(self, name: str) -> ExtensionSpec:
        if name not in BUILTIN_EXTENSIONS:
            raise SeedNotFound(
                f"No builtin extension {name!r} (known: {', '.join(sorted(BUILTIN_EXTENSIONS))})"
            )
        return BUILTIN_EXTENSIONS[name]()

    def names(self) -> list[str]:
        return sorted(BUILTIN_SEEDS)
