"""Z/2-homology covers, inherited wall structures and cover towers.

A cover vertex is a pair (base vertex u, sheet s) with s a GF(2) vector of
length r = rank of the base cycle space, stored at index s * |V(base)| + u.
Tree edges lift horizontally; the j-th cotree edge flips sheet bit j.

The wall bit-table h has one row per cover vertex and one column per base
edge. h(x, e) is the parity with which any cover path from the basepoint to x
crosses (lifts of) e; a cover edge over e changes exactly column e.
"""

import logging
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .config import get_settings
from .errors import DisconnectedGraph, SizeCapExceeded
from .multigraph import (
    CycleBasis,
    LabeledMultigraph,
    bfs_metric,
    bridges,
    cycle_basis,
    girth,
    is_connected,
)


@dataclass(frozen=True)
class CoverData:
    """A homology cover with its projection to the base and its wall table."""

    cover: LabeledMultigraph
    base: LabeledMultigraph
    vertex_projection: np.ndarray = field(repr=False)
    edge_projection: np.ndarray = field(repr=False)
    deck_rank: int
    walls: np.ndarray = field(repr=False)
    basis: CycleBasis = field(repr=False)
    bridged: bool = False

    @property
    def sheets(self) -> int:
        return 2**self.deck_rank


@dataclass
class TowerReport:
    """Iterated homology covers of a seed graph."""

    seed: LabeledMultigraph
    levels: list[CoverData]
    sizes: list[int]
    girths: list[int | float]
    diameters: list[int]
    truncated: bool = False

    @property
    def graphs(self) -> list[LabeledMultigraph]:
        return [self.seed] + [level.cover for level in self.levels]

    def to_dict(self) -> dict:
        return {
            "sizes": self.sizes,
            "girths": [None if g == float("inf") else int(g) for g in self.girths],
            "diameters": self.diameters,
            "truncated": self.truncated,
        }


def homology_cover(base: LabeledMultigraph, size_cap: int | None = None) -> CoverData:
    """Build the Z/2-homology cover of a connected graph.

    Args:
        base: connected labeled multigraph (bridges allowed, with a warning)
        size_cap: maximum cover vertex count (default from BOXSPACE_SIZE_CAP)

    Raises:
        DisconnectedGraph: if base is disconnected
        SizeCapExceeded: if |V(base)| * 2^rank exceeds the cap
    """
    log = logging.getLogger("homology_cover")
    size_cap = get_settings().size_cap if size_cap is None else size_cap

    basis = cycle_basis(base)
    bridged = bool(bridges(base, basis))
    if bridged:
        log.warning(f"Base graph has bridges {bridges(base, basis)}; walls may degenerate")

    r = basis.rank
    n, m = base.vertex_count, base.edge_count
    cover_size = n * 2**r
    if cover_size > size_cap:
        raise SizeCapExceeded(
            f"Cover would have {n} * 2^{r} vertices (cap {size_cap})",
            witness={"base_vertices": n, "rank": r, "cap": size_cap},
        )
    sheets = 2**r
    log.info(f"Base V={n}, E={m}, rank={r} -> cover V={cover_size}, E={m * sheets}")

    sheet_ids = np.arange(sheets, dtype=np.int64)
    flips = np.zeros(m, dtype=np.int64)
    for j, e in enumerate(basis.cotree_edges):
        flips[e] = 1 << j

    src = np.array([e[0] for e in base.edges], dtype=np.int64)
    dst = np.array([e[1] for e in base.edges], dtype=np.int64)
    labels = np.array([e[2] for e in base.edges], dtype=np.int64)

    cover_src = (sheet_ids[:, None] * n + src[None, :]).ravel()
    cover_dst = ((sheet_ids[:, None] ^ flips[None, :]) * n + dst[None, :]).ravel()
    cover_labels = np.tile(labels, sheets)

    cover = LabeledMultigraph(
        vertex_count=cover_size,
        edges=tuple(zip(cover_src.tolist(), cover_dst.tolist(), cover_labels.tolist())),
        basepoint=base.basepoint,
    )

    bits = ((sheet_ids[:, None] >> np.arange(r)) & 1).astype(np.int64)
    cycle_part = (bits @ basis.crossing.T.astype(np.int64)) % 2
    walls = (basis.tree_paths[None, :, :] ^ cycle_part[:, None, :].astype(np.uint8)).reshape(cover_size, m)

    return CoverData(
        cover=cover,
        base=base,
        vertex_projection=np.tile(np.arange(n), sheets),
        edge_projection=np.tile(np.arange(m), sheets),
        deck_rank=r,
        walls=walls.astype(np.uint8),
        basis=basis,
        bridged=bridged,
    )


def wall_metric(c: CoverData) -> np.ndarray:
    """Number of walls separating each pair: Hamming distance of wall rows."""
    w = c.walls.astype(np.int64)
    return w @ (1 - w).T + (1 - w) @ w.T


def agreement_radius(c: CoverData, graph_metric: np.ndarray | None = None) -> int:
    """Largest t with wall metric == graph metric on every pair at graph distance < t."""
    d_graph = bfs_metric(c.cover) if graph_metric is None else graph_metric
    d_wall = wall_metric(c)
    mismatched = d_graph[d_wall != d_graph]
    if mismatched.size == 0:
        return int(d_graph.max()) + 1 if d_graph.size else 0
    return int(mismatched.min())


def agreement_report(c: CoverData) -> dict:
    """Agreement radius next to the base girth it is expected to reach."""
    log = logging.getLogger("agreement")
    radius = agreement_radius(c)
    base_girth = girth(c.base)
    report = {
        "cover_vertices": c.cover.vertex_count,
        "deck_rank": c.deck_rank,
        "agreement_radius": radius,
        "base_girth": None if base_girth == float("inf") else int(base_girth),
        "reaches_girth": bool(radius >= base_girth),
        "bridged_base": c.bridged,
        "warnings": [],
    }
    if c.bridged:
        report["warnings"].append("base graph has bridges; wall/graph agreement is not guaranteed")
    log.info(f"Agreement radius {radius} (base girth {report['base_girth']})")
    return report


def verify_wall_crossing(c: CoverData) -> list[int]:
    """Cover edges whose endpoints' wall rows do not differ in exactly their base edge.

    Returns an empty list when the wall-crossing law holds everywhere.
    """
    src = np.array([e[0] for e in c.cover.edges], dtype=np.int64)
    dst = np.array([e[1] for e in c.cover.edges], dtype=np.int64)
    diff = c.walls[src] ^ c.walls[dst]
    expected = np.zeros_like(diff)
    expected[np.arange(len(src)), c.edge_projection] = 1
    bad = np.nonzero((diff != expected).any(axis=1))[0]
    return bad.tolist()


def deck_transformation(c: CoverData, sheet: int) -> np.ndarray:
    """Vertex permutation (u, s) -> (u, s + sheet) of the deck group element `sheet`."""
    n = c.base.vertex_count
    index = np.arange(c.cover.vertex_count)
    return (((index // n) ^ sheet) * n + index % n).astype(np.int64)


def projection_is_covering(c: CoverData) -> bool:
    """Label-preserving graph map that is bijective on out-edges and on in-edges at every vertex."""
    base_edges = c.base.edges
    outgoing_base: list[list[int]] = [[] for _ in range(c.base.vertex_count)]
    incoming_base: list[list[int]] = [[] for _ in range(c.base.vertex_count)]
    for e, (src, dst, _) in enumerate(base_edges):
        outgoing_base[src].append(e)
        incoming_base[dst].append(e)

    outgoing: list[list[int]] = [[] for _ in range(c.cover.vertex_count)]
    incoming: list[list[int]] = [[] for _ in range(c.cover.vertex_count)]
    for i, (src, dst, label) in enumerate(c.cover.edges):
        e = int(c.edge_projection[i])
        b_src, b_dst, b_label = base_edges[e]
        if label != b_label or c.vertex_projection[src] != b_src or c.vertex_projection[dst] != b_dst:
            return False
        outgoing[src].append(e)
        incoming[dst].append(e)

    for x in range(c.cover.vertex_count):
        u = int(c.vertex_projection[x])
        if sorted(outgoing[x]) != outgoing_base[u] or sorted(incoming[x]) != incoming_base[u]:
            return False
    return set(c.vertex_projection.tolist()) == set(range(c.base.vertex_count))


def graph_diameter(g: LabeledMultigraph) -> int:
    if not is_connected(g):
        raise DisconnectedGraph("diameter needs a connected graph")
    if g.vertex_count <= 1:
        return 0
    return int(nx.diameter(g.to_networkx()))


def build_tower(
    seed: LabeledMultigraph,
    max_levels: int = 10,
    size_cap: int | None = None,
) -> TowerReport:
    """Iterate homology covers from a seed.

    Args:
        seed: connected starting graph (level 0)
        max_levels: maximum number of graphs in the report, seed included
        size_cap: cover vertex cap; hitting it truncates the tower instead of failing
    """
    log = logging.getLogger("build_tower")
    if not is_connected(seed):
        raise DisconnectedGraph("Tower seed must be connected")

    levels: list[CoverData] = []
    current = seed
    truncated = False
    while len(levels) + 1 < max_levels:
        try:
            level = homology_cover(current, size_cap)
        except SizeCapExceeded as e:
            log.warning(f"Truncated at level {len(levels) + 1}: {e.message}")
            truncated = True
            break
        levels.append(level)
        current = level.cover

    graphs = [seed] + [level.cover for level in levels]
    report = TowerReport(
        seed=seed,
        levels=levels,
        sizes=[g.vertex_count for g in graphs],
        girths=[girth(g) for g in graphs],
        diameters=[graph_diameter(g) for g in graphs],
        truncated=truncated,
    )
    log.info(f"Sizes {report.sizes}, girths {report.girths}, diameters {report.diameters}")
    return report
