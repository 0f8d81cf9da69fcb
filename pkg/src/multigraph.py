"""Finite labeled multigraphs and the graph algorithms everything else consumes.

Conventions (used throughout the package):
    - edges are oriented (src, dst, label) triples; loops and parallel edges are allowed
    - metrics treat every edge as undirected with unit length
    - a loop counts 1 toward girth and 2 toward degree; parallel edges count separately
    - BFS visits neighbours by ascending vertex index, then edge index
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .errors import BadInput, DisconnectedGraph, NotRegular
from .linalg import eig_sym

Edge = tuple[int, int, int]


@dataclass(frozen=True)
class LabeledMultigraph:
    """A finite multigraph with generator-labeled, oriented edges and a basepoint."""

    vertex_count: int
    edges: tuple[Edge, ...]
    basepoint: int = 0

    def __post_init__(self):
        edges = tuple((int(s), int(d), int(lbl)) for s, d, lbl in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.vertex_count < 0:
            raise BadInput(f"vertex_count must be nonnegative, got {self.vertex_count}")
        for index, (src, dst, label) in enumerate(edges):
            if not (0 <= src < self.vertex_count and 0 <= dst < self.vertex_count):
                raise BadInput(f"Edge {index} ({src}, {dst}) out of range for {self.vertex_count} vertices")
            if label < 0:
                raise BadInput(f"Edge {index} has negative label {label}")
        if self.vertex_count > 0 and not 0 <= self.basepoint < self.vertex_count:
            raise BadInput(f"Basepoint {self.basepoint} out of range")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def label_count(self) -> int:
        return 1 + max((label for _, _, label in self.edges), default=-1)

    def incidence(self) -> list[list[tuple[int, int]]]:
        """Undirected incidence lists of (neighbour, edge index), sorted for deterministic BFS.

        A loop appears once in its vertex's list.
        """
        adjacency: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for index, (src, dst, _) in enumerate(self.edges):
            adjacency[src].append((dst, index))
            if dst != src:
                adjacency[dst].append((src, index))
        for entries in adjacency:
            entries.sort()
        return adjacency

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.vertex_count, dtype=np.int64)
        for src, dst, _ in self.edges:
            deg[src] += 1
            deg[dst] += 1
        return deg

    def to_dict(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "basepoint": self.basepoint,
            "edges": [list(e) for e in self.edges],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LabeledMultigraph":
        try:
            return cls(
                vertex_count=int(data["vertex_count"]),
                edges=tuple(tuple(e) for e in data["edges"]),
                basepoint=int(data.get("basepoint", 0)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise BadInput(f"Malformed graph JSON: {e}") from e

    def to_networkx(self, directed: bool = False) -> nx.MultiGraph | nx.MultiDiGraph:
        """Convert to networkx, keeping edge indices as keys and labels as attributes."""
        graph = nx.MultiDiGraph() if directed else nx.MultiGraph()
        graph.add_nodes_from(range(self.vertex_count))
        for index, (src, dst, label) in enumerate(self.edges):
            graph.add_edge(src, dst, key=index, label=label)
        return graph

    def relabel(self, permutation: list[int] | np.ndarray) -> "LabeledMultigraph":
        """Rename vertex v to permutation[v]; edge order and labels are kept."""
        perm = [int(p) for p in permutation]
        if sorted(perm) != list(range(self.vertex_count)):
            raise BadInput("relabel needs a permutation of the vertex set")
        return LabeledMultigraph(
            vertex_count=self.vertex_count,
            edges=tuple((perm[s], perm[d], lbl) for s, d, lbl in self.edges),
            basepoint=perm[self.basepoint] if self.vertex_count else 0,
        )


@dataclass(frozen=True)
class CycleBasis:
    """Spanning tree and GF(2) cycle-space coordinates of a connected multigraph.

    crossing[e, j] is 1 iff edge e lies on the fundamental cycle of the j-th
    cotree edge. tree_paths[v, e] is 1 iff edge e lies on the tree path from
    the basepoint to v.
    """

    tree_edges: frozenset[int]
    cotree_edges: tuple[int, ...]
    rank: int
    crossing: np.ndarray = field(repr=False)
    tree_paths: np.ndarray = field(repr=False)
    order: tuple[int, ...] = field(repr=False, default=())


def is_connected(g: LabeledMultigraph) -> bool:
    if g.vertex_count <= 1:
        return True
    return nx.is_connected(g.to_networkx())


def bfs_metric(g: LabeledMultigraph) -> np.ndarray:
    """All-pairs shortest-path distances, every edge undirected with unit length.

    Raises:
        DisconnectedGraph: if some pair of vertices is not joined by a path
    """
    log = logging.getLogger("bfs_metric")
    n = g.vertex_count
    if not is_connected(g):
        raise DisconnectedGraph(f"Graph with {n} vertices is disconnected")

    d = np.zeros((n, n), dtype=np.int64)
    for source, lengths in nx.all_pairs_shortest_path_length(g.to_networkx()):
        for target, length in lengths.items():
            d[source, target] = length
    log.debug(f"{n} vertices, diameter {diameter(d)}")
    return d


def diameter(metric: np.ndarray) -> float:
    metric = np.asarray(metric)
    if metric.size == 0:
        return 0
    value = metric.max()
    return int(value) if np.issubdtype(metric.dtype, np.integer) else float(value)


def girth(g: LabeledMultigraph) -> int | float:
    """Length of the shortest cycle; math.inf for forests.

    A loop is a cycle of length 1 and a parallel pair a cycle of length 2.
    """
    if any(src == dst for src, dst, _ in g.edges):
        return 1
    seen_pairs: set[tuple[int, int]] = set()
    for src, dst, _ in g.edges:
        pair = (min(src, dst), max(src, dst))
        if pair in seen_pairs:
            return 2
        seen_pairs.add(pair)

    adjacency = g.incidence()
    best = math.inf
    for root in range(g.vertex_count):
        dist = [-1] * g.vertex_count
        parent_edge = [-1] * g.vertex_count
        dist[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] >= best:
                break
            for w, e in adjacency[u]:
                if e == parent_edge[u]:
                    continue
                if dist[w] == -1:
                    dist[w] = dist[u] + 1
                    parent_edge[w] = e
                    queue.append(w)
                else:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


def cycle_basis(g: LabeledMultigraph) -> CycleBasis:
    """Spanning tree by deterministic BFS from the basepoint, plus GF(2) coordinates.

    Raises:
        DisconnectedGraph: if the BFS does not reach every vertex
    """
    n, m = g.vertex_count, g.edge_count
    tree_paths = np.zeros((n, m), dtype=np.uint8)
    tree_edges: set[int] = set()
    order: list[int] = []

    if n > 0:
        adjacency = g.incidence()
        visited = [False] * n
        visited[g.basepoint] = True
        queue = deque([g.basepoint])
        while queue:
            u = queue.popleft()
            order.append(u)
            for w, e in adjacency[u]:
                if not visited[w]:
                    visited[w] = True
                    tree_edges.add(e)
                    tree_paths[w] = tree_paths[u]
                    tree_paths[w, e] ^= 1
                    queue.append(w)
        if len(order) != n:
            raise DisconnectedGraph(
                f"BFS from basepoint reached {len(order)} of {n} vertices",
                witness={"unreached": [v for v in range(n) if not visited[v]][:10]},
            )

    cotree = tuple(e for e in range(m) if e not in tree_edges)
    rank = len(cotree)
    crossing = np.zeros((m, rank), dtype=np.uint8)
    if rank:
        src = np.array([g.edges[e][0] for e in cotree])
        dst = np.array([g.edges[e][1] for e in cotree])
        crossing[:] = (tree_paths[src] ^ tree_paths[dst]).T
        crossing[list(cotree), :] = np.eye(rank, dtype=np.uint8)

    return CycleBasis(
        tree_edges=frozenset(tree_edges),
        cotree_edges=cotree,
        rank=rank,
        crossing=crossing,
        tree_paths=tree_paths,
        order=tuple(order),
    )


def bridges(g: LabeledMultigraph, basis: CycleBasis | None = None) -> list[int]:
    """Edges lying on no cycle: tree edges no fundamental cycle passes through."""
    basis = basis or cycle_basis(g)
    return sorted(e for e in basis.tree_edges if not basis.crossing[e].any())


def is_two_edge_connected(g: LabeledMultigraph) -> bool:
    """True iff g is connected and has no bridge."""
    if not is_connected(g):
        return False
    return not bridges(g)


def adjacency_matrix(g: LabeledMultigraph) -> np.ndarray:
    """Symmetric adjacency counts; a loop adds 2 on the diagonal."""
    a = np.zeros((g.vertex_count, g.vertex_count))
    for src, dst, _ in g.edges:
        if src == dst:
            a[src, src] += 2
        else:
            a[src, dst] += 1
            a[dst, src] += 1
    return a


def spectrum(g: LabeledMultigraph, method: str = "lapack") -> np.ndarray:
    """Eigenvalues of the degree-normalized adjacency matrix, descending.

    Raises:
        DisconnectedGraph: if g is disconnected
        NotRegular: if vertex degrees differ (loops counted twice)
    """
    log = logging.getLogger("spectrum")
    if not is_connected(g):
        raise DisconnectedGraph("spectrum needs a connected graph")
    deg = g.degrees()
    if deg.size and (deg.min() != deg.max() or deg[0] == 0):
        raise NotRegular(
            f"Degrees range over [{deg.min()}, {deg.max()}]",
            witness={"min_degree": int(deg.min()), "max_degree": int(deg.max())},
        )
    if g.vertex_count == 0:
        return np.zeros(0)
    values, _ = eig_sym(adjacency_matrix(g) / deg[0], method=method)
    log.debug(f"{g.vertex_count} vertices, lambda_2={values[1] if len(values) > 1 else None}")
    return values


def is_label_isomorphic(g: LabeledMultigraph, h: LabeledMultigraph) -> bool:
    """Isomorphism of oriented multigraphs preserving edge labels (basepoints ignored)."""
    if g.vertex_count != h.vertex_count or g.edge_count != h.edge_count:
        return False

    def same_labels(first: dict, second: dict) -> bool:
        return sorted(d["label"] for d in first.values()) == sorted(d["label"] for d in second.values())

    return nx.is_isomorphic(
        g.to_networkx(directed=True),
        h.to_networkx(directed=True),
        edge_match=same_labels,
    )


# === Builtin families ===


def rose(k: int) -> LabeledMultigraph:
    """Bouquet of k loops: the Cayley graph of the trivial quotient of F_k."""
    return LabeledMultigraph(vertex_count=1, edges=tuple((0, 0, j) for j in range(k)))


def cycle(n: int) -> LabeledMultigraph:
    """Oriented n-cycle, every edge labelled 0: the Cayley graph of Z/n."""
    return LabeledMultigraph(vertex_count=n, edges=tuple((i, (i + 1) % n, 0) for i in range(n)))


def theta(m: int = 3) -> LabeledMultigraph:
    """Two vertices joined by m parallel edges with distinct labels."""
    return LabeledMultigraph(vertex_count=2, edges=tuple((0, 1, j) for j in range(m)))


def path(n: int) -> LabeledMultigraph:
    return LabeledMultigraph(vertex_count=n, edges=tuple((i, i + 1, 0) for i in range(n - 1)))


def bridged_seed() -> LabeledMultigraph:
    """A triangle with a pendant edge: connected but not 2-edge-connected."""
    return LabeledMultigraph(vertex_count=4, edges=((0, 1, 0), (1, 2, 0), (2, 0, 0), (2, 3, 0)))
