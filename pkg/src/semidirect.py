"""Finite semidirect quotients H/N x| G/A and the extension triples built from them.

The acting group G is the integers or a finite cyclic group, generated by t,
and t acts on H/N through a certified automorphism alpha. Elements of the
finite semidirect product are pairs (h, s) with s in Z/d, d the order of
alpha, stored at index s * |H| + h, with

    (h1, s1)(h2, s2) = (h1 * alpha^s1(h2), s1 + s2).

Generators are (x_j, 0) for H's generators x_j (labels 0..k-1) and (e, 1)
(label k).
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .covers import CoverData, TowerReport
from .errors import (
    DiametersNotIncreasing,
    NotBijective,
    NotDividing,
    NotHomomorphic,
    SectionLengthMismatch,
)
from .groups import (
    QuotientGroup,
    Word,
    automorphism_order,
    compose,
    induced_automorphism,
    is_homomorphism,
)
from .multigraph import LabeledMultigraph


@dataclass(frozen=True)
class ActionSpec:
    """G = Z (acting_order None) or Z/m acting on h_quotient via generator_action."""

    h_quotient: QuotientGroup
    generator_action: np.ndarray = field(repr=False)
    acting_order: int | None = None

    def __post_init__(self):
        perm = np.asarray(self.generator_action, dtype=np.int64)
        object.__setattr__(self, "generator_action", perm)
        if sorted(perm.tolist()) != list(range(self.h_quotient.order)):
            raise NotBijective("Generator action is not a permutation of H")
        if not is_homomorphism(perm, self.h_quotient, self.h_quotient):
            raise NotHomomorphic("Generator action is not an automorphism of H")

    @property
    def acting_group(self) -> str:
        return "Z" if self.acting_order is None else f"Z/{self.acting_order}"


@dataclass(frozen=True)
class ActionKernel:
    """A = <t^order> acts trivially; G/A is cyclic of the given order."""

    order: int
    quotient: QuotientGroup


def cyclic_quotient_graph(d: int, h_generators: int) -> LabeledMultigraph:
    """Cayley multigraph of Z/d seen through the semidirect generators.

    H's generators map to the identity (loops); label h_generators steps s -> s + 1.
    """
    edges = [(s, s, j) for j in range(h_generators) for s in range(d)]
    edges += [(s, (s + 1) % d, h_generators) for s in range(d)]
    return LabeledMultigraph(vertex_count=d, edges=tuple(edges), basepoint=0)


def action_kernel(spec: ActionSpec, cap: int | None = None) -> ActionKernel:
    """Order d of the action and the finite quotient G/A = Z/d.

    Raises:
        OrderCapExceeded: if the automorphism order exceeds the cap
        NotDividing: for G = Z/m when d does not divide m
    """
    log = logging.getLogger("action_kernel")
    d = automorphism_order(spec.generator_action, cap)
    if spec.acting_order is not None and spec.acting_order % d != 0:
        raise NotDividing(
            f"Action of order {d} is not an action of Z/{spec.acting_order}",
            witness={"action_order": d, "acting_order": spec.acting_order},
        )
    log.info(f"G = {spec.acting_group}: action has order {d}, G/A = Z/{d}")
    quotient = QuotientGroup(cyclic_quotient_graph(d, spec.h_quotient.generator_count))
    return ActionKernel(order=d, quotient=quotient)


@dataclass(frozen=True)
class FiniteSemidirect:
    group: QuotientGroup
    h_part: np.ndarray = field(repr=False)
    quotient_order: int
    kernel: ActionKernel = field(repr=False)
    powers: np.ndarray = field(repr=False)

    @property
    def h_order(self) -> int:
        return len(self.h_part)

    def element(self, h: int, s: int) -> int:
        return (s % self.quotient_order) * self.h_order + h

    def pair(self, v: int) -> tuple[int, int]:
        return v % self.h_order, v // self.h_order


def build_semidirect(spec: ActionSpec) -> FiniteSemidirect:
    """Cayley multigraph of H/N x| G/A on generators (x_j, 0) and (e, 1), certified."""
    log = logging.getLogger("build_semidirect")
    kernel = action_kernel(spec)
    h = spec.h_quotient
    n, k, d = h.order, h.generator_count, kernel.order

    powers = np.empty((d, n), dtype=np.int64)
    powers[0] = np.arange(n)
    for s in range(1, d):
        powers[s] = compose(spec.generator_action, powers[s - 1])

    edges: list[tuple[int, int, int]] = []
    elements = np.arange(n)
    for j in range(k):
        x = h.generator_element(j)
        for s in range(d):
            targets = s * n + h.table[elements, powers[s][x]]
            edges.extend(zip((s * n + elements).tolist(), targets.tolist(), [j] * n))
    for s in range(d):
        edges.extend(zip((s * n + elements).tolist(), (((s + 1) % d) * n + elements).tolist(), [k] * n))

    graph = LabeledMultigraph(vertex_count=n * d, edges=tuple(edges), basepoint=h.identity)
    group = QuotientGroup(graph, generator_count=k + 1)
    group.verify_group_axioms()

    projection = np.arange(n * d) // n
    if not is_homomorphism(projection, group, kernel.quotient):
        raise NotHomomorphic("Second-coordinate projection is not a homomorphism")

    log.info(f"|H| = {n}, |G/A| = {d} -> semidirect of order {group.order}")
    return FiniteSemidirect(
        group=group,
        h_part=elements.copy(),
        quotient_order=d,
        kernel=kernel,
        powers=powers,
    )


@dataclass(frozen=True)
class ExtensionTriple:
    """1 -> H -> Gamma -> G -> 1 as explicit tables over Gamma's Cayley graph."""

    gamma: QuotientGroup
    h_elements: np.ndarray = field(repr=False)
    g_quotient: QuotientGroup = field(repr=False)
    pi: np.ndarray = field(repr=False)
    sigma: np.ndarray = field(repr=False)
    h_walls: np.ndarray | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return self.gamma.order

    @property
    def diameter(self) -> int:
        return int(self.gamma.metric.max())

    @cached_property
    def h_positions(self) -> np.ndarray:
        """Gamma vertex -> position in h_elements, or -1 outside H."""
        positions = np.full(self.gamma.order, -1, dtype=np.int64)
        positions[self.h_elements] = np.arange(len(self.h_elements))
        return positions

    @property
    def h_identity(self) -> int:
        return int(self.h_positions[self.gamma.identity])

    def induced_h_metric(self) -> np.ndarray:
        """d_Gamma restricted to H."""
        return self.gamma.metric[np.ix_(self.h_elements, self.h_elements)]

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma.graph.to_dict(),
            "h_elements": self.h_elements.tolist(),
            "g": self.g_quotient.graph.to_dict(),
            "pi": self.pi.tolist(),
            "sigma": self.sigma.tolist(),
        }


def make_triple(fs: FiniteSemidirect, h_walls: np.ndarray | None = None) -> ExtensionTriple:
    """Package a semidirect quotient with pi = second coordinate and a length-preserving section.

    sigma(g) is a preimage of minimal word length, lowest vertex index on ties.

    Raises:
        SectionLengthMismatch: if some |sigma(g)| differs from |g|
    """
    gamma, g_quotient = fs.group, fs.kernel.quotient
    n, d = fs.h_order, fs.quotient_order
    pi = np.arange(gamma.order) // n

    lengths = gamma.metric[gamma.identity]
    sigma = np.empty(d, dtype=np.int64)
    for g in range(d):
        preimages = g * n + np.arange(n)
        sigma[g] = preimages[int(np.argmin(lengths[preimages]))]

    g_lengths = g_quotient.metric[g_quotient.identity]
    mismatch = np.flatnonzero(lengths[sigma] != g_lengths)
    if mismatch.size:
        g = int(mismatch[0])
        raise SectionLengthMismatch(
            f"|sigma({g})| = {int(lengths[sigma[g]])} but |{g}| = {int(g_lengths[g])}",
            witness={"g": g},
        )
    if not np.array_equal(pi[sigma], np.arange(d)):
        raise NotHomomorphic("Section is not a right inverse of the projection")

    return ExtensionTriple(
        gamma=gamma,
        h_elements=fs.h_part.copy(),
        g_quotient=g_quotient,
        pi=pi,
        sigma=sigma,
        h_walls=h_walls,
    )


def extension_tower(
    h_levels: list[QuotientGroup],
    images: list[Word],
    acting_order: int | None = None,
    h_walls: list[np.ndarray | None] | None = None,
) -> list[ExtensionTriple]:
    """One extension triple per H level, all acted on by the same free-group automorphism.

    Raises:
        DiametersNotIncreasing: if the Gamma diameters do not strictly increase
    """
    log = logging.getLogger("extension_tower")
    h_walls = [None] * len(h_levels) if h_walls is None else h_walls
    triples = []
    for level, (q, walls) in enumerate(zip(h_levels, h_walls), start=1):
        perm = induced_automorphism(q, images)
        fs = build_semidirect(ActionSpec(q, perm, acting_order))
        triple = make_triple(fs, walls)
        log.info(f"Level {level}: |Gamma| = {triple.order}, |G| = {fs.quotient_order}, diam = {triple.diameter}")
        triples.append(triple)

    diameters = [t.diameter for t in triples]
    for i in range(1, len(diameters)):
        if diameters[i] <= diameters[i - 1]:
            raise DiametersNotIncreasing(
                f"Gamma diameters {diameters} do not strictly increase",
                witness={"diameters": diameters, "level": i + 1},
            )
    return triples


def verify_nesting(levels: list[CoverData]) -> bool:
    """Each cover projection is a surjective homomorphism onto the level below.

    Raises:
        NotHomomorphic: naming the first failing level
    """
    log = logging.getLogger("verify_nesting")
    for index, level in enumerate(levels, start=1):
        cover_group = QuotientGroup(level.cover)
        base_group = QuotientGroup(level.base, generator_count=cover_group.generator_count)
        projection = level.vertex_projection
        onto = len(set(projection.tolist())) == base_group.order
        if not (onto and is_homomorphism(projection, cover_group, base_group)):
            raise NotHomomorphic(
                f"Cover projection at level {index} is not a surjective homomorphism",
                witness={"level": index},
            )
    log.info(f"{len(levels)} cover projections are surjective homomorphisms")
    return True


def extension_from_tower(
    report: TowerReport,
    images: list[Word],
    acting_order: int | None = None,
) -> list[ExtensionTriple]:
    """Extension triples over a tower's cover levels, each carrying its wall table."""
    h_levels = [QuotientGroup(level.cover) for level in report.levels]
    return extension_tower(h_levels, images, acting_order, [level.walls for level in report.levels])
