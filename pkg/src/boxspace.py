"""Box spaces: finite metric components chained through their basepoints.

Points are addressed either as (component, point) pairs or by a global index
(components laid out in order). Cross-component distances always route
through the basepoint chain:

    d(x, y) = d_i(x, e_i) + gaps[i] + ... + gaps[j-1] + d_j(e_j, y)
"""

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .covers import TowerReport
from .errors import BadInput, GapTooSmall, MismatchedPointSets
from .groups import QuotientGroup, Word
from .multigraph import bfs_metric

# Gap-sharing box spaces keep cross-component distances within this factor of each other.
CROSS_COMPONENT_FACTOR = 3.0

GapRule = Callable[[float, float], float]


def default_gap_rule(diam_left: float, diam_right: float) -> float:
    return max(diam_left, diam_right) + 1


@dataclass(frozen=True)
class Component:
    metric: np.ndarray = field(repr=False)
    basepoint: int = 0
    walls: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        metric = np.asarray(self.metric)
        object.__setattr__(self, "metric", metric)
        if metric.ndim != 2 or metric.shape[0] != metric.shape[1] or metric.shape[0] == 0:
            raise BadInput(f"Component metric must be a nonempty square matrix, got {metric.shape}")
        if not 0 <= self.basepoint < metric.shape[0]:
            raise BadInput(f"Basepoint {self.basepoint} out of range")
        if self.walls is not None and self.walls.shape[0] != metric.shape[0]:
            raise BadInput("Wall table rows do not match the component size")

    @property
    def size(self) -> int:
        return self.metric.shape[0]

    @property
    def diameter(self) -> float:
        return self.metric.max().item()


@dataclass(frozen=True)
class BoxSpace:
    components: tuple[Component, ...]
    gaps: tuple[float, ...]

    @property
    def sizes(self) -> list[int]:
        return [c.size for c in self.components]

    @property
    def size(self) -> int:
        return sum(self.sizes)

    @property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.sizes)]).astype(np.int64)

    @property
    def chain_positions(self) -> np.ndarray:
        """Distance along the basepoint chain from e_0 to each e_i."""
        return np.concatenate([[0], np.cumsum(self.gaps)])

    def index(self, component: int, point: int) -> int:
        return int(self.offsets[component]) + point

    def locate(self, index: int) -> tuple[int, int]:
        component = int(np.searchsorted(self.offsets, index, side="right")) - 1
        return component, index - int(self.offsets[component])

    def component_of(self) -> np.ndarray:
        """Component number of every global index."""
        return np.repeat(np.arange(len(self.components)), self.sizes)

    def basepoint_indices(self) -> list[int]:
        return [self.index(i, c.basepoint) for i, c in enumerate(self.components)]

    def global_matrix(self) -> np.ndarray:
        return chain_matrix([c.metric for c in self.components], [c.basepoint for c in self.components], self.gaps)


def chain_matrix(metrics: Sequence[np.ndarray], basepoints: Sequence[int], gaps: Sequence[float]) -> np.ndarray:
    """Full distance matrix of components joined by a basepoint chain (no gap validation)."""
    sizes = [m.shape[0] for m in metrics]
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    positions = np.concatenate([[0], np.cumsum(gaps)])
    integral = all(np.issubdtype(m.dtype, np.integer) for m in metrics) and all(
        float(g).is_integer() for g in gaps
    )
    d = np.zeros((offsets[-1], offsets[-1]), dtype=np.int64 if integral else float)
    for i, (mi, bi) in enumerate(zip(metrics, basepoints)):
        for j, (mj, bj) in enumerate(zip(metrics, basepoints)):
            block = (slice(offsets[i], offsets[i + 1]), slice(offsets[j], offsets[j + 1]))
            if i == j:
                d[block] = mi
            else:
                chain = abs(positions[j] - positions[i])
                d[block] = mi[:, bi][:, None] + chain + mj[bj, :][None, :]
    return d


def assemble(
    components: Sequence[Component],
    gap_rule: GapRule | Sequence[float] | None = None,
) -> BoxSpace:
    """Chain components with gaps larger than both neighbours' diameters.

    Args:
        components: metric components with basepoints
        gap_rule: None (max(diam_k, diam_k+1) + 1), a function of the two
            diameters, or an explicit gap list

    Raises:
        GapTooSmall: if some gap does not exceed both neighbouring diameters
    """
    log = logging.getLogger("assemble")
    components = tuple(components)
    diameters = [c.diameter for c in components]
    if gap_rule is None or callable(gap_rule):
        rule = gap_rule or default_gap_rule
        gaps = [rule(diameters[k], diameters[k + 1]) for k in range(len(components) - 1)]
    else:
        gaps = list(gap_rule)
        if len(gaps) != len(components) - 1:
            raise BadInput(f"Need {len(components) - 1} gaps, got {len(gaps)}")

    for k, gap in enumerate(gaps):
        bound = max(diameters[k], diameters[k + 1])
        if not gap > bound:
            raise GapTooSmall(
                f"Gap {k} = {gap} does not exceed neighbouring diameter {bound}",
                witness={"index": k, "gap": gap, "diameters": [diameters[k], diameters[k + 1]]},
            )

    gaps = [int(g) if float(g).is_integer() else float(g) for g in gaps]
    log.info(f"{len(components)} components, sizes {[c.size for c in components]}, gaps {gaps}")
    return BoxSpace(components=components, gaps=tuple(gaps))


def from_tower(report: TowerReport, gap_rule: GapRule | Sequence[float] | None = None) -> BoxSpace:
    """Box space of a tower's cover levels (seed excluded), carrying their wall tables."""
    components = [
        Component(metric=bfs_metric(level.cover), basepoint=level.cover.basepoint, walls=level.walls)
        for level in report.levels
    ]
    return assemble(components, gap_rule)


def global_distance(b: BoxSpace, x: tuple[int, int], y: tuple[int, int]) -> float:
    (i, p), (j, q) = x, y
    ci, cj = b.components[i], b.components[j]
    if i == j:
        return ci.metric[p, q].item()
    positions = b.chain_positions
    chain = abs(positions[j] - positions[i])
    return (ci.metric[p, ci.basepoint] + chain + cj.metric[cj.basepoint, q]).item()


def common_gaps(diameter_lists: Sequence[Sequence[float]]) -> list[float]:
    """One gap sequence valid for several metrics on the same components."""
    lengths = {len(d) for d in diameter_lists}
    if len(lengths) != 1:
        raise MismatchedPointSets(f"Diameter lists have different lengths {sorted(lengths)}")
    count = lengths.pop()
    return [
        max(default_gap_rule(d[k], d[k + 1]) for d in diameter_lists)
        for k in range(count - 1)
    ]


@dataclass
class EnvelopePair:
    """Observed compression and expansion functions, tabulated at each observed distance t."""

    t: np.ndarray
    rho_minus: np.ndarray
    rho_plus: np.ndarray

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.rho_minus) >= 0) and np.all(np.diff(self.rho_plus) >= 0))

    @property
    def rho_minus_positive(self) -> bool:
        """rho_minus(t) > 0 at every observed t > 0."""
        return bool(np.all(self.rho_minus[self.t > 0] > 0))

    def rows(self) -> list[tuple[float, float, float]]:
        return [(a.item(), b.item(), c.item()) for a, b, c in zip(self.t, self.rho_minus, self.rho_plus)]

    def summary(self) -> dict:
        return {
            "observed_t": len(self.t),
            "t_max": self.t[-1].item() if len(self.t) else 0,
            "monotone": self.monotone,
            "rho_minus_positive": self.rho_minus_positive,
            "rho_minus_max": self.rho_minus[-1].item() if len(self.t) else 0,
            "rho_plus_max": self.rho_plus[-1].item() if len(self.t) else 0,
            "rho_minus_grows": bool(len(self.t) > 1 and self.rho_minus[-1] > self.rho_minus[self.t > 0][0]),
        }


def distortion_envelope(d1: np.ndarray, d2: np.ndarray) -> EnvelopePair:
    """rho_plus(t) = max{d2 : d1 <= t}, rho_minus(t) = min{d2 : d1 >= t} over all pairs.

    Raises:
        MismatchedPointSets: if the matrices differ in shape
    """
    d1, d2 = np.asarray(d1), np.asarray(d2)
    if d1.shape != d2.shape:
        raise MismatchedPointSets(f"Metric shapes differ: {d1.shape} vs {d2.shape}")
    if d1.size == 0:
        return EnvelopePair(np.zeros(0), np.zeros(0), np.zeros(0))

    first, second = d1.ravel(), d2.ravel()
    order = np.argsort(first, kind="stable")
    first, second = first[order], second[order]
    t, starts = np.unique(first, return_index=True)
    group_max = np.maximum.reduceat(second, starts)
    group_min = np.minimum.reduceat(second, starts)
    rho_plus = np.maximum.accumulate(group_max)
    rho_minus = np.minimum.accumulate(group_min[::-1])[::-1]
    return EnvelopePair(t=t, rho_minus=rho_minus, rho_plus=rho_plus)


def cross_component_ratio(b1: BoxSpace, b2: BoxSpace) -> tuple[float, float]:
    """(min, max) of d2/d1 over pairs in different components."""
    if b1.sizes != b2.sizes:
        raise MismatchedPointSets(f"Component sizes differ: {b1.sizes} vs {b2.sizes}")
    labels = b1.component_of()
    cross = labels[:, None] != labels[None, :]
    if not cross.any():
        return 1.0, 1.0
    ratio = b2.global_matrix()[cross] / b1.global_matrix()[cross]
    return float(ratio.min()), float(ratio.max())


def cross_ratio_within(low: float, high: float, factor: float = CROSS_COMPONENT_FACTOR) -> bool:
    """Whether a (min, max) cross-component ratio lies in [1 / factor, factor]."""
    return 1 / factor <= low and high <= factor


def combined_envelope(env: EnvelopePair, factor: float = CROSS_COMPONENT_FACTOR) -> EnvelopePair:
    """Envelope widened to cover the cross-component estimate d1 / factor <= d2 <= factor d1."""
    return EnvelopePair(
        t=env.t,
        rho_minus=np.minimum(env.t / factor, env.rho_minus),
        rho_plus=np.maximum(factor * env.t, env.rho_plus),
    )


def generating_set_change(report: TowerReport, gens: Sequence[Word]) -> tuple[BoxSpace, BoxSpace]:
    """The tower's box space under its own labels and under another generating list.

    Both box spaces live on the same points and share one gap sequence.

    Raises:
        BadGenerator: if gens do not generate some level
    """
    log = logging.getLogger("generating_set_change")
    groups = [QuotientGroup(level.cover) for level in report.levels]
    first = [Component(q.metric, q.identity) for q in groups]
    second = [Component(bfs_metric(q.cayley_graph(list(gens))), q.identity) for q in groups]
    gaps = common_gaps([[c.diameter for c in first], [c.diameter for c in second]])
    log.info(f"Generators {[str(w) for w in gens]}: diameters {[c.diameter for c in second]}, gaps {gaps}")
    return assemble(first, gaps), assemble(second, gaps)
