"""Unit-vector data for a sequence of extensions 1 -> H_i -> Gamma_i -> G_i -> 1.

Given property-A vectors phi_G on the G box space and Gaussian vectors psi
on the H box space, every gamma in Gamma_i gets a finitely supported map
G-point -> Hilbert vector:

    gamma in the first N_R components:  phi(gamma)(pi(e_1)) = psi(e_1)
    otherwise, g in G_i:                phi(gamma)(g) = phi_G(pi(gamma), g) psi(eta(gamma, g))
    otherwise, g outside G_i:           phi(gamma)(g) = phi_G(pi(gamma), g) psi(e_i)

with eta(gamma, g) = sigma(g)^-1 gamma sigma(pi(gamma)^-1 g). Each map is
stored as a weight W[gamma, g] and an H-box label L[gamma, g], so that

    <phi(a), phi(b)> = sum_g W[a, g] W[b, g] <psi(L[a, g]), psi(L[b, g])>.

The three box spaces share Gamma's gaps, which makes the H box metric the
restriction of the Gamma box metric and the G box metric its quotient.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np

from .boxspace import BoxSpace, Component, assemble
from .config import get_settings
from .embedding import UnitVectorMap, gaussian_unit_map, propA_ball_map, wall_box_metric
from .errors import ConditionViolated, EtaEscapesH, InequalityViolated
from .semidirect import ExtensionTriple

KernelChoice = Literal["auto", "wall", "induced"]

WIDENING_ROUNDS = 16


@dataclass(frozen=True)
class ExtensionBoxes:
    triples: tuple[ExtensionTriple, ...]
    gamma: BoxSpace
    h: BoxSpace
    g: BoxSpace

    @cached_property
    def gamma_metric(self) -> np.ndarray:
        return self.gamma.global_matrix()

    @cached_property
    def h_metric(self) -> np.ndarray:
        return self.h.global_matrix()

    @cached_property
    def g_metric(self) -> np.ndarray:
        return self.g.global_matrix()

    @property
    def has_walls(self) -> bool:
        return all(c.walls is not None for c in self.h.components)


def assemble_extension_boxes(triples: list[ExtensionTriple], gap_rule=None) -> ExtensionBoxes:
    """Gamma, H (induced metric) and G box spaces on one shared gap sequence."""
    gamma = assemble([Component(t.gamma.metric, t.gamma.identity) for t in triples], gap_rule)
    gaps = list(gamma.gaps)
    h = assemble(
        [Component(t.induced_h_metric(), t.h_identity, t.h_walls) for t in triples],
        gaps,
    )
    g = assemble([Component(t.g_quotient.metric, t.g_quotient.identity) for t in triples], gaps)
    return ExtensionBoxes(triples=tuple(triples), gamma=gamma, h=h, g=g)


# === eta ===


@dataclass(frozen=True)
class EtaTable:
    """values[gamma, g] is a Gamma vertex lying in H."""

    values: np.ndarray = field(repr=False)
    h_index: np.ndarray = field(repr=False)


def eta_table(triple: ExtensionTriple) -> EtaTable:
    """eta(gamma, g) = sigma(g)^-1 gamma sigma(pi(gamma)^-1 g) for every pair.

    Raises:
        EtaEscapesH: if some value falls outside H
    """
    gamma, g_group = triple.gamma, triple.g_quotient
    n, d = gamma.order, g_group.order
    shifted = g_group.table[g_group.inverses[triple.pi][:, None], np.arange(d)[None, :]]
    right = gamma.table[np.arange(n)[:, None], triple.sigma[shifted]]
    values = gamma.table[gamma.inverses[triple.sigma][None, :], right]

    h_index = triple.h_positions[values]
    escaped = np.argwhere(h_index < 0)
    if escaped.size:
        x, g = escaped[0].tolist()
        raise EtaEscapesH(
            f"eta({x}, {g}) = {int(values[x, g])} is not in H",
            witness={"gamma": x, "g": g, "value": int(values[x, g])},
        )
    return EtaTable(values=values, h_index=h_index)


# === Distance inequalities through eta ===


def lemma_dg_check(
    triple: ExtensionTriple,
    d_gamma: np.ndarray | None = None,
    d_g: np.ndarray | None = None,
    eta: EtaTable | None = None,
) -> dict:
    """Check, for all gamma1, gamma2 in Gamma and g in G, with a_k = d_G(g, pi(gamma_k)):

        d_Gamma(gamma1, gamma2) <= a_1 + a_2 + d_H(eta(gamma1, g), eta(gamma2, g))
        d_H(eta(gamma1, g), eta(gamma2, g)) <= a_1 + a_2 + d_Gamma(gamma1, gamma2)

    d_H is d_Gamma restricted to H.

    Raises:
        InequalityViolated: with the first violating triple
    """
    log = logging.getLogger("lemma_dg_check")
    d_gamma = triple.gamma.metric if d_gamma is None else d_gamma
    d_g = triple.g_quotient.metric if d_g is None else d_g
    eta = eta or eta_table(triple)

    histogram: dict[int, int] = {}
    worst = {"lower": math.inf, "upper": math.inf}
    for g in range(triple.g_quotient.order):
        a = d_g[g, triple.pi]
        detour = a[:, None] + a[None, :]
        e = eta.values[:, g]
        d_h = d_gamma[np.ix_(e, e)]
        for name, slack in (("lower", detour + d_h - d_gamma), ("upper", detour + d_gamma - d_h)):
            lowest = int(slack.min())
            if lowest < 0:
                x, y = np.unravel_index(int(np.argmin(slack)), slack.shape)
                raise InequalityViolated(
                    f"{name} inequality fails by {-lowest} at gamma1={x}, gamma2={y}, g={g}",
                    witness={"inequality": name, "gamma1": int(x), "gamma2": int(y), "g": g},
                )
            worst[name] = min(worst[name], lowest)
            values, counts = np.unique(slack, return_counts=True)
            for v, c in zip(values.tolist(), counts.tolist()):
                histogram[v] = histogram.get(v, 0) + c

    checked = triple.order**2 * triple.g_quotient.order
    worst_lower, worst_upper = int(worst["lower"]), int(worst["upper"])
    log.info(f"|Gamma| = {triple.order}: {checked} triples, min slack {worst_lower}/{worst_upper}")
    return {
        "triples_checked": checked,
        "max_violation": -min(worst_lower, worst_upper),
        "min_slack_lower": worst_lower,
        "min_slack_upper": worst_upper,
        "slack_histogram": dict(sorted(histogram.items())),
    }


# === phi ===


@dataclass
class PhiGamma:
    R: float
    eps: float
    n_r: int
    s_g: float
    m_gamma: float
    t: float
    kernel: str
    weights: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    psi: UnitVectorMap = field(repr=False)
    boxes: ExtensionBoxes = field(repr=False)

    @cached_property
    def inner_products(self) -> np.ndarray:
        n = self.weights.shape[0]
        gram = np.zeros((n, n))
        psi_gram = self.psi.gram
        for g in range(self.weights.shape[1]):
            support = np.flatnonzero(self.weights[:, g])
            if support.size == 0:
                continue
            w = self.weights[support, g]
            lbl = self.labels[support, g]
            gram[np.ix_(support, support)] += np.outer(w, w) * psi_gram[np.ix_(lbl, lbl)]
        return gram

    def norms(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.inner_products), 0.0, None))

    def vector(self, gamma: int) -> dict[int, np.ndarray]:
        """phi(gamma) as G-point -> Hilbert vector, support only."""
        return {
            int(g): self.weights[gamma, g] * self.psi.vectors[self.labels[gamma, g]]
            for g in np.flatnonzero(self.weights[gamma])
        }

    def s_h(self, delta: float) -> int:
        """Smallest integer S with <psi(h1), psi(h2)> < delta whenever d_H(h1, h2) >= S."""
        if self.kernel == "induced":
            return math.floor(-math.log(delta) / self.t) + 1
        d_h = self.boxes.h_metric
        return int(d_h[self.psi.gram >= delta].max()) + 1


def cutoff_index(gaps: tuple[float, ...], R: float) -> int:
    """Smallest n >= 1 with every gap between components i and i+1 exceeding R for i >= n."""
    n_r = 1
    for i, gap in enumerate(gaps, start=1):
        if gap <= R:
            n_r = i + 1
    return n_r


def build_phi_gamma(
    triples: list[ExtensionTriple] | ExtensionBoxes,
    R: float,
    eps: float,
    t: float | None = None,
    kernel: KernelChoice = "auto",
) -> PhiGamma:
    """Assemble phi(gamma) for every gamma in the Gamma box space.

    Args:
        triples: extension triples (or boxes already assembled from them)
        R: distance scale of the closeness condition
        eps: closeness tolerance; phi_G and psi each get eps/2
        t: Gaussian parameter override
        kernel: "wall" uses the wall box metric on H, "induced" the restricted
            Gamma metric, "auto" walls when every H component carries them
    """
    log = logging.getLogger("build_phi_gamma")
    boxes = triples if isinstance(triples, ExtensionBoxes) else assemble_extension_boxes(triples)
    chosen = "wall" if kernel == "wall" or (kernel == "auto" and boxes.has_walls) else "induced"

    s_g, phi_g = propA_ball_map(boxes.g_metric, R, eps / 2)

    d_h = boxes.h_metric
    kernel_metric = wall_box_metric(boxes.h) if chosen == "wall" else d_h
    bound = 2 * s_g + R
    if chosen == "wall":
        spread = max(1.0, float(kernel_metric[d_h <= bound].max()))
    else:
        spread = max(1.0, float(bound))
    t = -math.log(1 - eps / 2) / spread if t is None else t
    psi = gaussian_unit_map(kernel_metric, t)

    n_r = cutoff_index(boxes.gamma.gaps, R)
    gamma_off, h_off, g_off = boxes.gamma.offsets, boxes.h.offsets, boxes.g.offsets
    cutoff_end = int(gamma_off[min(n_r, len(boxes.triples))])
    m_gamma = boxes.gamma_metric[:cutoff_end, :cutoff_end].max().item()

    weights = np.zeros((boxes.gamma.size, boxes.g.size))
    labels = np.zeros((boxes.gamma.size, boxes.g.size), dtype=np.int64)
    g_start = boxes.g.index(0, boxes.g.components[0].basepoint)
    h_start = boxes.h.index(0, boxes.h.components[0].basepoint)
    for i, triple in enumerate(boxes.triples):
        rows = slice(int(gamma_off[i]), int(gamma_off[i + 1]))
        if i < n_r:
            weights[rows, g_start] = 1.0
            labels[rows, g_start] = h_start
            continue
        weights[rows] = phi_g.vectors[g_off[i] + triple.pi]
        labels[rows] = boxes.h.index(i, triple.h_identity)
        labels[rows, int(g_off[i]) : int(g_off[i + 1])] = h_off[i] + eta_table(triple).h_index

    log.info(f"R = {R}, eps = {eps}: N_R = {n_r}, S_G = {s_g}, M_Gamma = {m_gamma}, t = {t:.6g} ({chosen} kernel)")
    return PhiGamma(
        R=R,
        eps=eps,
        n_r=n_r,
        s_g=s_g,
        m_gamma=m_gamma,
        t=t,
        kernel=chosen,
        weights=weights,
        labels=labels,
        psi=psi,
        boxes=boxes,
    )


# === conditions ===


def separation_threshold(phi: PhiGamma, delta: float) -> tuple[int, float]:
    """(S_H, S) with S = 3 S_G + 3 S_H + M_Gamma, S_H taken at delta / 3."""
    s_h = phi.s_h(delta / 3)
    return s_h, 3 * phi.s_g + 3 * s_h + phi.m_gamma


def separating_boxes(
    triples: list[ExtensionTriple],
    grid: list[dict],
    t: float | None = None,
    kernel: KernelChoice = "auto",
    max_rounds: int = WIDENING_ROUNDS,
) -> ExtensionBoxes:
    """Extension boxes whose every gap exceeds R and S at each grid point.

    Starts from the default gap rule. While some gap is within reach, every gap
    is raised past the largest reach and the grid is rebuilt. S stops depending
    on the gaps once they clear the kernel's range, so the loop settles.

    Raises:
        ConditionViolated: if the gaps still fall short after max_rounds
    """
    log = logging.getLogger("separating_boxes")
    boxes = assemble_extension_boxes(triples)
    reach = 0.0
    for rounds in range(1, max_rounds + 1):
        reach = 0.0
        for point in grid:
            phi = build_phi_gamma(boxes, point["R"], point["eps"], t, kernel)
            reach = max(reach, point["R"], separation_threshold(phi, point["delta"])[1])
        if min(boxes.gamma.gaps, default=math.inf) > reach:
            log.info(f"Gaps {list(boxes.gamma.gaps)} clear reach {reach} after {rounds} round(s)")
            return boxes
        wider = math.floor(reach) + 1
        boxes = assemble_extension_boxes(triples, [max(gap, wider) for gap in boxes.gamma.gaps])
        log.debug(f"Round {rounds}: reach {reach}, gaps widened to {list(boxes.gamma.gaps)}")

    raise ConditionViolated(
        f"Gaps {list(boxes.gamma.gaps)} still within reach {reach} after {max_rounds} rounds",
        witness={"condition": "separation", "gaps": list(boxes.gamma.gaps), "reach": reach},
    )


def _min_with_witness(margin: np.ndarray, mask: np.ndarray) -> tuple[float | None, list[int] | None]:
    if not mask.any():
        return None, None
    masked = np.where(mask, margin, np.inf)
    x, y = np.unravel_index(int(np.argmin(masked)), masked.shape)
    return float(masked[x, y]), [int(x), int(y)]


def verify_conditions(phi: PhiGamma, delta: float, strict: bool = True, tol_norm: float | None = None) -> dict:
    """Scan every pair for closeness at d <= R and separation at d >= 3 S_G + 3 S_H + M_Gamma.

    Margins are eps - |1 - <phi, phi>| and delta - |<phi, phi>|; both must be
    positive. A box with no pair at distance >= S has not shown separation and
    fails with reason "vacuous".

    Raises:
        ConditionViolated: when strict and some pair (or a norm) fails
    """
    log = logging.getLogger("verify_conditions")
    tol_norm = get_settings().tol_norm if tol_norm is None else tol_norm
    boxes = phi.boxes
    d_gamma = boxes.gamma_metric
    inner = phi.inner_products

    s_h, threshold = separation_threshold(phi, delta)
    norm_error = float(np.max(np.abs(phi.norms() - 1.0)))

    close = d_gamma <= phi.R
    far = d_gamma >= threshold
    margin_1, witness_1 = _min_with_witness(phi.eps - np.abs(1.0 - inner), close)
    margin_2, witness_2 = _min_with_witness(delta - np.abs(inner), far)
    if margin_2 is None:
        log.warning(f"No pair at distance >= {threshold} (box diameter {d_gamma.max()}); separation not shown")

    component = boxes.gamma.component_of()
    beyond = component >= phi.n_r
    upper = np.triu(far, k=1)
    cases = {
        "cutoff": int(np.count_nonzero(upper & ~(beyond[:, None] & beyond[None, :]))),
        "distinct_components": int(
            np.count_nonzero(upper & beyond[:, None] & beyond[None, :] & (component[:, None] != component[None, :]))
        ),
        "same_component": int(
            np.count_nonzero(upper & beyond[:, None] & beyond[None, :] & (component[:, None] == component[None, :]))
        ),
    }

    passed = (
        norm_error <= tol_norm
        and (margin_1 is None or margin_1 > 0)
        and margin_2 is not None
        and margin_2 > 0
    )
    witness = None
    if not passed:
        if norm_error > tol_norm:
            witness = {"norm_error": norm_error}
        elif margin_1 is not None and margin_1 <= 0:
            witness = {"condition": "closeness", "pair": witness_1, "margin": margin_1}
        elif margin_2 is None:
            witness = {"condition": "separation", "reason": "vacuous", "S": threshold, "diameter": d_gamma.max().item()}
        else:
            witness = {"condition": "separation", "pair": witness_2, "margin": margin_2}
    verdict = {
        "R": phi.R,
        "eps": phi.eps,
        "delta": delta,
        "S_G": phi.s_g,
        "S_H": s_h,
        "M_Gamma": phi.m_gamma,
        "N_R": phi.n_r,
        "S": threshold,
        "t": phi.t,
        "kernel": phi.kernel,
        "min_margin_1": margin_1,
        "min_margin_2": margin_2,
        "max_norm_error": norm_error,
        "pairs_checked_1": int(np.count_nonzero(np.triu(close))),
        "pairs_checked_2": int(np.count_nonzero(upper)),
        "cases": cases,
        "pass": bool(passed),
        "witness": witness,
    }
    log.info(
        f"R = {phi.R}, eps = {phi.eps}, delta = {delta}: S = {threshold}, "
        f"margins {margin_1} / {margin_2} -> {'PASS' if passed else 'FAIL'}"
    )

    if not passed and strict:
        raise ConditionViolated(f"Conditions fail at R = {phi.R}, eps = {phi.eps}, delta = {delta}", witness=witness)
    return verdict
