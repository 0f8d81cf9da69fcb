"""Node functions for the verification graph."""

import logging
from typing import Literal

from .covers import build_tower as build_cover_tower
from .errors import BadInput, BoxSpaceError
from .extension import (
    assemble_extension_boxes,
    build_phi_gamma,
    lemma_dg_check,
    separating_boxes,
    verify_conditions,
)
from .groups import Word
from .providers import SeedProvider, resolve_extension
from .semidirect import extension_from_tower, verify_nesting
from .state import VerificationState

# Configure logging with node name in format
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(name)s] %(message)s",
    datefmt="%H:%M:%S",
)

DEFAULT_GRID = [
    {"R": R, "eps": eps, "delta": delta}
    for R in (1, 2, 4)
    for eps in (0.5, 0.25)
    for delta in (0.5, 0.25)
]

# Module-level dependencies (initialized via init_dependencies before graph runs)
# None falls back to the builtin extensions, then the seed catalogue.
_seed_provider: SeedProvider | None = None


def init_dependencies(seed_provider: SeedProvider | None = None):
    """Set the provider the build_tower node resolves extension names against.

    Example:
        from src.providers import FileSeedProvider

        init_dependencies(FileSeedProvider.from_yaml("data/seeds.yaml"))
    """
    global _seed_provider
    _seed_provider = seed_provider


def _error_update(log: logging.Logger, node: str, e: BoxSpaceError) -> dict:
    log.error(f"FAILED: {type(e).__name__}: {e.message}")
    return {"error": {**e.to_dict(), "exit_code": e.exit_code}, "failures": [node]}


def point_label(point: dict) -> str:
    return f"R={point['R']},eps={point['eps']},delta={point['delta']}"


def intake(state: VerificationState) -> dict:
    """Validate the parameter grid and initialize the run."""
    log = logging.getLogger("intake")
    log.info("=" * 60)
    log.info(f"Verifying extension {state.get('extension')!r}")
    grid = state.get("grid") or DEFAULT_GRID

    for point in grid:
        missing = [key for key in ("R", "eps", "delta") if key not in point]
        if missing:
            return _error_update(log, "intake", BadInput(f"Grid point {point} missing {missing}"))
        if point["R"] < 0 or not 0 < point["eps"] <= 1 or not 0 < point["delta"] <= 1:
            return _error_update(
                log, "intake", BadInput(f"Grid point {point} needs R >= 0 and eps, delta in (0, 1]")
            )

    log.info(f"{len(grid)} grid points, kernel {state.get('kernel', 'auto')}")
    return {
        "grid": grid,
        "grid_index": 0,
        "kernel": state.get("kernel") or "auto",
        "strict": bool(state.get("strict", False)),
        "failures": [],
        "error": None,
    }


def build_tower(state: VerificationState) -> dict:
    """Resolve the extension spec and build its homology cover tower."""
    log = logging.getLogger("build_tower")
    log.info("-" * 60)
    if state.get("error"):
        return {}

    try:
        name = state["extension"]
        spec = _seed_provider.fetch_extension(name) if _seed_provider else resolve_extension(name)
        levels = spec.levels if state.get("levels") is None else state["levels"]
        tower = build_cover_tower(spec.seed, max_levels=levels, size_cap=state.get("size_cap"))
        verify_nesting(tower.levels)
    except BoxSpaceError as e:
        return _error_update(log, "build_tower", e)

    if tower.truncated:
        log.warning(f"Tower truncated at {len(tower.sizes)} graphs")
    log.info(f"Tower sizes {tower.sizes}")
    return {"spec": spec, "tower": tower}


def build_extensions(state: VerificationState) -> dict:
    """Act on every H level by the extension's free-group automorphism."""
    log = logging.getLogger("build_extensions")
    log.info("-" * 60)
    if state.get("error"):
        return {}

    spec = state["spec"]
    try:
        images = [Word.parse(text) for text in spec.images]
        triples = extension_from_tower(state["tower"], images, spec.acting_order)
    except BoxSpaceError as e:
        return _error_update(log, "build_extensions", e)

    log.info(f"Gamma orders {[t.order for t in triples]}, G orders {[t.g_quotient.order for t in triples]}")
    return {"triples": triples}


def assemble_boxes(state: VerificationState) -> dict:
    """Chain Gamma, H and G levels into box spaces with one gap sequence.

    Explicit gaps are used as given; otherwise the gaps are widened until every
    grid point has pairs at its separation distance.
    """
    log = logging.getLogger("assemble_boxes")
    log.info("-" * 60)
    if state.get("error"):
        return {}

    try:
        if state.get("gaps"):
            boxes = assemble_extension_boxes(state["triples"], state["gaps"])
        else:
            boxes = separating_boxes(state["triples"], state["grid"], t=state.get("t"), kernel=state["kernel"])
    except BoxSpaceError as e:
        return _error_update(log, "assemble_boxes", e)

    log.info(f"Shared gaps {list(boxes.gamma.gaps)}, walls on H: {boxes.has_walls}")
    return {"boxes": boxes}


def check_lemma(state: VerificationState) -> dict:
    """Check both distance inequalities on every extension triple."""
    log = logging.getLogger("check_lemma")
    log.info("-" * 60)
    if state.get("error"):
        return {}

    reports, failures = [], []
    for level, triple in enumerate(state["triples"], start=1):
        try:
            report = lemma_dg_check(triple)
        except BoxSpaceError as e:
            log.warning(f"Level {level}: {e.message}")
            reports.append({"level": level, "order": triple.order, "error": e.to_dict()})
            failures = ["lemma"]
            continue
        report.pop("slack_histogram")
        reports.append({"level": level, "order": triple.order, **report})

    log.info("PASSED" if not failures else "FAILED")
    return {"lemma_reports": reports, "failures": failures}


def build_phi(state: VerificationState) -> dict:
    """Build the unit-vector data for the current grid point."""
    log = logging.getLogger("build_phi")
    log.info("-" * 60)
    if state.get("error"):
        return {}

    point = state["grid"][state.get("grid_index", 0)]
    log.info(f"Grid point {state.get('grid_index', 0) + 1}/{len(state['grid'])}: {point_label(point)}")
    try:
        phi = build_phi_gamma(state["boxes"], point["R"], point["eps"], t=state.get("t"), kernel=state["kernel"])
    except BoxSpaceError as e:
        return _error_update(log, "build_phi", e)
    return {"phi": phi}


def verify(state: VerificationState) -> dict:
    """Scan closeness and separation for the current grid point."""
    log = logging.getLogger("verify")
    log.info("-" * 60)
    if state.get("error"):
        return {}

    point = state["grid"][state.get("grid_index", 0)]
    verdict = verify_conditions(state["phi"], point["delta"], strict=False)
    if verdict["pass"]:
        log.info("PASSED")
        return {"verdicts": [verdict]}

    log.warning(f"FAILED at {point_label(point)}: {verdict['witness']}")
    return {"verdicts": [verdict], "failures": [point_label(point)]}


def route_decision(state: VerificationState) -> Literal["next_point", "done"]:
    """Advance through the grid unless an error or a strict failure stops the run."""
    log = logging.getLogger("route")
    index = state.get("grid_index", 0)
    grid = state.get("grid") or []

    if state.get("error"):
        log.info(">>> DONE - construction failed")
        return "done"

    if state.get("strict") and state.get("failures"):
        log.info(">>> DONE - strict run stopped at first failure")
        return "done"

    if index + 1 < len(grid):
        log.info(f">>> NEXT_POINT - {len(grid) - index - 1} grid points left")
        return "next_point"

    log.info(">>> DONE - grid exhausted")
    return "done"


def next_point(state: VerificationState) -> dict:
    log = logging.getLogger("next_point")
    log.info("-" * 60)
    return {"grid_index": state.get("grid_index", 0) + 1}


def summarize(state: VerificationState) -> dict:
    """Collect the lemma reports and verdicts into the final report."""
    log = logging.getLogger("summarize")
    log.info("-" * 60)
    error = state.get("error")
    triples = state.get("triples") or []
    tower = state.get("tower")
    verdicts = state.get("verdicts") or []
    failures = state.get("failures") or []
    boxes = state.get("boxes")

    passed = (
        error is None
        and not failures
        and len(verdicts) == len(state.get("grid") or [])
    )
    summary = {
        "extension": state.get("extension"),
        "tower_sizes": tower.sizes if tower else [],
        "gamma_orders": [t.order for t in triples],
        "g_orders": [t.g_quotient.order for t in triples],
        "gaps": list(boxes.gamma.gaps) if boxes else [],
        "lemma": state.get("lemma_reports") or [],
        "verdicts": verdicts,
        "failures": failures,
        "error": error,
        "pass": passed,
    }

    log.info("=" * 60)
    log.info(f"VERIFICATION {'PASSED' if passed else 'FAILED'}")
    log.info(f"Gamma orders: {summary['gamma_orders']}")
    log.info(f"Grid points verified: {len(verdicts)}/{len(state.get('grid') or [])}")
    vacuous = sum(1 for v in verdicts if v["min_margin_2"] is None)
    if vacuous:
        log.warning(f"Separation scan vacuous at {vacuous} grid points")
    if failures:
        log.info(f"Failures: {failures}")
    log.info("=" * 60)
    return {"summary": summary, "passed": passed}
