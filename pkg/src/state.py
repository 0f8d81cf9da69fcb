"""State definition for the verification graph.

VerificationState carries the extension spec through the cover tower, the
extension triples and their box spaces, to one verdict per (R, eps, delta)
grid point.

check_lemma and the first build_phi run in the same superstep, so every
field they can both touch needs a reducer: scalars keep the latest non-None
write, failure labels are unioned, verdict records are appended.
"""

from typing import Annotated, TypedDict


def keep_last(current, new):
    return current if new is None else new


def merge_lists(current, new):
    """Ordered union of two label lists."""
    return list(dict.fromkeys([*(current or ()), *(new or ())]))


def append_records(current, new):
    """Concatenate report dicts (unhashable, so never deduplicated)."""
    return [*(current or ()), *(new or ())]


class VerificationState(TypedDict, total=False):
    """State container for the extension verification workflow.

    Input fields come from the CLI or a test; construction fields are written
    once by the build nodes; grid fields change on every loop; output and
    status fields accumulate across the run.
    """

    # --- input
    extension: Annotated[str, keep_last]
    """Builtin or catalogue extension name (e.g. 'semidirect-swap')."""

    levels: Annotated[int | None, keep_last]
    """Tower graphs including the seed; None uses the extension spec's depth."""

    size_cap: Annotated[int | None, keep_last]
    """Cover vertex cap passed to build_tower."""

    grid: Annotated[list[dict], keep_last]
    """Parameter grid: [{R, eps, delta}, ...], visited in order."""

    t: Annotated[float | None, keep_last]
    """Gaussian parameter override; None derives t from eps and S_G."""

    kernel: Annotated[str, keep_last]
    """psi kernel: 'auto', 'wall' or 'induced'."""

    gaps: Annotated[list[float] | None, keep_last]
    """Explicit gap sequence for the box spaces; None uses the default gap rule."""

    strict: Annotated[bool, keep_last]
    """Stop at the first failing grid point instead of recording it."""

    # --- construction
    spec: Annotated[object, keep_last]
    """ExtensionSpec resolved from the extension name."""

    tower: Annotated[object, keep_last]
    """TowerReport of the H levels."""

    triples: Annotated[list, keep_last]
    """ExtensionTriple per tower level."""

    boxes: Annotated[object, keep_last]
    """ExtensionBoxes: Gamma, H and G box spaces on one gap sequence."""

    # --- grid loop
    grid_index: Annotated[int, keep_last]
    """Index of the grid point being verified."""

    phi: Annotated[object, keep_last]
    """PhiGamma for the current grid point."""

    # --- output
    lemma_reports: Annotated[list[dict], keep_last]
    """Slack report per extension triple."""

    verdicts: Annotated[list[dict], append_records]
    """One verdict per verified grid point."""

    summary: Annotated[dict, keep_last]
    """Final report: extension, orders, lemma reports, verdicts, pass."""

    # --- status
    failures: Annotated[list[str], merge_lists]
    """Labels of failed checks (e.g. ['lemma', 'R=1,eps=0.5,delta=0.5'])."""

    passed: Annotated[bool, keep_last]
    """True if the lemma and every grid point passed."""

    error: Annotated[dict | None, keep_last]
    """Machine-readable error of the first construction failure, None otherwise."""
