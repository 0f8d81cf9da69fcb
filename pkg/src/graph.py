"""LangGraph construction for the extension verification workflow."""

from langgraph.graph import END, StateGraph

from .nodes import (
    assemble_boxes,
    build_extensions,
    build_phi,
    build_tower,
    check_lemma,
    intake,
    next_point,
    route_decision,
    summarize,
    verify,
)
from .state import VerificationState


def build_verification_graph() -> StateGraph:
    """Build and return the verification workflow graph.

    Architecture:
    - build_tower -> build_extensions -> assemble_boxes construct the three box spaces
    - assemble_boxes fans out to check_lemma and build_phi (parallel)
    - verify gathers both (fan-in), then route_decision loops over the grid
    """
    graph = StateGraph(VerificationState)

    # Construction nodes
    graph.add_node("intake", intake)
    graph.add_node("build_tower", build_tower)
    graph.add_node("build_extensions", build_extensions)
    graph.add_node("assemble_boxes", assemble_boxes)

    # Checks - single responsibility each
    graph.add_node("check_lemma", check_lemma)
    graph.add_node("build_phi", build_phi)
    graph.add_node("verify", verify)

    # Grid loop and report
    graph.add_node("next_point", next_point)
    graph.add_node("summarize", summarize)

    graph.set_entry_point("intake")

    graph.add_edge("intake", "build_tower")
    graph.add_edge("build_tower", "build_extensions")
    graph.add_edge("build_extensions", "assemble_boxes")

    # Fan-out: the lemma runs once, phi once per grid point
    graph.add_edge("assemble_boxes", "check_lemma")
    graph.add_edge("assemble_boxes", "build_phi")

    # Fan-in: separate edges so the grid loop can re-enter verify through build_phi alone
    graph.add_edge("check_lemma", "verify")
    graph.add_edge("build_phi", "verify")

    graph.add_conditional_edges(
        "verify",
        route_decision,
        {
            "next_point": "next_point",
            "done": "summarize",
        },
    )

    # Grid loop
    graph.add_edge("next_point", "build_phi")

    graph.add_edge("summarize", END)

    return graph


def create_verification_app():
    """Create and compile the verification application."""
    graph = build_verification_graph()
    return graph.compile()


def recursion_limit(grid_size: int) -> int:
    """Supersteps needed for a grid: construction plus three per grid point, with headroom."""
    return 16 + 4 * grid_size
