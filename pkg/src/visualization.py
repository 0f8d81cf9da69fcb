"""Graphviz drawing of the verification graph."""

import logging
from pathlib import Path

import graphviz

log = logging.getLogger("visualization")

# stage -> (extra node attributes, [(node, caption)])
STAGES = {
    "construction": (
        {"fillcolor": "#DCEBF7"},
        [
            ("intake", "validate grid"),
            ("build_tower", "homology covers"),
            ("build_extensions", "semidirect quotients"),
            ("assemble_boxes", "shared gaps"),
            ("summarize", ""),
        ],
    ),
    "checks": (
        {"fillcolor": "#FDEBD3"},
        [
            ("check_lemma", "distance inequalities"),
            ("build_phi", "ball map x Gaussian"),
            ("verify", "closeness / separation"),
        ],
    ),
    "loop": (
        {"shape": "diamond", "fillcolor": "#EDE1F2"},
        [("next_point", "grid loop")],
    ),
}

EDGES = [
    ("__start__", "intake", {}),
    ("intake", "build_tower", {}),
    ("build_tower", "build_extensions", {}),
    ("build_extensions", "assemble_boxes", {}),
    ("assemble_boxes", "check_lemma", {}),
    ("assemble_boxes", "build_phi", {}),
    ("check_lemma", "verify", {}),
    ("build_phi", "verify", {}),
    ("verify", "next_point", {"label": "next_point"}),
    ("verify", "summarize", {"label": "done"}),
    ("next_point", "build_phi", {"style": "dashed"}),
    ("summarize", "__end__", {}),
]


def _terminal(shape: str, caption: str) -> dict:
    return {"shape": shape, "width": "0.3", "fixedsize": "true", "fillcolor": "black", "label": "", "xlabel": caption}


def get_pipeline_dot() -> graphviz.Digraph:
    """The verification graph as a styled Digraph (no rendering)."""
    dot = graphviz.Digraph(
        comment="Extension Verification Graph",
        graph_attr={"rankdir": "TB", "splines": "polyline", "nodesep": "0.7", "ranksep": "0.6"},
        node_attr={"shape": "box", "style": "rounded,filled", "fontname": "Helvetica", "fontsize": "11"},
        edge_attr={"fontname": "Helvetica", "fontsize": "9"},
    )
    dot.node("__start__", **_terminal("circle", "Extension\nspec"))
    dot.node("__end__", **_terminal("doublecircle", "Verdict\nJSON"))

    for style, nodes in STAGES.values():
        for name, caption in nodes:
            dot.node(name, f"{name}\n({caption})" if caption else name, **style)

    # parallel branch drawn side by side
    with dot.subgraph() as row:
        row.attr(rank="same")
        row.node("check_lemma")
        row.node("build_phi")

    for tail, head, attrs in EDGES:
        dot.edge(tail, head, **attrs)
    return dot


def get_pipeline_image() -> bytes:
    """PNG bytes; needs the Graphviz system binaries."""
    return get_pipeline_dot().pipe(format="png")


def save_pipeline_image(path: str | Path = "pipeline.png") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(get_pipeline_image())
    log.info(f"Pipeline graph saved to {path}")
    return path
