"""Graph JSON and DOT export."""

import json
from pathlib import Path

import graphviz
import numpy as np

from ..errors import BadInput, SeedNotFound
from ..multigraph import LabeledMultigraph


def _to_builtin(value):
    if isinstance(value, dict):
        return {str(k): _to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return _to_builtin(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and value == float("inf"):
        return None
    return value


def save_json(payload: object, path: str | Path) -> Path:
    """Write sorted, indented JSON (numpy values converted)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_to_builtin(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_graph(path: str | Path) -> LabeledMultigraph:
    """Read {"vertex_count": n, "basepoint": b, "edges": [[src, dst, label], ...]}.

    Raises:
        SeedNotFound: if the file does not exist
        BadInput: if it is not a graph JSON document
    """
    path = Path(path)
    if not path.is_file():
        raise SeedNotFound(f"No builtin seed or graph file named {str(path)!r}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise BadInput(f"{path}: invalid JSON ({e})") from e
    return LabeledMultigraph.from_dict(data)


def save_graph(g: LabeledMultigraph, path: str | Path) -> Path:
    return save_json(g.to_dict(), path)


def _letter(label: int) -> str:
    return chr(ord("a") + label) if label < 26 else f"x{label}"


def graph_to_dot(g: LabeledMultigraph, name: str = "graph") -> graphviz.Digraph:
    """Oriented multigraph with generator letters as edge labels; basepoint drawn doubled."""
    dot = graphviz.Digraph(
        name=name,
        graph_attr={"rankdir": "LR"},
        node_attr={"shape": "circle", "fontname": "Helvetica", "fontsize": "10"},
        edge_attr={"fontname": "Helvetica", "fontsize": "9"},
    )
    for v in range(g.vertex_count):
        dot.node(str(v), shape="doublecircle" if v == g.basepoint else "circle")
    for src, dst, label in g.edges:
        dot.edge(str(src), str(dst), label=_letter(label))
    return dot


def save_dot(g: LabeledMultigraph, path: str | Path, name: str = "graph") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(graph_to_dot(g, name).source, encoding="utf-8")
    return path
