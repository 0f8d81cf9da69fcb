"""File codecs for graphs, metrics and reports."""

from .graphs import graph_to_dot, load_graph, save_dot, save_graph, save_json
from .tables import (
    load_metric_csv,
    save_envelope_csv,
    save_matrix_csv,
    save_metric_csv,
    save_rows_csv,
    save_walls_csv,
)

__all__ = [
    "graph_to_dot",
    "load_graph",
    "load_metric_csv",
    "save_dot",
    "save_envelope_csv",
    "save_graph",
    "save_json",
    "save_matrix_csv",
    "save_metric_csv",
    "save_rows_csv",
    "save_walls_csv",
]
