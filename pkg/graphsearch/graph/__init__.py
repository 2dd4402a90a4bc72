from .graph import NodeRecord, AttributedGraph, DegreeStats, build_graph, degree_stats
from .io import load_graph, save_graph, load_graph_bin, IngestReport
from .neighborlist import hop_neighborhood, exact_hop_ring

__all__ = [
    "NodeRecord",
    "AttributedGraph",
    "DegreeStats",
    "build_graph",
    "degree_stats",
    "load_graph",
    "save_graph",
    "load_graph_bin",
    "IngestReport",
    "hop_neighborhood",
    "exact_hop_ring",
]
