"""
Read and write attributed graphs.

nodes file: ``external_id <TAB> label <TAB> text`` per line, label ``-`` when
unlabeled. edges file: ``external_id <TAB> external_id`` per line.
"""
from pathlib import Path
from time import time
import numpy as np
import logging

from .graph import NodeRecord, AttributedGraph, build_graph
from ..exceptions import MalformedRecord, DanglingEdge, EmptyGraph

logger = logging.getLogger(__name__)

GRAPH_FORMAT_VERSION = 1
UNLABELED = "-"


class IngestReport:
    def __init__(self, n_nodes, n_edges, self_loops, duplicates) -> None:
        self.n_nodes = n_nodes
        self.n_edges = n_edges
        self.self_loops = self_loops
        self.duplicates = duplicates

    def as_dict(self):
        return {
            "nodes": self.n_nodes,
            "edges": self.n_edges,
            "self_loops_dropped": self.self_loops,
            "duplicates_collapsed": self.duplicates,
        }

    def write(self, path):
        lines = ["%s=%s" % (key, value) for key, value in self.as_dict().items()]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    def __repr__(self) -> str:
        s = "-" * 60 + "\n"
        s += "{:<25s}{:>10s}\n".format("Ingestion", "count")
        for key, value in self.as_dict().items():
            s += "{:<25s}{:>10d}\n".format(key, value)
        s += "-" * 60 + "\n"
        return s


def normalize_text(text):
    """Collapse whitespace of an attribute text."""
    return " ".join(text.split())


def read_nodes(nodes_path):
    from ..embedding import tokenize

    records = []
    seen = set()
    with open(nodes_path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            fields = line.split("\t", 2)
            if len(fields) != 3:
                raise MalformedRecord(
                    nodes_path, lineno, "expected 3 tab-separated fields, got %s" % len(fields)
                )
            external_id, label, text = fields
            external_id = external_id.strip()
            if not external_id:
                raise MalformedRecord(nodes_path, lineno, "empty external_id")
            if external_id in seen:
                raise MalformedRecord(
                    nodes_path, lineno, "duplicate external_id %r" % external_id
                )
            text = normalize_text(text)
            if not tokenize(text):
                raise MalformedRecord(nodes_path, lineno, "attribute text has no tokens")
            label = label.strip()
            if label in ("", UNLABELED):
                label = None
            seen.add(external_id)
            records.append(NodeRecord(len(records), text, label, external_id))
    return records


def read_edges(edges_path, id_map):
    pairs = []
    with open(edges_path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise MalformedRecord(
                    edges_path, lineno, "expected 2 tab-separated fields, got %s" % len(fields)
                )
            ends = []
            for external_id in fields:
                external_id = external_id.strip()
                if external_id not in id_map:
                    raise DanglingEdge(edges_path, lineno, external_id)
                ends.append(id_map[external_id])
            pairs.append(ends)
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


def load_graph(nodes_path, edges_path, directed=False):
    """Load and validate an attributed graph.

    Args:
        nodes_path (str): nodes file.
        edges_path (str): edges file.
        directed (bool, optional): Defaults to False.

    Raises:
        MalformedRecord: bad line, reported with its line number.
        DanglingEdge: edge endpoint not in the nodes file.
        EmptyGraph: nodes file has no rows.

    Returns:
        AttributedGraph: with ``ingest_report`` attached.
    """
    tstart = time()
    records = read_nodes(nodes_path)
    if not records:
        raise EmptyGraph("%s has no node rows" % nodes_path)
    id_map = {r.external_id: r.id for r in records}
    pairs = read_edges(edges_path, id_map)
    graph, n_loops, n_duplicates = build_graph(records, pairs, directed=directed)
    if n_loops:
        logger.warning("Dropped {} self-loops".format(n_loops))
    if n_duplicates:
        logger.info("Collapsed {} duplicate edges".format(n_duplicates))
    graph.ingest_report = IngestReport(graph.n_nodes, graph.edge_count, n_loops, n_duplicates)
    logger.debug("Load graph: {:1.2f}".format(time() - tstart))
    return graph


def save_graph(g, path):
    """Persist the graph as ``graph.bin`` (numpy npz container)."""
    labels = [r.label if r.label is not None else "" for r in g.nodes]
    with open(path, "wb") as f:
        np.savez(
            f,
            format_version=np.array(GRAPH_FORMAT_VERSION),
            directed=np.array(g.directed),
            indptr=g.indptr,
            indices=g.indices,
            texts=np.array([r.text for r in g.nodes], dtype=str),
            labels=np.array(labels, dtype=str),
            has_label=np.array([r.label is not None for r in g.nodes], dtype=bool),
            external_ids=np.array([g.external_id(r.id) for r in g.nodes], dtype=str),
        )


def load_graph_bin(path):
    """Load a graph saved by save_graph."""
    with np.load(path, allow_pickle=False) as data:
        version = int(data["format_version"])
        if version != GRAPH_FORMAT_VERSION:
            raise ValueError(
                "%s has format version %s, expected %s" % (path, version, GRAPH_FORMAT_VERSION)
            )
        records = []
        for i, (text, label, has_label, external_id) in enumerate(
            zip(data["texts"], data["labels"], data["has_label"], data["external_ids"])
        ):
            records.append(
                NodeRecord(i, str(text), str(label) if has_label else None, str(external_id))
            )
        return AttributedGraph(
            records, data["indptr"], data["indices"], directed=bool(data["directed"])
        )
