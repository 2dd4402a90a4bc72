"""
Attributed graph: nodes with text attributes plus a CSR adjacency.

The graph is immutable once built. Node ids are dense 0..N-1 in ingestion
order and every neighbor list is sorted ascending.
"""
import hashlib
from dataclasses import dataclass
import numpy as np
import logging

from ..exceptions import UnknownNode, EmptyGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NodeRecord:
    id: int
    text: str
    label: str = None
    external_id: str = None


class DegreeStats:
    def __init__(self, degrees, avg_degree) -> None:
        self.degrees = degrees
        self.avg_degree = avg_degree

    def degree(self, v):
        return int(self.degrees[v])

    def __repr__(self) -> str:
        return "DegreeStats(n=%s, avg_degree=%.3f)" % (len(self.degrees), self.avg_degree)


def build_graph(records, pairs, directed=False):
    """Build an AttributedGraph from node records and raw (u, v) pairs.

    Self-loops are dropped and multi-edges collapsed.

    Args:
        records (list): NodeRecord, ids must be 0..N-1 in order.
        pairs (array): (E, 2) integer array of endpoints.
        directed (bool): keep (u, v) orientation. Defaults to False.

    Returns:
        tuple: (AttributedGraph, number of self-loops, number of duplicates)
    """
    n = len(records)
    if n == 0:
        raise EmptyGraph("graph has no nodes")
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    loops = pairs[:, 0] == pairs[:, 1]
    n_loops = int(loops.sum())
    pairs = pairs[~loops]
    if not directed:
        pairs = np.sort(pairs, axis=1)
    if len(pairs) > 0:
        unique = np.unique(pairs, axis=0)
    else:
        unique = pairs
    n_duplicates = len(pairs) - len(unique)
    if directed:
        src, dst = unique[:, 0], unique[:, 1]
    else:
        src = np.concatenate([unique[:, 0], unique[:, 1]])
        dst = np.concatenate([unique[:, 1], unique[:, 0]])
    indptr, indices = _to_csr(n, src, dst)
    graph = AttributedGraph(records, indptr, indices, directed=directed)
    return graph, n_loops, n_duplicates


def _to_csr(n, src, dst):
    order = np.lexsort((dst, src))
    src = src[order]
    indices = dst[order].astype(np.int64)
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, indices


class AttributedGraph:
    def __init__(self, records, indptr, indices, directed=False, validate=True):
        """AttributedGraph Class

        Args:
            records (list): NodeRecord per node, ordered by id.
            indptr (array): CSR row pointer, length N + 1.
            indices (array): CSR column indices, sorted within each row.
            directed (bool, optional): Defaults to False.
        """
        self.nodes = tuple(records)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        self.directed = directed
        self._external = {}
        for record in self.nodes:
            key = record.external_id if record.external_id is not None else str(record.id)
            self._external[key] = record.id
        self._fingerprint = None
        self._transition = None
        if validate:
            self.validate()

    @property
    def n_nodes(self):
        return len(self.nodes)

    def __len__(self):
        return len(self.nodes)

    @property
    def edge_count(self):
        if self.directed:
            return len(self.indices)
        return len(self.indices) // 2

    @property
    def degrees(self):
        return np.diff(self.indptr)

    def check_node(self, v):
        if isinstance(v, (bool, np.bool_)) or not isinstance(v, (int, np.integer)):
            raise UnknownNode(v)
        if v < 0 or v >= len(self.nodes):
            raise UnknownNode(v)
        return int(v)

    def neighbors(self, v):
        """Sorted neighbor ids of v as a read-only array."""
        v = self.check_node(v)
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def has_edge(self, u, v):
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < len(nbrs) and nbrs[i] == v)

    def node(self, v):
        return self.nodes[self.check_node(v)]

    def text(self, v):
        return self.node(v).text

    def id_of(self, external_id):
        """Dense NodeId of a source-dataset key."""
        try:
            return self._external[external_id]
        except KeyError:
            raise UnknownNode(external_id) from None

    def external_id(self, v):
        record = self.node(v)
        return record.external_id if record.external_id is not None else str(v)

    @property
    def class_list(self):
        """Sorted distinct labels present in the graph."""
        return sorted({r.label for r in self.nodes if r.label is not None})

    def edges(self):
        """(E, 2) array of edges, u < v for undirected graphs."""
        src = np.repeat(np.arange(len(self.nodes)), self.degrees)
        pairs = np.stack([src, self.indices], axis=1)
        if not self.directed:
            pairs = pairs[pairs[:, 0] < pairs[:, 1]]
        return pairs

    def without_edges(self, pairs):
        """Return a view of this graph with the given edges removed.

        Node records are shared, only the adjacency is rebuilt.
        """
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if len(pairs) == 0:
            return self
        src = np.repeat(np.arange(len(self.nodes)), self.degrees)
        dst = self.indices
        drop = np.zeros(len(dst), dtype=bool)
        for u, v in pairs:
            drop |= (src == u) & (dst == v)
            if not self.directed:
                drop |= (src == v) & (dst == u)
        indptr, indices = _to_csr(len(self.nodes), src[~drop], dst[~drop])
        return AttributedGraph(self.nodes, indptr, indices, directed=self.directed,
                               validate=False)

    @property
    def fingerprint(self):
        """Content hash of the adjacency, used to key on-disk caches."""
        if self._fingerprint is None:
            h = hashlib.sha1()
            h.update(self.indptr.tobytes())
            h.update(self.indices.tobytes())
            h.update(b"directed" if self.directed else b"undirected")
            self._fingerprint = h.hexdigest()[:16]
        return self._fingerprint

    def validate(self):
        """Check the adjacency invariants.

        Raises:
            ValueError: self-loop, duplicate, unsorted row, asymmetric edge
                or endpoint out of range.
        """
        n = len(self.nodes)
        if n == 0:
            raise EmptyGraph("graph has no nodes")
        for i, record in enumerate(self.nodes):
            if record.id != i:
                raise ValueError("node ids must be dense, got %s at %s" % (record.id, i))
        if len(self.indptr) != n + 1 or self.indptr[-1] != len(self.indices):
            raise ValueError("inconsistent CSR row pointer")
        if len(self.indices) == 0:
            return
        if self.indices.min() < 0 or self.indices.max() >= n:
            raise ValueError("edge endpoint out of range")
        src = np.repeat(np.arange(n), self.degrees)
        if np.any(src == self.indices):
            raise ValueError("self-loop in adjacency")
        same_row = src[1:] == src[:-1]
        if np.any(self.indices[1:][same_row] <= self.indices[:-1][same_row]):
            raise ValueError("neighbor lists must be sorted and duplicate free")
        if not self.directed:
            forward = src * n + self.indices
            backward = self.indices * n + src
            if not np.array_equal(np.sort(forward), np.sort(backward)):
                raise ValueError("undirected adjacency is not symmetric")

    def __repr__(self) -> str:
        return "AttributedGraph(n_nodes=%s, edge_count=%s, directed=%s)" % (
            self.n_nodes,
            self.edge_count,
            self.directed,
        )


def degree_stats(g):
    """Per-node degree and the dataset average degree.

    avg_degree is 2E/N for undirected graphs and E/N for directed ones.
    """
    degrees = g.degrees
    n = g.n_nodes
    if g.directed:
        avg = g.edge_count / n
    else:
        avg = 2.0 * g.edge_count / n
    return DegreeStats(degrees, avg)
