"""
Task instances for node classification and link prediction.

Instances file, one record per line:

    classification   external_id <TAB> gold_label
    link prediction  external_id <TAB> external_id <TAB> 1|0
"""
from dataclasses import dataclass
import numpy as np
import logging

from ..exceptions import InsufficientEdges, MalformedRecord, UnknownNode
from ..query.schema import TaskKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TaskInstance:
    kind: TaskKind
    anchors: tuple
    gold: object
    class_list: tuple = ()
    index: int = 0
    masked_edges: tuple = ()

    def __post_init__(self):
        if self.kind is TaskKind.NODE_CLASSIFICATION:
            if len(self.anchors) != 1:
                raise ValueError("classification takes one anchor")
            if self.gold not in self.class_list:
                raise ValueError("gold class %r not in the class list" % (self.gold,))
        else:
            if len(self.anchors) != 2 or self.anchors[0] == self.anchors[1]:
                raise ValueError("link prediction takes two distinct anchors")
            if not isinstance(self.gold, bool):
                raise ValueError("link prediction gold must be a bool")

    def view(self, g):
        """Adjacency the rollout of this instance may search."""
        return g.without_edges(self.masked_edges) if self.masked_edges else g


def _node(g, external_id, path, lineno):
    try:
        return g.id_of(external_id)
    except UnknownNode:
        raise MalformedRecord(path, lineno, "unknown node %r" % external_id) from None


def load_instances(path, g, class_list=None):
    """Read an instances file against graph g.

    Positive link pairs have their edge masked for their own rollout.

    Raises:
        MalformedRecord: wrong field count, mixed kinds, unknown node, gold
            outside the class list or a negative pair that is an edge.
    """
    class_list = tuple(class_list if class_list is not None else g.class_list)
    instances = []
    kind = None
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = [x.strip() for x in line.split("\t")]
            if len(fields) == 2:
                this = TaskKind.NODE_CLASSIFICATION
            elif len(fields) == 3:
                this = TaskKind.LINK_PREDICTION
            else:
                raise MalformedRecord(path, lineno, "expected 2 or 3 fields, got %s" % len(fields))
            if kind is None:
                kind = this
            elif kind is not this:
                raise MalformedRecord(path, lineno, "classification and link records are mixed")
            if this is TaskKind.NODE_CLASSIFICATION:
                v = _node(g, fields[0], path, lineno)
                if fields[1] not in class_list:
                    raise MalformedRecord(path, lineno, "label %r not in class list" % fields[1])
                instances.append(
                    TaskInstance(this, (v,), fields[1], class_list, index=len(instances))
                )
                continue
            u = _node(g, fields[0], path, lineno)
            v = _node(g, fields[1], path, lineno)
            if u == v:
                raise MalformedRecord(path, lineno, "pair of identical nodes")
            if fields[2] not in ("0", "1"):
                raise MalformedRecord(path, lineno, "link gold must be 1 or 0, got %r" % fields[2])
            gold = fields[2] == "1"
            if not gold and g.has_edge(u, v):
                raise MalformedRecord(path, lineno, "negative pair %s-%s is an edge" % (fields[0], fields[1]))
            masked = ((u, v),) if gold and g.has_edge(u, v) else ()
            instances.append(
                TaskInstance(this, (u, v), gold, index=len(instances), masked_edges=masked)
            )
    logger.info("Loaded {} instances from {}".format(len(instances), path))
    return instances


def write_instances(instances, g, path):
    with open(path, "w", encoding="utf-8") as f:
        for inst in instances:
            ids = [g.external_id(v) for v in inst.anchors]
            if inst.kind is TaskKind.NODE_CLASSIFICATION:
                f.write("%s\t%s\n" % (ids[0], inst.gold))
            else:
                f.write("%s\t%s\t%s\n" % (ids[0], ids[1], 1 if inst.gold else 0))


def build_link_instances(g, n_pos, n_neg, seed=0):
    """Sample positive edges and negative non-edges.

    Each positive instance hides its own edge from retrieval.

    Args:
        g (AttributedGraph): graph
        n_pos (int): existing edges to sample
        n_neg (int): non-edges to sample
        seed (int): sampling seed

    Raises:
        InsufficientEdges: fewer than n_pos edges, or fewer than n_neg
            non-edges.

    Returns:
        list: TaskInstance, positives first.
    """
    rng = np.random.default_rng(seed)
    edges = g.edges()
    if len(edges) < n_pos:
        raise InsufficientEdges("graph has %s edges, %s positives requested" % (len(edges), n_pos))
    n = g.n_nodes
    n_pairs = n * (n - 1) if g.directed else n * (n - 1) // 2
    if n_pairs - len(edges) < n_neg:
        raise InsufficientEdges("graph has %s non-edges, %s negatives requested" % (n_pairs - len(edges), n_neg))
    instances = []
    for i in rng.choice(len(edges), size=n_pos, replace=False):
        u, v = (int(x) for x in edges[i])
        instances.append(
            TaskInstance(
                TaskKind.LINK_PREDICTION, (u, v), True, index=len(instances), masked_edges=((u, v),)
            )
        )
    seen = set()
    while len(seen) < n_neg:
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        if u == v or g.has_edge(u, v):
            continue
        key = (u, v) if g.directed else (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        instances.append(TaskInstance(TaskKind.LINK_PREDICTION, key, False, index=len(instances)))
    return instances


def build_node_instances(g, n, seed=0):
    """Sample n labeled nodes as classification instances, by ascending id."""
    labeled = np.array([r.id for r in g.nodes if r.label is not None], dtype=np.int64)
    if n > len(labeled):
        raise ValueError("graph has %s labeled nodes, %s instances requested" % (len(labeled), n))
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(labeled, size=n, replace=False))
    class_list = tuple(g.class_list)
    return [
        TaskInstance(TaskKind.NODE_CLASSIFICATION, (int(v),), g.node(int(v)).label, class_list, index=i)
        for i, v in enumerate(chosen)
    ]
