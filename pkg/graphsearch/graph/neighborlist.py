"""
Hop neighborhoods by breadth-first traversal.
"""
import numpy as np
from time import time
import logging

logger = logging.getLogger(__name__)

_EMPTY = np.zeros(0, dtype=np.int64)


def bfs_layers(g, anchor, h):
    """Nodes at distance 1..h from anchor, one array per distance.

    Uses a visited bitmap over all nodes, nothing is cached between calls.

    Args:
        g (AttributedGraph): graph
        anchor (int): source node
        h (int): number of layers

    Returns:
        list: h sorted arrays, layers[d - 1] holds the nodes at distance d.
    """
    anchor = g.check_node(anchor)
    tstart = time()
    visited = np.zeros(g.n_nodes, dtype=bool)
    visited[anchor] = True
    frontier = np.array([anchor], dtype=np.int64)
    layers = []
    for _ in range(h):
        if len(frontier) == 0:
            layers.append(_EMPTY)
            continue
        starts = g.indptr[frontier]
        stops = g.indptr[frontier + 1]
        if len(frontier) == 1:
            nbrs = g.indices[starts[0] : stops[0]]
        else:
            nbrs = np.concatenate([g.indices[a:b] for a, b in zip(starts, stops)])
        nbrs = np.unique(nbrs)
        nbrs = nbrs[~visited[nbrs]]
        visited[nbrs] = True
        layers.append(nbrs)
        frontier = nbrs
    logger.debug("BFS {} layers: {:1.6f}".format(h, time() - tstart))
    return layers


def hop_neighborhood_array(g, anchor, h):
    """Sorted array of nodes within h hops, anchor excluded."""
    if h < 1:
        raise ValueError("hop count must be >= 1, got %s" % h)
    layers = bfs_layers(g, anchor, h)
    nodes = np.concatenate(layers)
    nodes.sort()
    return nodes


def hop_neighborhood(g, anchor, h):
    """{v != anchor : dist(anchor, v) <= h}

    Raises:
        UnknownNode: anchor is not a node of g.
    """
    return set(hop_neighborhood_array(g, anchor, h).tolist())


def exact_hop_ring_array(g, anchor, h):
    if h < 1:
        raise ValueError("hop count must be >= 1, got %s" % h)
    return bfs_layers(g, anchor, h)[h - 1]


def exact_hop_ring(g, anchor, h):
    """{v : dist(anchor, v) == h}, empty beyond the anchor's eccentricity."""
    return set(exact_hop_ring_array(g, anchor, h).tolist())
