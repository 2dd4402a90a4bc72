"""This module is only to be used together with tests
"""
import numpy as np
import networkx as nx

from graphsearch.graph.graph import NodeRecord, build_graph

WORDS = (
    "markov chain gibbs sampler bayesian network neural deep learning "
    "graph database query index protein folding theory bound kernel "
    "vision robot genetic algorithm search retrieval ranking"
).split()


def random_graph(rng, n, p):
    """Erdos-Renyi style graph with random word texts."""
    records = [
        NodeRecord(i, " ".join(rng.choice(WORDS, size=int(rng.integers(2, 7)))), None, str(i))
        for i in range(n)
    ]
    upper = np.triu(rng.random((n, n)) < p, k=1)
    pairs = np.argwhere(upper)
    g, _, _ = build_graph(records, pairs)
    return g


def to_networkx(g):
    G = nx.Graph()
    G.add_nodes_from(range(g.n_nodes))
    G.add_edges_from(g.edges().tolist())
    return G


def distances(g, anchor):
    return nx.single_source_shortest_path_length(to_networkx(g), anchor)


def dense_ppr(g, anchor, d=0.85):
    """Solve p = (1 - d) e + d (W^T + e 1_dangling^T) p directly."""
    n = g.n_nodes
    m = np.zeros((n, n))
    for u in range(n):
        nbrs = g.neighbors(u)
        if len(nbrs) == 0:
            m[anchor, u] = 1.0
        for v in nbrs:
            m[v, u] = 1.0 / len(nbrs)
    e = np.zeros(n)
    e[anchor] = 1.0
    return np.linalg.solve(np.eye(n) - d * m, (1 - d) * e)


def scalar_cos(a, b):
    return float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))


def brute_force_ranking(index, anchor, excluded, pool, query_vec, alpha, k):
    """Score every pool member one pair at a time, sort fully, ties by id."""
    emb = index.embeddings.matrix
    scored = []
    for v in pool:
        if v in excluded:
            continue
        s = 0.0
        if alpha > 0:
            s += alpha * scalar_cos(emb[v], emb[anchor])
        if alpha < 1:
            s += (1 - alpha) * scalar_cos(emb[v], query_vec)
        s = min(1.0, max(-1.0, float(np.round(s, 12))))
        scored.append((v, s))
    scored.sort(key=lambda x: (-x[1], x[0]))
    return scored[:k]


def brute_force_attribute_pool(index, anchor, excluded, size):
    emb = index.embeddings.matrix
    sims = [
        (v, float(np.round(scalar_cos(emb[v], emb[anchor]), 12)))
        for v in range(len(emb))
        if v != anchor and v not in excluded
    ]
    sims.sort(key=lambda x: (-x[1], x[0]))
    return {v for v, _ in sims[:size]}


def ppr_pool_bounds(g, anchor, nodes, size, slack=1e-5):
    """Bounds on the top-size members of nodes by exact PPR score.

    Power iteration stops within a small residual of the dense solution, so
    nodes within ``slack`` of the cut may fall on either side of it.

    Returns:
        tuple: (nodes every pool must hold, nodes a pool may hold)
    """
    p = dense_ppr(g, anchor)
    ranked = sorted(nodes, key=lambda v: (-p[v], v))
    cut = p[ranked[size - 1]] if len(ranked) >= size else 0.0
    must = {v for v in ranked if p[v] > cut + slack}
    may = {v for v in ranked if p[v] >= cut - slack}
    return must, may
