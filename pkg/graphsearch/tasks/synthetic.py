"""
Seeded synthetic graphs with pseudo-word attributes.
"""
from time import time
import numpy as np
import scipy.sparse as sp
import logging

from ..graph.graph import NodeRecord, AttributedGraph

logger = logging.getLogger(__name__)

CLASS_NAMES = (
    "Theory",
    "Neural_Networks",
    "Databases",
    "Genetic_Algorithms",
    "Robotics",
    "Vision",
)
_CONSONANTS = list("bdfgklmnprstvz")
_VOWELS = list("aeiou")


def pseudo_words(rng, n, syllables=3):
    """n distinct pronounceable words."""
    words = []
    seen = set()
    while len(words) < n:
        parts = [
            rng.choice(_CONSONANTS) + rng.choice(_VOWELS) for _ in range(syllables)
        ]
        w = "".join(parts)
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words


def _undirected_csr(n, src, dst):
    keep = src != dst
    src, dst = src[keep], dst[keep]
    m = sp.coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n)).tocsr()
    m = m + m.T
    m.sum_duplicates()
    m.sort_indices()
    return m.indptr.astype(np.int64), m.indices.astype(np.int64)


def synthetic_graph(n, avg_degree, seed=0, n_words=8, vocabulary=2000):
    """Random graph with about ``avg_degree`` edges per node.

    Every node draws avg_degree / 2 random partners; loops and repeated
    pairs are dropped, so the realized average degree is slightly lower.
    """
    tstart = time()
    rng = np.random.default_rng(seed)
    per_node = max(1, int(round(avg_degree / 2)))
    src = np.repeat(np.arange(n, dtype=np.int64), per_node)
    dst = rng.integers(0, n, size=len(src))
    indptr, indices = _undirected_csr(n, src, dst)
    vocab = np.array(pseudo_words(rng, vocabulary))
    picks = rng.integers(0, vocabulary, size=(n, n_words))
    records = [
        NodeRecord(i, " ".join(vocab[picks[i]]), None, str(i)) for i in range(n)
    ]
    g = AttributedGraph(records, indptr, indices, validate=False)
    logger.info(
        "Synthetic graph n={} edges={} built in {:1.2f} s".format(n, g.edge_count, time() - tstart)
    )
    return g


def planted_partition_graph(n=60, n_classes=3, homophily=0.9, avg_degree=3, seed=0,
                            topic_words=3, noise_words=3):
    """Labeled graph whose edges mostly join nodes of the same class.

    Node i belongs to class i % n_classes. Each edge stays inside a class
    with probability ``homophily``. Texts mix words of the node's class
    topic with shared noise words, and no node is isolated.
    """
    if not 1 <= n_classes <= len(CLASS_NAMES):
        raise ValueError("n_classes must be in 1..%s" % len(CLASS_NAMES))
    rng = np.random.default_rng(seed)
    classes = np.arange(n) % n_classes
    members = [np.nonzero(classes == c)[0] for c in range(n_classes)]
    n_edges = int(round(n * avg_degree / 2))
    pairs = set()
    while len(pairs) < n_edges:
        u = int(rng.integers(n))
        c = classes[u]
        if n_classes == 1 or rng.random() < homophily:
            v = int(rng.choice(members[c]))
        else:
            other = [x for x in range(n_classes) if x != c]
            v = int(rng.choice(members[other[int(rng.integers(len(other)))]]))
        if u != v:
            pairs.add((min(u, v), max(u, v)))
    degree = np.zeros(n, dtype=np.int64)
    for u, v in pairs:
        degree[u] += 1
        degree[v] += 1
    for u in np.nonzero(degree == 0)[0]:
        mates = members[classes[u]][members[classes[u]] != u]
        v = int(rng.choice(mates))
        pairs.add((min(int(u), v), max(int(u), v)))
    pairs = np.array(sorted(pairs), dtype=np.int64)
    indptr, indices = _undirected_csr(n, pairs[:, 0], pairs[:, 1])

    words = pseudo_words(rng, 12 * n_classes + 60)
    topics = [words[12 * c: 12 * (c + 1)] for c in range(n_classes)]
    noise = words[12 * n_classes:]
    records = []
    for i in range(n):
        t = list(rng.choice(topics[classes[i]], size=topic_words, replace=False))
        t += list(rng.choice(noise, size=noise_words, replace=False))
        # a serial word keeps every text distinct
        t.append("n%s" % i)
        records.append(NodeRecord(i, " ".join(t), CLASS_NAMES[classes[i]], str(i)))
    return AttributedGraph(records, indptr, indices)
