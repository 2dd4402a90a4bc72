"""
Personalized PageRank from an anchor, and the global neighbor pool built
from its top-scoring nodes.
"""
import hashlib
import os
import tempfile
from pathlib import Path
from time import time
import numpy as np
import logging

logger = logging.getLogger(__name__)

PPR_CACHE_FORMAT_VERSION = 1


class PPRConfig:
    def __init__(self, damping=0.85, tolerance=1e-8, max_iterations=100, pool_size=50) -> None:
        if not 0 < damping < 1:
            raise ValueError("damping must be in (0, 1), got %s" % damping)
        if tolerance <= 0:
            raise ValueError("tolerance must be positive, got %s" % tolerance)
        if max_iterations < 1:
            raise ValueError("max_iterations must be >= 1, got %s" % max_iterations)
        if pool_size < 1:
            raise ValueError("pool_size must be >= 1, got %s" % pool_size)
        self.damping = float(damping)
        self.tolerance = float(tolerance)
        self.max_iterations = int(max_iterations)
        self.pool_size = int(pool_size)

    def as_dict(self):
        return {
            "damping": self.damping,
            "tolerance": self.tolerance,
            "max_iterations": self.max_iterations,
            "pool_size": self.pool_size,
        }

    def config_hash(self):
        text = ",".join("%s=%r" % item for item in sorted(self.as_dict().items()))
        return hashlib.sha1(text.encode()).hexdigest()[:12]

    def __repr__(self) -> str:
        return "PPRConfig(%s)" % ", ".join("%s=%s" % item for item in self.as_dict().items())


class PPRScores:
    def __init__(self, scores, iterations_used, converged) -> None:
        self.scores = scores
        self.iterations_used = iterations_used
        self.converged = converged

    def score(self, v):
        return float(self.scores[v])


def transition_matrix(g):
    """Transpose of the row-stochastic transition matrix, cached on g.

    Returns:
        tuple: (W^T as scipy csr_matrix, boolean mask of dangling nodes)
    """
    import scipy.sparse as sp

    if g._transition is not None:
        return g._transition
    n = g.n_nodes
    degrees = g.degrees.astype(np.float64)
    dangling = degrees == 0
    inv = np.zeros(n)
    inv[~dangling] = 1.0 / degrees[~dangling]
    data = np.repeat(inv, g.degrees)
    w = sp.csr_matrix((data, g.indices, g.indptr), shape=(n, n))
    g._transition = (w.T.tocsr(), dangling)
    return g._transition


def personalized_pagerank(g, anchor, cfg=None):
    """Power iteration of p <- (1 - d) e_anchor + d W^T p.

    Mass on dangling nodes teleports back to the anchor. Iteration stops when
    the L1 change drops below tolerance or at max_iterations; the latter is
    reported through ``converged`` rather than raised.

    Args:
        g (AttributedGraph): graph
        anchor (int): personalization node
        cfg (PPRConfig, optional): Defaults to PPRConfig().

    Returns:
        PPRScores
    """
    cfg = cfg if cfg is not None else PPRConfig()
    anchor = g.check_node(anchor)
    tstart = time()
    wt, dangling = transition_matrix(g)
    d = cfg.damping
    p = np.zeros(g.n_nodes)
    p[anchor] = 1.0
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        p_new = d * (wt @ p)
        p_new[anchor] += (1.0 - d) + d * p[dangling].sum()
        residual = np.abs(p_new - p).sum()
        p = p_new
        if residual < cfg.tolerance:
            converged = True
            break
    if not converged:
        logger.warning(
            "PPR for anchor {} did not converge in {} iterations".format(anchor, iterations)
        )
    logger.debug("PPR anchor {}: {} iterations, {:1.4f}s".format(anchor, iterations, time() - tstart))
    return PPRScores(p, iterations, converged)


def global_neighbor_set(scores, anchor, M):
    """Top-M nodes by score, anchor excluded, ties by ascending NodeId.

    Nodes without mass (other components) are never returned, so the list
    may be shorter than M.
    """
    s = np.asarray(scores.scores if isinstance(scores, PPRScores) else scores)
    candidates = np.nonzero(s > 0)[0]
    candidates = candidates[candidates != anchor]
    order = np.lexsort((candidates, -s[candidates]))
    return [int(v) for v in candidates[order][:M]]


class PPRCache:
    """Top-M pools on disk under ``ppr-cache/``, written atomically.

    Entries are keyed by anchor, config hash and graph fingerprint, so a
    masked evaluation view never reads the pool of the full graph.
    """

    def __init__(self, cache_dir) -> None:
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    def _path(self, g, anchor, cfg):
        key = "%s-%s" % (cfg.config_hash(), g.fingerprint)
        return self.cache_dir / ("%s-%s.txt" % (anchor, key))

    def get(self, g, anchor, cfg):
        path = self._path(g, anchor, cfg)
        if not path.exists():
            return None
        lines = path.read_text(encoding="utf-8").splitlines()
        pool = []
        for line in lines[1:]:
            if not line.strip():
                continue
            external_id, _score = line.split("\t")
            pool.append(g.id_of(external_id))
        return pool

    def put(self, g, anchor, cfg, pool, scores):
        path = self._path(g, anchor, cfg)
        header = "# format_version=%s anchor=%s config=%s graph=%s" % (
            PPR_CACHE_FORMAT_VERSION,
            g.external_id(anchor),
            cfg.config_hash(),
            g.fingerprint,
        )
        lines = [header]
        for v in pool:
            lines.append("%s\t%r" % (g.external_id(v), float(scores.scores[v])))
        fd, tmp = tempfile.mkstemp(dir=self.cache_dir, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")
        os.replace(tmp, path)


def global_pool(g, anchor, cfg=None, cache=None):
    """Global neighbor pool of an anchor, computed lazily and cached."""
    cfg = cfg if cfg is not None else PPRConfig()
    if cache is not None:
        pool = cache.get(g, anchor, cfg)
        if pool is not None:
            return pool
    scores = personalized_pagerank(g, anchor, cfg)
    pool = global_neighbor_set(scores, anchor, cfg.pool_size)
    if cache is not None:
        cache.put(g, anchor, cfg, pool, scores)
    return pool
