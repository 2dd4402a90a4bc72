"""
Search index: the immutable graph, its embedding table and the PPR cache,
shared by all rollouts.
"""
from pathlib import Path
import numpy as np
import logging

from ..embedding import Encoder, EncoderConfig, CorpusEmbeddings
from ..exceptions import EmptyText, EmptyQueryText, MissingVector
from ..graph.graph import degree_stats
from ..graph.io import load_graph_bin
from ..ppr import PPRConfig, PPRCache, global_pool

logger = logging.getLogger(__name__)

SCORE_DECIMALS = 12


def quantize(scores):
    """Round scores so that ties are decided by NodeId whatever the
    summation order of the dot products."""
    return np.round(scores, SCORE_DECIMALS)


class SearchIndex:
    def __init__(self, graph, embeddings, encoder=None, ppr_config=None, ppr_cache=None):
        """SearchIndex

        Args:
            graph (AttributedGraph): graph, possibly a masked view.
            embeddings (CorpusEmbeddings): one vector per node.
            encoder (Encoder, optional): query encoder.
            ppr_config (PPRConfig, optional): Defaults to PPRConfig().
            ppr_cache (PPRCache, optional): on-disk pool cache.
        """
        if len(embeddings) != graph.n_nodes:
            raise MissingVector(
                len(embeddings),
                "embedding table has %s rows for %s nodes" % (len(embeddings), graph.n_nodes),
            )
        self.graph = graph
        self.embeddings = embeddings
        self.encoder = encoder if encoder is not None else Encoder(EncoderConfig(dim=embeddings.dim))
        self.ppr_config = ppr_config if ppr_config is not None else PPRConfig()
        self.ppr_cache = ppr_cache
        self.norms = np.linalg.norm(embeddings.matrix, axis=1)
        self._stats = None

    @classmethod
    def load(cls, index_dir, ppr_config=None, encoder=None):
        """Open an index directory written by ``graphsearch index``."""
        index_dir = Path(index_dir)
        graph = load_graph_bin(index_dir / "graph.bin")
        embeddings = CorpusEmbeddings.load(index_dir)
        cache = PPRCache(index_dir / "ppr-cache")
        return cls(graph, embeddings, encoder=encoder, ppr_config=ppr_config, ppr_cache=cache)

    def with_graph(self, graph):
        """Same index over another adjacency view of the same nodes."""
        if graph is self.graph:
            return self
        return SearchIndex(graph, self.embeddings, self.encoder, self.ppr_config, self.ppr_cache)

    @property
    def stats(self):
        if self._stats is None:
            self._stats = degree_stats(self.graph)
        return self._stats

    def encode_query(self, text):
        try:
            return self.encoder.encode(text)
        except EmptyText:
            raise EmptyQueryText("query text has no tokens: %r" % text[:80]) from None

    def cosine_to(self, vec, members=None):
        """Cosine of vec against the rows ``members`` (all rows when None)."""
        matrix = self.embeddings.matrix
        vnorm = np.linalg.norm(vec)
        if members is None:
            return matrix @ vec / (self.norms * vnorm)
        if len(members) > len(matrix) // 2:
            raw = (matrix @ vec)[members]
        else:
            raw = matrix[members] @ vec
        return raw / (self.norms[members] * vnorm)

    def global_pool(self, anchor, M):
        cfg = self.ppr_config
        if cfg.pool_size != M:
            cfg = PPRConfig(cfg.damping, cfg.tolerance, cfg.max_iterations, M)
        return global_pool(self.graph, anchor, cfg, self.ppr_cache)

    def attribute_pool(self, anchor, size, exclude=()):
        """Top-size nodes by attribute cosine to the anchor, ties by id."""
        sims = quantize(self.cosine_to(self.embeddings.matrix[anchor]))
        keep = np.ones(len(sims), dtype=bool)
        keep[anchor] = False
        keep[list(exclude)] = False
        ids = np.nonzero(keep)[0]
        order = np.lexsort((ids, -sims[ids]))[:size]
        return np.sort(ids[order])

    def __repr__(self) -> str:
        return "SearchIndex(%r, dim=%s)" % (self.graph, self.embeddings.dim)
