"""
Per-retrieval latency of graph-aware against structure-agnostic retrieval.
"""
from dataclasses import dataclass, field
from time import time
import numpy as np
from scipy.stats import gmean
import logging

from .evaluate import BaselineMode
from ..query.schema import SearchSpace, StructuredQuery
from ..retriever.candidates import TraversalState
from ..retriever.ranker import retrieve
from ..retriever.setting import RetrieverConfig, F_MODE

logger = logging.getLogger(__name__)


@dataclass
class BenchRecord:
    n_queries: int
    modes: tuple
    mean_us: dict = field(compare=False)
    scored_mean: dict = field(default_factory=dict)
    scored_max: dict = field(default_factory=dict)

    @property
    def speedup(self):
        """Mean latency of the second mode over the first."""
        first, second = self.modes
        if self.mean_us[first] == 0:
            return float("nan")
        return self.mean_us[second] / self.mean_us[first]

    def as_dict(self):
        return {
            "n_queries": self.n_queries,
            "modes": list(self.modes),
            "mean_us": self.mean_us,
            "scored_mean": self.scored_mean,
            "scored_max": self.scored_max,
            "speedup": self.speedup,
        }

    def __repr__(self) -> str:
        s = "-" * 60 + "\n"
        s += "{:<25s}{:>15s}{:>15s}\n".format("Mode", "mean (us)", "scored")
        for mode in self.modes:
            s += "{:<25s}{:>15.1f}{:>15.1f}\n".format(mode, self.mean_us[mode], self.scored_mean[mode])
        s += "{:<25s}{:>15.2f}\n".format("speedup", self.speedup)
        s += "-" * 60 + "\n"
        return s


def bench_queries(g, n_queries, seed=0):
    """(anchor, query text) pairs; the query reuses another node's text."""
    rng = np.random.default_rng(seed)
    anchors = rng.integers(0, g.n_nodes, size=n_queries)
    sources = rng.integers(0, g.n_nodes, size=n_queries)
    return [(int(a), g.text(int(s))) for a, s in zip(anchors, sources)]


def bench_retrieval(index, n_queries, modes=(BaselineMode.GRAPH_AWARE, BaselineMode.STRUCTURE_AGNOSTIC),
                    seed=0, space=None, retriever_cfg=None):
    """Issue the same (anchor, query) pairs through two retrieval modes.

    Latency covers the retrieve call only. One untimed warm-up call per mode
    comes first.

    Args:
        index (SearchIndex): index
        n_queries (int): number of queries
        modes (tuple): two BaselineMode values, possibly equal
        seed (int): query sampling seed
        space (SearchSpace, optional): graph-aware scope. Defaults to Local(1).
        retriever_cfg (RetrieverConfig, optional): base settings

    Returns:
        BenchRecord
    """
    space = space if space is not None else SearchSpace.local(1)
    base = retriever_cfg if retriever_cfg is not None else RetrieverConfig(traversal=F_MODE)
    queries = bench_queries(index.graph, n_queries, seed)
    names = tuple(m.value for m in modes)
    if names[0] == names[1]:
        names = (names[0], names[1] + "-control")
    times = {name: [] for name in names}
    scored = {name: [] for name in names}
    tstart = time()
    for mode, name in zip(modes, names):
        cfg = mode.retriever_config(base)
        warm = StructuredQuery(space, queries[0][1])
        retrieve(index, (queries[0][0],), warm, TraversalState(cfg.traversal, cfg.hop_ceiling), cfg)
        for anchor, text in queries:
            q = StructuredQuery(space, text)
            result = retrieve(index, (anchor,), q, TraversalState(cfg.traversal, cfg.hop_ceiling), cfg)
            times[name].append(result.elapsed_us)
            scored[name].append(result.scored_count)
    record = BenchRecord(
        n_queries,
        names,
        {name: float(np.mean(times[name])) for name in names},
        {name: float(np.mean(scored[name])) for name in names},
        {name: int(np.max(scored[name])) for name in names},
    )
    logger.info("Bench of {} queries done in {:1.2f} s, speedup {:1.2f}".format(
        n_queries, time() - tstart, record.speedup))
    return record


def geometric_mean_speedup(records):
    return float(gmean([r.speedup for r in records]))
