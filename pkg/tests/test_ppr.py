import pytest
import numpy as np
from graphsearch.graph import build_graph, NodeRecord
from graphsearch.ppr import (
    PPRConfig,
    PPRCache,
    personalized_pagerank,
    global_neighbor_set,
    global_pool,
)

try:
    from _common_helpers import random_graph, dense_ppr
except ImportError:
    from tests._common_helpers import random_graph, dense_ppr


def _graph(n, pairs):
    g, _, _ = build_graph([NodeRecord(i, "node %s" % i) for i in range(n)], pairs)
    return g


def test_path_graph():
    g = _graph(3, [(0, 1), (1, 2)])
    scores = personalized_pagerank(g, 0, PPRConfig())
    assert scores.converged
    assert np.allclose(scores.scores, dense_ppr(g, 0), atol=1e-6)
    assert global_neighbor_set(scores, 0, 2) == [1, 2]


def test_isolated_anchor():
    g = _graph(3, [(1, 2)])
    scores = personalized_pagerank(g, 0)
    assert scores.score(0) == pytest.approx(1.0)
    assert scores.score(1) == 0 and scores.score(2) == 0
    assert global_neighbor_set(scores, 0, 5) == []


def test_star_tie_break():
    g = _graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    scores = personalized_pagerank(g, 0)
    assert global_neighbor_set(scores, 0, 3) == [1, 2, 3]


def test_dense_oracle_random():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(1, 51))
        g = random_graph(rng, n, float(rng.uniform(0.2, 3.0)) / max(n, 1))
        anchor = int(rng.integers(n))
        scores = personalized_pagerank(g, anchor)
        assert scores.scores.sum() == pytest.approx(1.0, abs=1e-9)
        assert np.all(scores.scores >= 0)
        assert np.allclose(scores.scores, dense_ppr(g, anchor), atol=1e-6)


def test_low_damping_concentrates():
    g = _graph(4, [(0, 1), (1, 2), (2, 3)])
    high = personalized_pagerank(g, 0, PPRConfig(damping=0.85)).score(0)
    low = personalized_pagerank(g, 0, PPRConfig(damping=0.01)).score(0)
    assert low > high
    assert low == pytest.approx(1.0, abs=0.02)


def test_not_converged_is_flag(caplog):
    g = _graph(4, [(0, 1), (1, 2), (2, 3)])
    scores = personalized_pagerank(g, 0, PPRConfig(max_iterations=2))
    assert not scores.converged
    assert scores.iterations_used == 2
    assert "did not converge" in caplog.text


def test_config_ranges():
    for kwargs in ({"damping": 1.0}, {"damping": 0}, {"tolerance": 0}, {"pool_size": 0}):
        with pytest.raises(ValueError):
            PPRConfig(**kwargs)


def test_cache(tmp_path, g0):
    cache = PPRCache(tmp_path / "ppr-cache")
    cfg = PPRConfig(pool_size=3)
    first = global_pool(g0, 0, cfg, cache)
    files = list((tmp_path / "ppr-cache").glob("*.txt"))
    assert len(files) == 1
    assert files[0].read_text().startswith("# format_version=1 anchor=0")
    assert cache.get(g0, 0, cfg) == first
    assert global_pool(g0, 0, cfg, cache) == first
    # a masked view gets its own entry
    global_pool(g0.without_edges([(0, 1)]), 0, cfg, cache)
    assert len(list((tmp_path / "ppr-cache").glob("*.txt"))) == 2
    assert not list((tmp_path / "ppr-cache").glob("*.tmp"))
