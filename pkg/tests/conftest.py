import pytest
import os

path = os.path.dirname(os.path.abspath(__file__))

G0_NODES = """0\tProbabilistic_Methods\tMarkov chain Monte Carlo sampling for Bayesian networks
1\tProbabilistic_Methods\tGibbs sampler convergence diagnostics
2\tNeural_Networks\tBackpropagation training of deep neural networks
3\tProbabilistic_Methods\tOutperforming the Gibbs sampler with collapsed Markov chain sampling
4\tTheory\tPAC learning bounds for concept classes
5\t-\tIsolated note on graph databases
"""
G0_EDGES = "0\t1\n0\t2\n1\t3\n2\t3\n3\t4\n"

SAMPLE_SCRIPT = """--- step 1 ---
<think>The title alone is not enough, look at the neighbors.</think>
<search> mode=local, hop=1, query="Markov chain sampling Gibbs sampler" </search>
--- step 2 ---
<think>The neighbors are about sampling methods.</think>
<answer>Movies</answer>
"""


def pytest_collection_modifyitems(config, items):
    if os.environ.get("GS_RUN_SLOW", "0").lower() in ("1", "true", "yes"):
        return
    skip = pytest.mark.skip(reason="set GS_RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def g0_files(tmp_path):
    nodes = tmp_path / "nodes.tsv"
    edges = tmp_path / "edges.tsv"
    nodes.write_text(G0_NODES, encoding="utf-8")
    edges.write_text(G0_EDGES, encoding="utf-8")
    return nodes, edges


@pytest.fixture
def g0(g0_files):
    from graphsearch.graph import load_graph

    return load_graph(*g0_files)


@pytest.fixture
def encoder():
    from graphsearch.embedding import Encoder, EncoderConfig

    return Encoder(EncoderConfig(dim=256))


@pytest.fixture
def g0_embeddings(g0):
    from graphsearch.embedding import EncoderConfig, corpus_embeddings

    return corpus_embeddings(EncoderConfig(), g0)


@pytest.fixture
def g0_index(g0, g0_embeddings):
    from graphsearch.retriever import SearchIndex

    return SearchIndex(g0, g0_embeddings)


@pytest.fixture
def g0_index_dir(tmp_path, g0, g0_embeddings):
    from graphsearch.graph.io import save_graph

    index_dir = tmp_path / "idx"
    index_dir.mkdir()
    save_graph(g0, index_dir / "graph.bin")
    g0_embeddings.save(index_dir)
    return index_dir


@pytest.fixture
def sample_script(tmp_path):
    script = tmp_path / "sample.txt"
    script.write_text(SAMPLE_SCRIPT, encoding="utf-8")
    return script


@pytest.fixture
def movies_task():
    """Classification task whose class list holds the worked example answer."""
    from types import SimpleNamespace
    from graphsearch.query.schema import TaskKind

    return SimpleNamespace(
        kind=TaskKind.NODE_CLASSIFICATION,
        class_list=["Books", "Movies", "Music"],
    )


@pytest.fixture
def planted():
    from graphsearch.tasks.synthetic import planted_partition_graph

    return planted_partition_graph(n=60, n_classes=3, homophily=0.9, avg_degree=3, seed=0)
