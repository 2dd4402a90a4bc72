"""
graphsearch: agentic, structure-aware retrieval over attributed graphs.
"""
from . import logger

__version__ = "0.3.0"

logger.set_logger(__version__)

from .graph import AttributedGraph, load_graph, hop_neighborhood, exact_hop_ring  # noqa: E402
from .embedding import Encoder, EncoderConfig, CorpusEmbeddings, corpus_embeddings  # noqa: E402
from .ppr import PPRConfig, personalized_pagerank, global_neighbor_set  # noqa: E402
from .query import parse_search_block, extract_spans, parse_answer  # noqa: E402
from .retriever import (  # noqa: E402
    RetrieverConfig,
    SearchIndex,
    TraversalState,
    build_candidates,
    retrieve,
    format_information,
)
from .rollout import (  # noqa: E402
    RolloutConfig,
    run_inference,
    count_tokens,
    scripted_backend,
)
from .tasks import (  # noqa: E402
    BaselineMode,
    run_eval,
    build_link_instances,
    bench_retrieval,
)

__all__ = [
    "AttributedGraph",
    "load_graph",
    "hop_neighborhood",
    "exact_hop_ring",
    "Encoder",
    "EncoderConfig",
    "CorpusEmbeddings",
    "corpus_embeddings",
    "PPRConfig",
    "personalized_pagerank",
    "global_neighbor_set",
    "parse_search_block",
    "extract_spans",
    "parse_answer",
    "RetrieverConfig",
    "SearchIndex",
    "TraversalState",
    "build_candidates",
    "retrieve",
    "format_information",
    "RolloutConfig",
    "run_inference",
    "count_tokens",
    "scripted_backend",
    "BaselineMode",
    "run_eval",
    "build_link_instances",
    "bench_retrieval",
]
