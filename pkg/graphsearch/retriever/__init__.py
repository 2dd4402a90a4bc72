from .setting import RetrieverConfig, R_MODE, F_MODE, DEFAULT_ALPHA
from .index import SearchIndex, quantize
from .candidates import TraversalState, CandidateSet, build_candidates
from .ranker import (
    RankedResult,
    score_candidate,
    retrieve,
    format_information,
    NO_RESULTS,
)
from .retrieval_log import RetrievalLog, read_retrieval_log

__all__ = [
    "RetrieverConfig",
    "R_MODE",
    "F_MODE",
    "DEFAULT_ALPHA",
    "SearchIndex",
    "quantize",
    "TraversalState",
    "CandidateSet",
    "build_candidates",
    "RankedResult",
    "score_candidate",
    "retrieve",
    "format_information",
    "NO_RESULTS",
    "RetrievalLog",
    "read_retrieval_log",
]
