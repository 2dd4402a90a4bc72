"""
Hybrid ranking of a candidate set and the information text injected back
into the transcript.

The score of a candidate v for anchor a and query text c is

    alpha * cos(v, a) + (1 - alpha) * cos(v, c)

Scores are rounded to SCORE_DECIMALS before ordering, and ties go to the
smaller node id.
"""
from dataclasses import dataclass, field
from time import perf_counter_ns
from typing import Optional
import numpy as np
import logging

from .candidates import build_candidates, CandidateSet
from .index import quantize
from ..embedding import cos_sim

logger = logging.getLogger(__name__)

NO_RESULTS = "No relevant nodes found."
ELLIPSIS = "..."


@dataclass
class RankedResult:
    entries: list
    k_requested: int
    candidate_count: int = 0
    scored_count: int = 0
    elapsed_us: float = field(default=0.0, compare=False)
    candidates: Optional[CandidateSet] = field(default=None, compare=False, repr=False)

    @property
    def k_returned(self):
        return len(self.entries)

    @property
    def nodes(self):
        return [v for v, _ in self.entries]


def hybrid_score(cos_anchor, cos_query, alpha):
    if alpha == 1.0:
        return cos_anchor
    if alpha == 0.0:
        return cos_query
    return alpha * cos_anchor + (1.0 - alpha) * cos_query


def score_candidate(v, anchor, q, cfg, index):
    """Hybrid score of one candidate.

    Args:
        v (int): candidate node
        anchor (int): effective anchor
        q (StructuredQuery): query, its text is encoded only when alpha < 1
        cfg (RetrieverConfig): carries alpha
        index (SearchIndex): embeddings and query encoder

    Raises:
        MissingVector: no row for v or anchor.
        EmptyQueryText: the query text encodes to nothing and alpha < 1.
    """
    emb = index.embeddings
    cos_anchor = cos_query = 0.0
    if cfg.alpha > 0.0:
        cos_anchor = cos_sim(emb.vector(v), emb.vector(anchor))
    if cfg.alpha < 1.0:
        cos_query = cos_sim(emb.vector(v), index.encode_query(q.text))
    return hybrid_score(cos_anchor, cos_query, cfg.alpha)


def score_members(index, members, anchor, q, alpha):
    """Vectorized hybrid scores of ``members``, quantized and clipped."""
    scores = np.zeros(len(members))
    if len(members) == 0:
        return scores
    if alpha > 0.0:
        scores += alpha * index.cosine_to(index.embeddings.matrix[anchor], members)
    if alpha < 1.0:
        scores += (1.0 - alpha) * index.cosine_to(index.encode_query(q.text), members)
    return np.clip(quantize(scores), -1.0, 1.0)


def top_k(members, scores, k):
    """Indices into members of the k best scores, ties by ascending id."""
    n = len(members)
    if n > k:
        kth = np.partition(scores, n - k)[n - k]
        sel = np.nonzero(scores >= kth)[0]
    else:
        sel = np.arange(n)
    order = np.lexsort((members[sel], -scores[sel]))
    return sel[order[:k]]


def retrieve(index, anchors, q, state, cfg, log=None):
    """Build candidates, score them and keep the top k.

    Updates ``state.returned_so_far`` and, in R mode, moves the traversal to
    the next hop.

    Args:
        index (SearchIndex): shared index
        anchors (tuple): target node or node pair
        q (StructuredQuery): parsed query
        state (TraversalState): per-rollout state
        cfg (RetrieverConfig): settings
        log (RetrievalLog, optional): receives one record per call

    Returns:
        RankedResult: empty when no candidate remains.
    """
    tstart = perf_counter_ns()
    cands = build_candidates(index, anchors, q, state, cfg)
    members = cands.members
    scores = score_members(index, members, cands.anchor, q, cfg.alpha)
    best = top_k(members, scores, cfg.k)
    entries = [(int(members[i]), float(scores[i])) for i in best]
    elapsed = (perf_counter_ns() - tstart) / 1000.0
    result = RankedResult(entries, cfg.k, len(members), len(members), elapsed, cands)
    state.returned_so_far.update(v for v, _ in entries)
    hop = state.effective_hop if state.mode == "R" else q.space.hop
    state.advance()
    logger.debug(
        "retrieve anchor={} scope={} candidates={} returned={} time(us): {:1.2f}".format(
            cands.anchor, "+".join(cands.scope_used), len(members), len(entries), elapsed
        )
    )
    if log is not None:
        log.record(index.graph, cands, q, hop, cfg, result)
    return result


def truncate_text(text, budget):
    if len(text) <= budget:
        return text
    return text[:budget] + ELLIPSIS


def format_information(result, g, budget=600):
    """Numbered node texts of a result; labels are never included."""
    if not result.entries:
        return NO_RESULTS
    lines = []
    for i, (v, _) in enumerate(result.entries, 1):
        lines.append("%s. %s" % (i, truncate_text(g.text(v), budget)))
    return "\n".join(lines)
