"""
Candidate construction: the union of the local, global and attribute pools
activated by a query, minus the anchors and nodes already returned.
"""
import numpy as np
import logging

from .setting import R_MODE, F_MODE
from ..graph.neighborlist import hop_neighborhood_array, exact_hop_ring_array
from ..query.schema import SpaceKind, SECOND

logger = logging.getLogger(__name__)

LOCAL = "local"
GLOBAL = "global"
ATTRIBUTE = "attribute"
CORPUS = "corpus"

_EMPTY = np.zeros(0, dtype=np.int64)


class TraversalState:
    """Per-rollout retrieval state."""

    def __init__(self, mode=F_MODE, hop_ceiling=4) -> None:
        if mode not in (R_MODE, F_MODE):
            raise ValueError("mode must be R or F, got %r" % mode)
        self.mode = mode
        self.current_hop = 1
        self.hop_ceiling = hop_ceiling
        self.returned_so_far = set()

    @property
    def effective_hop(self):
        """Ring served at this step; the ceiling ring repeats once reached."""
        return min(self.current_hop, self.hop_ceiling)

    def advance(self):
        if self.mode == R_MODE:
            self.current_hop = min(self.current_hop + 1, self.hop_ceiling)

    def __repr__(self) -> str:
        return "TraversalState(mode=%s, current_hop=%s, returned=%s)" % (
            self.mode,
            self.current_hop,
            len(self.returned_so_far),
        )


class CandidateSet:
    def __init__(self, anchor, pools, fallback_used=False) -> None:
        """CandidateSet

        Args:
            anchor (int): effective anchor of the search.
            pools (dict): origin flag -> sorted array of member ids, after
                exclusions.
            fallback_used (bool): R-mode ring was filled from the global pool.
        """
        self.anchor = anchor
        self.pools = pools
        self.fallback_used = fallback_used
        if len(pools) == 1:
            self.members = np.asarray(next(iter(pools.values())), dtype=np.int64)
        elif pools:
            self.members = np.unique(np.concatenate(list(pools.values())).astype(np.int64))
        else:
            self.members = _EMPTY

    @property
    def scope_used(self):
        return tuple(self.pools)

    def provenance(self, v):
        return {flag for flag, ids in self.pools.items() if v in set(ids.tolist())}

    @property
    def member_set(self):
        return set(self.members.tolist())

    def __len__(self):
        return len(self.members)

    def __contains__(self, v):
        i = np.searchsorted(self.members, v)
        return bool(i < len(self.members) and self.members[i] == v)

    def __repr__(self) -> str:
        sizes = ", ".join("%s=%s" % (flag, len(ids)) for flag, ids in self.pools.items())
        return "CandidateSet(anchor=%s, %s, fallback=%s)" % (self.anchor, sizes, self.fallback_used)


def effective_anchor(anchors, q):
    """Anchor of a search: the second node of a pair when the query selects it."""
    if len(anchors) > 1 and q.anchor_selector == SECOND:
        return anchors[1]
    return anchors[0]


def _exclude(ids, excluded):
    ids = np.asarray(ids, dtype=np.int64)
    if len(ids) == 0 or len(excluded) == 0:
        return ids
    return ids[~np.isin(ids, excluded)]


def _pool(index, space, anchor, anchors, cfg):
    g = index.graph
    if space.kind is SpaceKind.LOCAL:
        return LOCAL, hop_neighborhood_array(g, anchor, space.hop)
    if space.kind is SpaceKind.GLOBAL:
        return GLOBAL, np.array(index.global_pool(anchor, cfg.global_pool_M), dtype=np.int64)
    return ATTRIBUTE, index.attribute_pool(anchor, cfg.attribute_pool_size, exclude=anchors)


def build_candidates(index, anchors, q, state, cfg):
    """Construct the candidate set of one search.

    F mode activates the pool named by ``q.space`` (plus any
    ``cfg.union_scopes``). R mode serves the exact ring at the current hop and
    fills it from the global pool when fewer than k nodes remain.

    Args:
        index (SearchIndex): graph and embeddings
        anchors (tuple): one node, or a pair for link prediction
        q (StructuredQuery): parsed query
        state (TraversalState): per-rollout state
        cfg (RetrieverConfig): settings

    Raises:
        UnknownNode: an anchor is not in the graph.

    Returns:
        CandidateSet
    """
    g = index.graph
    anchors = tuple(g.check_node(a) for a in anchors)
    anchor = effective_anchor(anchors, q)
    if cfg.structure_agnostic:
        keep = np.ones(g.n_nodes, dtype=bool)
        keep[list(anchors)] = False
        return CandidateSet(anchor, {CORPUS: np.nonzero(keep)[0]})

    excluded = np.array(sorted(set(anchors) | state.returned_so_far), dtype=np.int64)
    pools = {}
    fallback = False
    if state.mode == R_MODE:
        ring = _exclude(exact_hop_ring_array(g, anchor, state.effective_hop), excluded)
        pools[LOCAL] = ring
        if len(ring) < cfg.k:
            fallback = True
            taken = set(ring.tolist()) | set(excluded.tolist())
            fill = []
            for v in index.global_pool(anchor, cfg.global_pool_M):
                if len(ring) + len(fill) >= cfg.k:
                    break
                if v not in taken:
                    fill.append(v)
            pools[GLOBAL] = np.array(sorted(fill), dtype=np.int64)
            logger.debug("R ring of size {} filled with {} global nodes".format(len(ring), len(fill)))
    else:
        for space in (q.space,) + cfg.union_scopes:
            flag, ids = _pool(index, space, anchor, anchors, cfg)
            ids = _exclude(ids, excluded)
            if flag in pools:
                ids = np.union1d(pools[flag], ids)
            pools[flag] = np.sort(ids)
    return CandidateSet(anchor, pools, fallback_used=fallback)
