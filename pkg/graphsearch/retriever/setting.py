"""
Retriever settings.
"""
import logging

from ..query.schema import SearchSpace

logger = logging.getLogger(__name__)

R_MODE = "R"
F_MODE = "F"
DEFAULT_ALPHA = {R_MODE: 1.0, F_MODE: 0.5}


class RetrieverConfig:
    def __init__(
        self,
        traversal=F_MODE,
        alpha=None,
        k=3,
        hop_max=2,
        global_pool_M=50,
        attribute_pool_size=50,
        info_char_budget=600,
        hop_ceiling=4,
        union_scopes=(),
        structure_agnostic=False,
    ) -> None:
        """RetrieverConfig

        Args:
            traversal (str): "R" expands one hop per search, "F" follows
                the scope named by each query.
            alpha (float, optional): weight of anchor similarity in the
                hybrid score. Defaults to 1.0 for R and 0.5 for F.
            k (int): candidates returned per search.
            hop_max (int): largest local hop a query may ask for.
            global_pool_M (int): size of the PPR pool.
            attribute_pool_size (int): size of the attribute pool.
            info_char_budget (int): characters of node text per injected
                entry.
            hop_ceiling (int): largest ring served in R mode.
            union_scopes (tuple): extra SearchSpace pools activated on every
                F search, on top of the one the query names.
            structure_agnostic (bool): score the whole corpus by query
                similarity only (alpha forced to 0).
        """
        if traversal not in (R_MODE, F_MODE):
            raise ValueError("traversal must be R or F, got %r" % traversal)
        if alpha is None:
            alpha = DEFAULT_ALPHA[traversal]
        alpha = float(alpha)
        if not 0.0 <= alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1], got %s" % alpha)
        if int(k) < 1:
            raise ValueError("k must be >= 1, got %s" % k)
        if hop_max not in (1, 2):
            raise ValueError("hop_max must be 1 or 2, got %s" % hop_max)
        for name, value in (
            ("global_pool_M", global_pool_M),
            ("attribute_pool_size", attribute_pool_size),
            ("info_char_budget", info_char_budget),
            ("hop_ceiling", hop_ceiling),
        ):
            if int(value) < 1:
                raise ValueError("%s must be >= 1, got %s" % (name, value))
        for space in union_scopes:
            if not isinstance(space, SearchSpace):
                raise ValueError("union_scopes holds SearchSpace values, got %r" % (space,))
        self.traversal = traversal
        self.alpha = 0.0 if structure_agnostic else alpha
        self.k = int(k)
        self.hop_max = int(hop_max)
        self.global_pool_M = int(global_pool_M)
        self.attribute_pool_size = int(attribute_pool_size)
        self.info_char_budget = int(info_char_budget)
        self.hop_ceiling = int(hop_ceiling)
        self.union_scopes = tuple(union_scopes)
        self.structure_agnostic = bool(structure_agnostic)

    def as_dict(self):
        return {
            "traversal": self.traversal,
            "alpha": self.alpha,
            "k": self.k,
            "hop_max": self.hop_max,
            "global_pool_M": self.global_pool_M,
            "attribute_pool_size": self.attribute_pool_size,
            "info_char_budget": self.info_char_budget,
            "hop_ceiling": self.hop_ceiling,
            "union_scopes": self.union_scopes,
            "structure_agnostic": self.structure_agnostic,
        }

    def replace(self, **kwargs):
        """Copy with some fields changed."""
        values = self.as_dict()
        values.update(kwargs)
        return RetrieverConfig(**values)

    def __repr__(self) -> str:
        s = "-" * 60 + "\n"
        s += "{:<25s}{:>20s}\n".format("Retriever", "value")
        for key, value in self.as_dict().items():
            s += "{:<25s}{:>20s}\n".format(key, str(value))
        s += "-" * 60 + "\n"
        return s
