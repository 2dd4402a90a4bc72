"""
Batch evaluation of task instances and the evaluation report.
"""
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from time import time
import json
import numpy as np
import pandas as pd
import logging

from ..exceptions import GraphSearchError, ConfigInvalid
from ..query.schema import Phase, TaskKind
from ..rollout.engine import run_inference
from ..rollout.tokens import phase_shares

logger = logging.getLogger(__name__)


class BaselineMode(Enum):
    GRAPH_AWARE = "graph_aware"
    STRUCTURE_AGNOSTIC = "structure_agnostic"

    def retriever_config(self, cfg):
        if self is BaselineMode.STRUCTURE_AGNOSTIC:
            return cfg.replace(structure_agnostic=True)
        return cfg.replace(structure_agnostic=False)


@dataclass
class Outcome:
    index: int
    anchors: tuple
    gold: object
    predicted: object
    correct: bool
    failure: str = None
    searches: int = 0
    scopes: tuple = ()
    fallbacks: int = 0
    tokens: dict = field(default_factory=dict)
    latencies_us: list = field(default_factory=list, compare=False, repr=False)

    def row(self):
        d = {
            "index": self.index,
            "anchors": " ".join(self.anchors),
            "gold": self.gold,
            "predicted": self.predicted,
            "correct": self.correct,
            "failure": self.failure or "",
            "searches": self.searches,
            "fallbacks": self.fallbacks,
        }
        for phase in Phase:
            d["tokens_%s" % phase.value] = self.tokens.get(phase.value, 0)
        return d


def _outcome(inst, g, trace=None, error=None):
    anchors = tuple(g.external_id(v) for v in inst.anchors)
    if trace is None:
        return Outcome(inst.index, anchors, inst.gold, None, False, failure=error.kind)
    predicted = trace.answer.value if trace.answer is not None else None
    results = [s.result for s in trace.searches if s.result is not None]
    return Outcome(
        inst.index,
        anchors,
        inst.gold,
        predicted,
        trace.failure is None and predicted == inst.gold,
        failure=trace.failure,
        searches=len(trace.searches),
        scopes=tuple(s.query.space.name for s in trace.searches if s.query is not None),
        fallbacks=sum(1 for r in results if r.candidates.fallback_used),
        tokens=dict(trace.token_counts),
        latencies_us=[r.elapsed_us for r in results],
    )


@dataclass
class EvalReport:
    n: int
    accuracy: float
    outcomes: list
    token_means: dict
    token_shares: dict
    fallback_rate: float
    failures: dict
    searches_per_rollout: float
    search_histogram: dict
    scope_counts: dict
    mode: str = BaselineMode.GRAPH_AWARE.value
    traversal: str = "F"
    alpha: float = 0.5
    latency_us: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_outcomes(cls, outcomes, mode, retriever_cfg):
        outcomes = sorted(outcomes, key=lambda o: o.index)
        n = len(outcomes)
        correct = sum(1 for o in outcomes if o.correct)
        token_means = {
            p.value: (float(np.mean([o.tokens.get(p.value, 0) for o in outcomes])) if n else 0.0)
            for p in Phase
        }
        latencies = np.array([x for o in outcomes for x in o.latencies_us], dtype=float)
        if len(latencies):
            latency = {
                "mean": float(latencies.mean()),
                "median": float(np.median(latencies)),
                "p95": float(np.percentile(latencies, 95)),
                "count": int(len(latencies)),
            }
        else:
            latency = {"mean": 0.0, "median": 0.0, "p95": 0.0, "count": 0}
        n_searches = sum(o.searches for o in outcomes)
        return cls(
            n=n,
            accuracy=correct / n if n else 0.0,
            outcomes=outcomes,
            token_means=token_means,
            token_shares=phase_shares(token_means),
            fallback_rate=(sum(o.fallbacks for o in outcomes) / n_searches) if n_searches else 0.0,
            failures=dict(sorted(Counter(o.failure for o in outcomes if o.failure).items())),
            searches_per_rollout=n_searches / n if n else 0.0,
            search_histogram=dict(sorted(Counter(o.searches for o in outcomes).items())),
            scope_counts=dict(sorted(Counter(s for o in outcomes for s in o.scopes).items())),
            mode=mode.value,
            traversal=retriever_cfg.traversal,
            alpha=retriever_cfg.alpha,
            latency_us=latency,
        )

    @property
    def n_correct(self):
        return sum(1 for o in self.outcomes if o.correct)

    def as_dict(self):
        return {
            "n": self.n,
            "accuracy": self.accuracy,
            "mode": self.mode,
            "traversal": self.traversal,
            "alpha": self.alpha,
            "latency_us": self.latency_us,
            "token_means": self.token_means,
            "token_shares": self.token_shares,
            "fallback_rate": self.fallback_rate,
            "failures": self.failures,
            "searches_per_rollout": self.searches_per_rollout,
            "search_histogram": {str(k): v for k, v in self.search_histogram.items()},
            "scope_counts": self.scope_counts,
        }

    def outcomes_frame(self):
        return pd.DataFrame([o.row() for o in self.outcomes])

    def write(self, out_dir, stem="report"):
        """Write ``<stem>.json`` and ``<stem>-outcomes.csv`` into out_dir."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / ("%s.json" % stem)).write_text(
            json.dumps(self.as_dict(), indent=2) + "\n", encoding="utf-8"
        )
        self.outcomes_frame().to_csv(out_dir / ("%s-outcomes.csv" % stem), index=False)

    def __repr__(self) -> str:
        s = "-" * 60 + "\n"
        s += "{:<25s}{:>20s}\n".format("Evaluation", "value")
        s += "{:<25s}{:>20s}\n".format("mode", self.mode)
        s += "{:<25s}{:>20s}\n".format("traversal", self.traversal)
        s += "{:<25s}{:>20.2f}\n".format("alpha", self.alpha)
        s += "{:<25s}{:>20d}\n".format("instances", self.n)
        s += "{:<25s}{:>20.4f}\n".format("accuracy", self.accuracy)
        s += "{:<25s}{:>20.1f}\n".format("latency mean (us)", self.latency_us.get("mean", 0.0))
        s += "{:<25s}{:>20.2f}\n".format("searches / rollout", self.searches_per_rollout)
        s += "{:<25s}{:>20.4f}\n".format("fallback rate", self.fallback_rate)
        for key, share in self.token_shares.items():
            s += "{:<25s}{:>20.4f}\n".format("share " + key, share)
        for key, count in self.failures.items():
            s += "{:<25s}{:>20d}\n".format("failed " + key, count)
        s += "-" * 60 + "\n"
        return s


def check_instances(instances, g):
    """Raise ConfigInvalid unless every instance fits graph g."""
    for inst in instances:
        for v in inst.anchors:
            if not 0 <= v < g.n_nodes:
                raise ConfigInvalid("instances", "instance %s names node %s outside the graph" % (inst.index, v))
        if inst.kind is TaskKind.LINK_PREDICTION and inst.gold is False:
            if g.has_edge(*inst.anchors):
                raise ConfigInvalid("instances", "negative instance %s is an edge" % inst.index)


def run_eval(instances, backend, mode, rollout_cfg, index, max_in_flight=4, retrieval_log=None):
    """Run one rollout per instance and aggregate the outcomes.

    Failures of single rollouts are recorded and count as incorrect.

    Args:
        instances (list): TaskInstance
        backend (ModelBackend): model
        mode (BaselineMode): graph-aware or structure-agnostic retrieval
        rollout_cfg (RolloutConfig): settings, its retriever config is
            adjusted to the mode
        index (SearchIndex): index over the full graph
        max_in_flight (int): concurrent rollouts
        retrieval_log (RetrievalLog, optional): shared retrieval log

    Raises:
        ConfigInvalid: an instance does not fit the graph.

    Returns:
        EvalReport
    """
    if max_in_flight < 1:
        raise ConfigInvalid("max_in_flight", "must be >= 1, got %s" % max_in_flight)
    check_instances(instances, index.graph)
    retriever_cfg = mode.retriever_config(rollout_cfg.retriever)
    cfg = rollout_cfg.with_retriever(retriever_cfg)
    g = index.graph

    def one(inst):
        view = index.with_graph(inst.view(g))
        try:
            trace = run_inference(backend, view, inst.anchors, inst, cfg, retrieval_log)
        except GraphSearchError as e:
            logger.warning("Instance {} failed: {}".format(inst.index, e))
            return _outcome(inst, g, error=e)
        return _outcome(inst, g, trace)

    tstart = time()
    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        outcomes = list(pool.map(one, instances))
    report = EvalReport.from_outcomes(outcomes, mode, retriever_cfg)
    logger.info(
        "Evaluated {} instances, accuracy {:1.4f}, time: {:1.2f}".format(
            report.n, report.accuracy, time() - tstart
        )
    )
    return report


def run_alpha_sweep(instances, backend, alphas, rollout_cfg, index, mode=BaselineMode.GRAPH_AWARE,
                    max_in_flight=4, retrieval_log=None):
    """One EvalReport per alpha value, in the order given."""
    reports = []
    for alpha in alphas:
        cfg = rollout_cfg.with_retriever(rollout_cfg.retriever.replace(alpha=alpha))
        reports.append(run_eval(instances, backend, mode, cfg, index, max_in_flight, retrieval_log))
    return reports
