"""
The rollout loop: generate until ``</search>`` or end of sequence, retrieve
for every completed search, inject the result as an ``<information>`` span
and stop at the answer.
"""
from dataclasses import dataclass, field
from time import time
from types import SimpleNamespace
from typing import Optional
import json
import logging

from .backend import SEARCH, LENGTH, STOP_SEARCH
from .tokens import count_tokens, phase_token_counts, phase_shares
from ..exceptions import (
    GraphSearchError,
    EmptyQueryText,
    NoAnswerBlock,
    UnresolvableClass,
    AnswerExtractionFailed,
    TokenBudgetExceeded,
)
from ..query.parser import parse_search_block, serialize_query
from ..query.schema import Phase, FallbackEvent, StructuredQuery
from ..query.spans import extract_spans, parse_answer
from ..query.template import PromptTemplate, load_template, render_prompt
from ..retriever.candidates import TraversalState
from ..retriever.ranker import RankedResult, retrieve, format_information
from ..retriever.setting import RetrieverConfig

logger = logging.getLogger(__name__)

EMPTY_QUERY_MESSAGE = "The search had no query text. Write keywords after query= and search again."
FINAL_INSTRUCTION = (
    "You have reached the maximum number of searches. Do not search again. "
    "Give your final answer now inside <answer> </answer>."
)


class RolloutConfig:
    def __init__(
        self,
        max_search_steps=8,
        retriever=None,
        template=None,
        template_modes=2,
        templates_dir=None,
        max_total_tokens=8192,
    ) -> None:
        """RolloutConfig

        Args:
            max_search_steps (int): searches before the final instruction.
            retriever (RetrieverConfig, optional): traversal and ranking.
            template (PromptTemplate, optional): overrides the shipped
                template of the traversal and task.
            template_modes (int): 2 (local|global) or 3 (adds attribute).
            templates_dir (str, optional): directory of template files.
            max_total_tokens (int): transcript token cap.
        """
        if int(max_search_steps) < 1:
            raise ValueError("max_search_steps must be >= 1, got %s" % max_search_steps)
        if int(max_total_tokens) < 1:
            raise ValueError("max_total_tokens must be >= 1, got %s" % max_total_tokens)
        if template is not None and not isinstance(template, PromptTemplate):
            raise ValueError("template must be a PromptTemplate")
        self.max_search_steps = int(max_search_steps)
        self.retriever = retriever if retriever is not None else RetrieverConfig()
        self.template = template
        self.template_modes = int(template_modes)
        self.templates_dir = templates_dir
        self.max_total_tokens = int(max_total_tokens)

    @property
    def traversal(self):
        return self.retriever.traversal

    def template_for(self, task_kind, **kwargs):
        if self.template is not None:
            return self.template
        return load_template(
            self.traversal, task_kind, self.template_modes, self.templates_dir, **kwargs
        )

    def with_retriever(self, retriever):
        return RolloutConfig(
            self.max_search_steps,
            retriever,
            self.template,
            self.template_modes,
            self.templates_dir,
            self.max_total_tokens,
        )

    def as_dict(self):
        return {
            "max_search_steps": self.max_search_steps,
            "traversal": self.traversal,
            "template_modes": self.template_modes,
            "max_total_tokens": self.max_total_tokens,
        }


@dataclass
class SearchRecord:
    raw: str
    query: Optional[StructuredQuery] = None
    result: Optional[RankedResult] = None
    fallback: Optional[FallbackEvent] = None
    error: Optional[str] = None

    def to_dict(self, g):
        d = {"raw": self.raw.strip(), "error": self.error}
        if self.query is not None:
            d["query"] = serialize_query(self.query)
            d["scope"] = self.query.space.name
        if self.fallback is not None:
            d["fallback"] = self.fallback.reason
        if self.result is not None:
            d["scope_used"] = list(self.result.candidates.scope_used)
            d["fallback_used"] = self.result.candidates.fallback_used
            d["scored"] = self.result.scored_count
            d["returned"] = [[g.external_id(v), s] for v, s in self.result.entries]
        return d


@dataclass
class RolloutTrace:
    prompt: str
    transcript: str
    spans: list
    token_counts: dict
    searches: list
    answer: object = None
    failure: Optional[str] = None
    failure_message: Optional[str] = None
    final_instruction: bool = False
    rejected_generation: Optional[str] = None
    timings: dict = field(default_factory=dict, compare=False)
    error: Optional[GraphSearchError] = field(default=None, compare=False, repr=False)

    @property
    def total_tokens(self):
        return sum(self.token_counts.values())

    @property
    def shares(self):
        return phase_shares(self.token_counts)

    @property
    def information_spans(self):
        return [s for s in self.spans if s.phase is Phase.INFORMATION]

    @property
    def completed_searches(self):
        return len([s for s in self.searches if s.result is not None or s.error is not None])

    def raise_for_failure(self):
        if self.error is not None:
            raise self.error

    def to_dict(self, g, timings=False):
        d = {
            "spans": [
                {"phase": s.phase.value, "text": s.text, "partial": s.partial} for s in self.spans
            ],
            "token_counts": dict(self.token_counts),
            "searches": [s.to_dict(g) for s in self.searches],
            "answer": None if self.answer is None else self.answer.value,
            "failure": self.failure,
            "failure_message": self.failure_message,
            "final_instruction": self.final_instruction,
        }
        if timings:
            d["timings"] = dict(self.timings)
        return d

    def to_json(self, g, timings=False):
        return json.dumps(self.to_dict(g, timings=timings))


def _latest_search(transcript):
    end = transcript.rfind(STOP_SEARCH)
    start = transcript.rfind("<search>", 0, end)
    if start < 0:
        return transcript[:end]
    return transcript[start + len("<search>"):end]


def run_inference(backend, index, anchors, task, rollout_cfg, retrieval_log=None):
    """Drive one rollout for a task instance.

    Failures (BackendFailure, AnswerExtractionFailed, TokenBudgetExceeded,
    ScriptExhausted) end the loop and are recorded on the trace;
    ``trace.raise_for_failure()`` re-raises them.

    Args:
        backend (ModelBackend): model
        index (SearchIndex): index whose graph view the rollout searches
        anchors (tuple): target node, or the pair for link prediction
        task: object with ``kind`` and ``class_list``
        rollout_cfg (RolloutConfig): settings
        retrieval_log (RetrievalLog, optional): one record per retrieval

    Returns:
        RolloutTrace
    """
    g = index.graph
    cfg = rollout_cfg.retriever
    anchors = tuple(g.check_node(a) for a in anchors)
    target = SimpleNamespace(kind=task.kind, anchors=anchors, class_list=list(task.class_list or ()))
    tmpl = rollout_cfg.template_for(task.kind)
    prompt = render_prompt(tmpl, target, g, stats=index.stats)

    timings = {"generation": 0.0, "retrieval": 0.0}
    state = TraversalState(cfg.traversal, cfg.hop_ceiling)
    session = backend.session()
    transcript = ""
    injected = set()
    searches = []
    final = False
    answer = None
    error = None
    rejected = None
    while True:
        tstart = time()
        try:
            gen = session.generate(prompt, transcript)
        except GraphSearchError as e:
            error = e
            break
        finally:
            timings["generation"] += time() - tstart
        if gen.finish == SEARCH and final:
            rejected = gen.text
            error = AnswerExtractionFailed("search emitted after the final instruction")
            break
        transcript += gen.text
        if count_tokens(transcript) > rollout_cfg.max_total_tokens or gen.finish == LENGTH:
            error = TokenBudgetExceeded(
                "transcript exceeds %s tokens" % rollout_cfg.max_total_tokens
            )
            break
        if gen.finish != SEARCH:
            try:
                answer = parse_answer(transcript, target, extract_spans(transcript, injected))
            except (NoAnswerBlock, UnresolvableClass) as e:
                error = AnswerExtractionFailed(str(e))
            break

        raw = _latest_search(transcript)
        record = SearchRecord(raw)
        tstart = time()
        try:
            q = parse_search_block(raw, cfg.traversal, cfg.hop_max)
        except EmptyQueryText as e:
            record.error = e.kind
            info = EMPTY_QUERY_MESSAGE
        else:
            record.query = q
            record.fallback = q.fallback
            record.result = retrieve(index, anchors, q, state, cfg, log=retrieval_log)
            info = format_information(record.result, g, cfg.info_char_budget)
        timings["retrieval"] += time() - tstart
        searches.append(record)
        if len(searches) >= rollout_cfg.max_search_steps:
            info += "\n\n" + FINAL_INSTRUCTION
            final = True
        transcript += "\n"
        injected.add(len(transcript))
        transcript += "<information>\n%s\n</information>\n" % info

    spans = extract_spans(transcript, injected)
    trace = RolloutTrace(
        prompt=prompt,
        transcript=transcript,
        spans=spans,
        token_counts=phase_token_counts(transcript, spans),
        searches=searches,
        answer=answer,
        final_instruction=final,
        rejected_generation=rejected,
        timings=timings,
    )
    if error is not None:
        trace.failure = error.kind
        trace.failure_message = str(error)
        trace.error = error
        logger.info("Rollout failed: {}: {}".format(error.kind, error))
    logger.debug(
        "Rollout done, searches: {}, tokens: {}, generation: {:1.2f}, retrieval: {:1.2f}".format(
            len(searches), trace.total_tokens, timings["generation"], timings["retrieval"]
        )
    )
    return trace
