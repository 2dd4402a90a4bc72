from .schema import (
    SpaceKind,
    SearchSpace,
    StructuredQuery,
    FallbackEvent,
    Phase,
    TaggedSpan,
    TaskKind,
    Answer,
    AnswerKind,
)
from .parser import parse_search_block, serialize_query, F_POLICY, R_POLICY
from .spans import extract_spans, parse_answer
from .template import PromptTemplate, load_template, render_prompt, SEARCH_SCHEMA

__all__ = [
    "SpaceKind",
    "SearchSpace",
    "StructuredQuery",
    "FallbackEvent",
    "Phase",
    "TaggedSpan",
    "TaskKind",
    "Answer",
    "AnswerKind",
    "parse_search_block",
    "serialize_query",
    "F_POLICY",
    "R_POLICY",
    "extract_spans",
    "parse_answer",
    "PromptTemplate",
    "load_template",
    "render_prompt",
    "SEARCH_SCHEMA",
]
