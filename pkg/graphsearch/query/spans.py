"""
Tagged transcript spans and answer extraction.
"""
import re
import logging

from .schema import Phase, TaggedSpan, TaskKind, Answer, AnswerKind
from ..exceptions import NoAnswerBlock, UnresolvableClass

logger = logging.getLogger(__name__)

_OPEN = re.compile(r"<(think|search|information|answer)>")

_YES = {"yes", "true", "1", "exists", "edge exists", "y"}
_NO = {"no", "false", "0", "not exists", "no edge", "n"}


def extract_spans(transcript, injected=None):
    """Split a transcript into tagged spans, in order.

    Non-blank text outside any tag becomes an implicit think span. A trailing
    tag without its closing tag is returned with ``partial=True``. Nothing is
    raised on malformed structure.

    Args:
        transcript (str): full transcript
        injected (set, optional): start offsets of engine-injected
            information spans. When given, any other information span is
            model-emitted and is reported as think text.

    Returns:
        list: TaggedSpan
    """
    spans = []
    pos = 0
    n = len(transcript)
    while pos < n:
        m = _OPEN.search(transcript, pos)
        stop = m.start() if m else n
        if transcript[pos:stop].strip():
            spans.append(
                TaggedSpan(Phase.THINK, transcript[pos:stop], pos, stop, implicit=True)
            )
        if m is None:
            break
        tag = m.group(1)
        close = "</%s>" % tag
        end = transcript.find(close, m.end())
        phase = Phase(tag)
        if phase is Phase.INFORMATION and injected is not None and m.start() not in injected:
            phase = Phase.THINK
        if end < 0:
            spans.append(TaggedSpan(phase, transcript[m.end():], m.start(), n, partial=True))
            break
        spans.append(TaggedSpan(phase, transcript[m.end():end], m.start(), end + len(close)))
        pos = end + len(close)
    return spans


def _norm(text):
    return " ".join(text.lower().split())


def match_class(text, class_list):
    """Exact match first, then a unique substring match, case-insensitive."""
    target = _norm(text)
    names = {_norm(c): c for c in class_list}
    if target in names:
        return names[target]
    if target:
        hits = [c for key, c in names.items() if key and (key in target or target in key)]
        if len(hits) == 1:
            return hits[0]
        if len(hits) > 1:
            raise UnresolvableClass("answer %r matches several classes: %s" % (text, hits))
    raise UnresolvableClass("answer %r matches no class" % text)


def parse_answer(transcript, task, spans=None):
    """Extract the Answer from the last complete answer span.

    Args:
        transcript (str): full transcript
        task: object with ``kind`` (TaskKind) and ``class_list``.
        spans (list, optional): spans already extracted from transcript.

    Raises:
        NoAnswerBlock: no closed answer span.
        UnresolvableClass: the answer names no class, several classes, or
            is not a yes/no for link prediction.
    """
    if spans is None:
        spans = extract_spans(transcript)
    answers = [s for s in spans if s.phase is Phase.ANSWER and not s.partial]
    if not answers:
        raise NoAnswerBlock("transcript has no <answer> block")
    text = answers[-1].text
    if task.kind is TaskKind.LINK_PREDICTION:
        value = _norm(text).strip(".!")
        if value in _YES:
            return Answer(AnswerKind.LINK_YES_NO, True)
        if value in _NO:
            return Answer(AnswerKind.LINK_YES_NO, False)
        raise UnresolvableClass("answer %r is not yes or no" % text)
    return Answer(AnswerKind.CLASS_LABEL, match_class(text, task.class_list))
