"""
Deterministic token accounting.

A token is a run of word characters or a single punctuation character, so
counts are stable across backends and phase shares are comparable.
"""
import re

from ..query.schema import Phase

_TOKEN = re.compile(r"\w+|[^\w\s]")


def count_tokens(text):
    return len(_TOKEN.findall(text))


def phase_token_counts(transcript, spans):
    """Tokens per phase; text outside every span counts as think.

    Span boundaries fall on tag characters, which are tokens of their own,
    so the counts always sum to ``count_tokens(transcript)``.
    """
    counts = {phase.value: 0 for phase in Phase}
    pos = 0
    for span in spans:
        counts[Phase.THINK.value] += count_tokens(transcript[pos:span.start])
        counts[span.phase.value] += count_tokens(transcript[span.start:span.end])
        pos = span.end
    counts[Phase.THINK.value] += count_tokens(transcript[pos:])
    return counts


def phase_shares(counts):
    total = sum(counts.values())
    if total == 0:
        return {key: 0.0 for key in counts}
    return {key: value / total for key, value in counts.items()}
