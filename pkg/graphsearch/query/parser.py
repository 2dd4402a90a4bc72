"""
Parser of the graph-oriented search DSL.

F policy accepts the flat form ``mode=local, hop=1, query=...`` and the
parenthesized form ``mode=(local, hop=1), query=...``. Structural fields
that cannot be honored fall back to Local(1) and record a FallbackEvent.
R policy takes the whole block as semantic text.
"""
import re
import logging

from .schema import SearchSpace, SpaceKind, StructuredQuery, FallbackEvent, FIRST, SECOND
from ..exceptions import EmptyQueryText

logger = logging.getLogger(__name__)

F_POLICY = "F"
R_POLICY = "R"

_VALUE = r"[\(\{\[]?\s*([^\s,;\)\}\]\|]*)"
_QUERY = re.compile(r"\bquery\s*[=:]\s*", re.I)
_MODE = re.compile(r"\bmode\s*=\s*" + _VALUE, re.I)
_HOP = re.compile(r"\bhop\s*=\s*" + _VALUE, re.I)
_ANCHOR = re.compile(r"\banchor\s*=\s*" + _VALUE, re.I)
_FIELD = re.compile(r"\b(?:mode|hop|anchor)\s*=\s*[\(\{\[]?\s*[^\s,;\)\}\]]*[\)\}\]]?", re.I)
_QUOTED = re.compile(
    r"""^(["'])(.*?)\1\s*(?=$|[,;]\s*(?:anchor|query|mode|hop)\s*[=:])""", re.S | re.I
)
_TRAILING_FIELD = re.compile(r"[,;]\s*(?:anchor|query|mode|hop)\s*[=:]", re.I)

_ANCHOR_VALUES = {
    "a": FIRST,
    "first": FIRST,
    "1": FIRST,
    "b": SECOND,
    "second": SECOND,
    "2": SECOND,
}


def _has_tokens(text):
    from ..embedding import tokenize

    return bool(tokenize(text))


def _split_query_value(rest):
    """Split the text after ``query=`` into (value, trailing fields)."""
    rest = rest.strip()
    m = _QUOTED.match(rest)
    if m:
        return m.group(2).strip(), rest[m.end():]
    if rest[:1] in ("'", '"'):
        rest = rest[1:]
    m = _TRAILING_FIELD.search(rest)
    if m:
        value, trailing = rest[: m.start()], rest[m.start():]
    else:
        value, trailing = rest, ""
    value = value.strip().rstrip(",;").strip()
    if value.startswith("{") and value.endswith("}"):
        value = value[1:-1].strip()
    value = value.strip("\"'").strip()
    return value, trailing


def _resolve_space(mode, hop, hop_max):
    """Return (SearchSpace, fallback reason or None)."""
    if not mode:
        return SearchSpace.local(1), "missing mode"
    mode = mode.lower()
    if mode == SpaceKind.GLOBAL.value:
        return SearchSpace.global_(), None
    if mode == SpaceKind.ATTRIBUTE.value:
        return SearchSpace.attribute(), None
    if mode != SpaceKind.LOCAL.value:
        return SearchSpace.local(1), "unknown mode %r" % mode
    if not hop:
        return SearchSpace.local(1), "missing hop"
    try:
        h = int(hop)
    except ValueError:
        return SearchSpace.local(1), "hop %r is not an integer" % hop
    if not 1 <= h <= hop_max:
        return SearchSpace.local(1), "hop %s out of range 1..%s" % (h, hop_max)
    return SearchSpace.local(h), None


def parse_search_block(raw, mode_policy=F_POLICY, hop_max=2):
    """Parse the contents of a search span.

    Args:
        raw (str): text between ``<search>`` and ``</search>``.
        mode_policy (str): "F" or "R".
        hop_max (int, optional): largest accepted hop. Defaults to 2.

    Raises:
        EmptyQueryText: no usable semantic text.

    Returns:
        StructuredQuery: ``fallback`` is set when Local(1) was forced.
    """
    if mode_policy == R_POLICY:
        text = raw.strip()
        if not _has_tokens(text):
            raise EmptyQueryText("search block has no query text")
        # the traversal state decides the scope in R mode
        return StructuredQuery(SearchSpace.local(1), text)
    if mode_policy != F_POLICY:
        raise ValueError("unknown mode policy %r" % mode_policy)

    m = _QUERY.search(raw)
    if m:
        prefix = raw[: m.start()]
        text, trailing = _split_query_value(raw[m.end():])
        if _QUERY.search(trailing):
            logger.debug("Ignoring extra query fields: {}".format(trailing.strip()))
    else:
        prefix = raw
        trailing = ""
        text = _FIELD.sub(" ", raw).strip(" \t\n,;()")
    if not _has_tokens(text):
        raise EmptyQueryText("search block has no query text: %r" % raw.strip()[:80])

    mode = _MODE.search(prefix) or _MODE.search(trailing)
    hop = _HOP.search(prefix) or _HOP.search(trailing)
    space, reason = _resolve_space(
        mode.group(1) if mode else None, hop.group(1) if hop else None, hop_max
    )
    anchor = _ANCHOR.search(prefix) or _ANCHOR.search(trailing)
    selector = FIRST
    if anchor:
        selector = _ANCHOR_VALUES.get(anchor.group(1).lower().strip("'\""), None)
        if selector is None:
            logger.debug("Unknown anchor selector {!r}, using first".format(anchor.group(1)))
            selector = FIRST
    fallback = None
    if reason is not None:
        fallback = FallbackEvent(reason, raw)
        logger.info("Search fallback to local hop=1: {}".format(reason))
    return StructuredQuery(space, text, selector, fallback)


def serialize_query(q):
    """Canonical F-policy text of a query; parse_search_block inverts it.

    The text is quoted with whichever quote character it does not contain.

    Raises:
        ValueError: the text contains both quote characters.
    """
    if q.space.kind is SpaceKind.LOCAL:
        s = "mode=local, hop=%s, " % q.space.hop
    else:
        s = "mode=%s, " % q.space.kind.value
    if '"' not in q.text:
        s += 'query="%s"' % q.text
    elif "'" not in q.text:
        s += "query='%s'" % q.text
    else:
        raise ValueError("query text holds both quote characters: %r" % q.text)
    if q.anchor_selector == SECOND:
        s += ", anchor=b"
    return s
