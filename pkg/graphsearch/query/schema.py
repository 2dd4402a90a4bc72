"""
Types of the rollout grammar: search spaces, structured queries, tagged
spans, task kinds and answers.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union


class SpaceKind(Enum):
    LOCAL = "local"
    GLOBAL = "global"
    ATTRIBUTE = "attribute"


@dataclass(frozen=True)
class SearchSpace:
    kind: SpaceKind
    hop: Optional[int] = None

    def __post_init__(self):
        if self.kind is SpaceKind.LOCAL and self.hop is None:
            raise ValueError("Local search space needs a hop")
        if self.kind is not SpaceKind.LOCAL and self.hop is not None:
            raise ValueError("%s search space carries no hop" % self.kind.value)

    @classmethod
    def local(cls, hop=1):
        return cls(SpaceKind.LOCAL, int(hop))

    @classmethod
    def global_(cls):
        return cls(SpaceKind.GLOBAL)

    @classmethod
    def attribute(cls):
        return cls(SpaceKind.ATTRIBUTE)

    @property
    def name(self):
        if self.kind is SpaceKind.LOCAL:
            return "local-%s" % self.hop
        return self.kind.value


@dataclass(frozen=True)
class FallbackEvent:
    """A structural field could not be honored and Local(1) was used."""

    reason: str
    raw: str


FIRST = "first"
SECOND = "second"


@dataclass(frozen=True)
class StructuredQuery:
    space: SearchSpace
    text: str
    anchor_selector: str = FIRST
    fallback: Optional[FallbackEvent] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("semantic text must be non-empty")
        if self.anchor_selector not in (FIRST, SECOND):
            raise ValueError("anchor_selector must be first or second")


class Phase(Enum):
    THINK = "think"
    SEARCH = "search"
    INFORMATION = "information"
    ANSWER = "answer"


TAGS = tuple(p.value for p in Phase)


@dataclass(frozen=True)
class TaggedSpan:
    """A tagged region of the transcript.

    ``text`` is the content between the tags; ``start``/``end`` cover the
    tags themselves. ``partial`` marks a trailing span without its closing
    tag, ``implicit`` marks untagged text attributed to the think phase.
    """

    phase: Phase
    text: str
    start: int
    end: int
    partial: bool = False
    implicit: bool = False


class TaskKind(Enum):
    NODE_CLASSIFICATION = "node_classification"
    LINK_PREDICTION = "link_prediction"


class AnswerKind(Enum):
    CLASS_LABEL = "class_label"
    LINK_YES_NO = "link_yes_no"


@dataclass(frozen=True)
class Answer:
    kind: AnswerKind
    value: Union[str, bool]
