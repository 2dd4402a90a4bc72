"""
Prompt templates: task, format and policy instructions plus the worked
example and the target-node input block.

Template files hold ``[task]``, ``[format]``, ``[policy]``, ``[example]``
and ``[input]`` sections with ``{placeholder}`` fields. Only lowercase
identifiers in braces are placeholders, so schema text such as
``mode={local|global}`` is left alone.
"""
import re
from pathlib import Path
import logging

from .schema import TaskKind
from ..exceptions import MissingField

logger = logging.getLogger(__name__)

TEMPLATES_DIR = Path(__file__).parent / "templates"
SEARCH_SCHEMA = "mode={local|global}, hop={1|2}, query={your query with keywords}"
SECTIONS = ("task", "format", "policy", "example", "input")

_PLACEHOLDER = re.compile(r"\{([a-z_][a-z0-9_]*)\}")
_SECTION = re.compile(r"^\[(task|format|policy|example|input)\]\s*$", re.M)


class PromptTemplate:
    def __init__(
        self,
        task_block,
        format_block,
        policy_block="",
        domain_knowledge="",
        class_list=(),
        example_block="",
        input_block="",
        dataset="attributed",
        node_type="node",
        name="custom",
    ) -> None:
        """PromptTemplate

        Args:
            task_block (str): task instruction.
            format_block (str): tools and search schema.
            policy_block (str, optional): when and where to search.
            domain_knowledge (str, optional): dataset description sentence.
            class_list (list, optional): category names, classification only.
            example_block (str, optional): worked example.
            input_block (str, optional): target node fields.
            dataset (str, optional): dataset name shown in the task line.
            node_type (str, optional): what a node is, e.g. "product".
        """
        self.task_block = task_block
        self.format_block = format_block
        self.policy_block = policy_block
        self.domain_knowledge = domain_knowledge
        self.class_list = list(class_list)
        self.example_block = example_block
        self.input_block = input_block
        self.dataset = dataset
        self.node_type = node_type
        self.name = name

    @classmethod
    def from_text(cls, text, name="custom", **kwargs):
        parts = _SECTION.split(text)
        blocks = {}
        # parts: [preamble, name1, body1, name2, body2, ...]
        for key, body in zip(parts[1::2], parts[2::2]):
            blocks[key] = body.strip("\n")
        missing = [key for key in ("task", "format", "input") if not blocks.get(key)]
        if missing:
            raise MissingField(missing[0], "template %s lacks section [%s]" % (name, missing[0]))
        return cls(
            blocks["task"],
            blocks["format"],
            policy_block=blocks.get("policy", ""),
            example_block=blocks.get("example", ""),
            input_block=blocks["input"],
            name=name,
            **kwargs,
        )

    @classmethod
    def from_file(cls, path, **kwargs):
        path = Path(path)
        return cls.from_text(path.read_text(encoding="utf-8"), name=path.stem, **kwargs)

    @property
    def blocks(self):
        return [self.task_block, self.format_block, self.policy_block,
                self.example_block, self.input_block]

    def __repr__(self) -> str:
        return "PromptTemplate(name=%r, dataset=%r, classes=%s)" % (
            self.name, self.dataset, len(self.class_list))


def template_name(traversal, task_kind, modes=2):
    task = "link" if task_kind is TaskKind.LINK_PREDICTION else "node"
    if traversal == "R":
        return "%s_r" % task
    if modes not in (2, 3):
        raise ValueError("template modes must be 2 or 3, got %s" % modes)
    return "%s_f%s" % (task, modes)


def load_template(traversal, task_kind, modes=2, templates_dir=None, **kwargs):
    """Load a shipped (or user supplied) template for a traversal and task.

    Args:
        traversal (str): "F" or "R".
        task_kind (TaskKind): task.
        modes (int, optional): 2 for local|global, 3 adds attribute.
        templates_dir (str, optional): directory overriding the shipped one.
        kwargs: PromptTemplate fields such as dataset, node_type,
            domain_knowledge, class_list.
    """
    directory = Path(templates_dir) if templates_dir else TEMPLATES_DIR
    path = directory / ("%s.txt" % template_name(traversal, task_kind, modes))
    return PromptTemplate.from_file(path, **kwargs)


def substitute(text, fields):
    def replace(m):
        key = m.group(1)
        if key not in fields:
            raise MissingField(key)
        return str(fields[key])

    return _PLACEHOLDER.sub(replace, text)


def render_prompt(tmpl, instance, g, stats=None):
    """Fill a template for one task instance.

    Args:
        tmpl (PromptTemplate): template
        instance: object with ``kind``, ``anchors`` and ``class_list``.
        g (AttributedGraph): graph the anchors belong to.
        stats (DegreeStats, optional): precomputed degree statistics.

    Raises:
        MissingField: empty class list for classification, or a placeholder
            with no value.

    Returns:
        str: prompt text
    """
    from ..graph.graph import degree_stats

    stats = stats if stats is not None else degree_stats(g)
    anchors = list(instance.anchors)
    class_list = list(getattr(instance, "class_list", None) or tmpl.class_list)
    if instance.kind is TaskKind.NODE_CLASSIFICATION and not class_list:
        raise MissingField("class_list")
    knowledge = (tmpl.domain_knowledge or "").strip()
    fields = {
        "dataset": tmpl.dataset,
        "node_type": tmpl.node_type,
        "domain_knowledge": knowledge + " " if knowledge else "",
        "target_text": g.text(anchors[0]),
        "degree": stats.degree(anchors[0]),
        "avg_degree": "%.2f" % stats.avg_degree,
        "class_list": "; ".join(class_list),
    }
    if len(anchors) > 1:
        fields["target_text_b"] = g.text(anchors[1])
        fields["degree_b"] = stats.degree(anchors[1])
    for key in ("dataset", "node_type"):
        if not str(fields[key]).strip():
            raise MissingField(key)
    blocks = [substitute(b, fields) for b in tmpl.blocks if b.strip()]
    return "\n\n".join(blocks) + "\n"
