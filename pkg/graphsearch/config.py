"""
Run configuration: a flat ``key = value`` file with ``#`` comments.

Values are resolved as defaults < config file < command-line flags. Keys
are the attribute names of RunConfig; unknown keys are rejected.
"""
from pathlib import Path
import logging

from .exceptions import ConfigInvalid

logger = logging.getLogger(__name__)


def _boolean(text):
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError("not a boolean: %r" % text)


def _optional_float(text):
    if text is None or str(text).strip().lower() in ("", "none", "default"):
        return None
    return float(text)


def _csv_floats(text):
    if text is None or not str(text).strip():
        return ()
    if isinstance(text, (tuple, list)):
        return tuple(float(x) for x in text)
    return tuple(float(x) for x in str(text).split(","))


def _choice(*values):
    def check(text):
        if text not in values:
            raise ValueError("expected one of %s, got %r" % ("|".join(values), text))
        return text

    return check


# key: (parser, default, check, help)
SCHEMA = {
    # paths
    "nodes": (str, None, None, "nodes file: external_id, label, text"),
    "edges": (str, None, None, "edges file: external_id pairs"),
    "directed": (_boolean, False, None, "treat edges as directed"),
    "index_dir": (str, "index", None, "index directory"),
    "templates_dir": (str, None, None, "directory overriding the shipped templates"),
    "instances": (str, None, None, "instances file"),
    "script": (str, None, None, "scripted backend trace file"),
    "vectors": (str, None, None, "precomputed vectors file"),
    "out_dir": (str, "results", None, "output directory"),
    "retrieval_log": (str, None, None, "retrieval log file (JSON lines)"),
    # retriever
    "traversal": (_choice("R", "F"), "F", None, "traversal policy"),
    "mode": (_choice("graph_aware", "structure_agnostic"), "graph_aware", None, "retrieval mode"),
    "alpha": (_optional_float, None, lambda x: x is None or 0.0 <= x <= 1.0,
              "anchor weight, 1.0 for R and 0.5 for F when unset"),
    "alpha_sweep": (_csv_floats, (), lambda xs: all(0.0 <= x <= 1.0 for x in xs),
                    "comma separated alpha values for an eval sweep"),
    "k": (int, 3, lambda x: x >= 1, "nodes returned per search"),
    "hop_max": (int, 2, lambda x: x in (1, 2), "largest local hop"),
    "global_pool_M": (int, 50, lambda x: x >= 1, "PPR pool size"),
    "attribute_pool_size": (int, 50, lambda x: x >= 1, "attribute pool size"),
    "info_char_budget": (int, 600, lambda x: x >= 1, "characters per injected node"),
    "hop_ceiling": (int, 4, lambda x: x >= 1, "largest R-mode ring"),
    "damping": (float, 0.85, lambda x: 0.0 < x < 1.0, "PPR damping"),
    "ppr_tolerance": (float, 1e-8, lambda x: x > 0, "PPR L1 tolerance"),
    "ppr_max_iterations": (int, 100, lambda x: x >= 1, "PPR iteration cap"),
    # encoder
    "encoder": (_choice("builtin-hashed-bow", "precomputed"), "builtin-hashed-bow", None, "encoder kind"),
    "dim": (int, 256, lambda x: x >= 1, "hashed bag-of-words dimension"),
    # rollout
    "max_search_steps": (int, 8, lambda x: x >= 1, "searches before the final instruction"),
    "max_total_tokens": (int, 8192, lambda x: x >= 1, "transcript token cap"),
    "template_modes": (int, 2, lambda x: x in (2, 3), "F template with 2 or 3 modes"),
    "dataset": (str, "attributed", None, "dataset name shown in prompts"),
    "node_type": (str, "node", None, "what a node is, shown in prompts"),
    "domain_knowledge": (str, "", None, "dataset description sentence"),
    # backend
    "backend": (_choice("scripted", "remote-chat", "majority"), "scripted", None, "model backend"),
    "temperature": (float, 0.7, lambda x: x >= 0.0, "sampling temperature"),
    "max_tokens": (int, 8192, lambda x: x >= 1, "tokens per generation request"),
    "max_in_flight": (int, 4, lambda x: x >= 1, "concurrent rollouts and requests"),
    # tasks
    "seed": (int, 0, None, "seed of all sampling"),
    "n_nodes": (int, 100, lambda x: x >= 1, "sampled classification instances"),
    "n_pos": (int, 0, lambda x: x >= 0, "sampled positive links"),
    "n_neg": (int, 0, lambda x: x >= 0, "sampled negative links"),
    "bench_queries": (int, 5000, lambda x: x >= 1, "queries per bench mode"),
    "bench_nodes": (int, 100000, lambda x: x >= 2, "synthetic bench graph size"),
    "bench_degree": (int, 20, lambda x: x >= 1, "synthetic bench average degree"),
    "log_level": (_choice("DEBUG", "INFO", "WARNING", "ERROR"), "INFO", None, "logging level"),
}

INPUT_PATHS = ("nodes", "edges", "templates_dir", "instances", "script", "vectors")


def parse_value(key, text):
    if key not in SCHEMA:
        raise ConfigInvalid(key, "unknown key")
    parser, _, check, _ = SCHEMA[key]
    try:
        value = parser(text) if text is not None else None
    except (TypeError, ValueError) as e:
        raise ConfigInvalid(key, str(e)) from None
    if value is not None and check is not None and not check(value):
        raise ConfigInvalid(key, "value %r out of range" % (text,))
    return value


def read_config_file(path):
    """Raw ``key -> text`` of a config file."""
    values = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigInvalid("line %s" % lineno, "expected key = value in %s" % path)
            key, text = (x.strip() for x in line.split("=", 1))
            values[key] = text
    return values


class RunConfig:
    def __init__(self, **values) -> None:
        for key, (_, default, _, _) in SCHEMA.items():
            setattr(self, key, values.pop(key, default))
        if values:
            key = sorted(values)[0]
            raise ConfigInvalid(key, "unknown key")

    def as_dict(self):
        return {key: getattr(self, key) for key in SCHEMA}

    def validate_paths(self, *keys):
        """Raise ConfigInvalid for a set input path that does not exist."""
        for key in keys or INPUT_PATHS:
            value = getattr(self, key)
            if value is not None and not Path(value).exists():
                raise ConfigInvalid(key, "path does not exist: %s" % value)

    def require(self, *keys):
        for key in keys:
            if getattr(self, key) is None:
                raise ConfigInvalid(key, "required")

    def retriever_config(self):
        from .retriever.setting import RetrieverConfig

        return RetrieverConfig(
            traversal=self.traversal,
            alpha=self.alpha,
            k=self.k,
            hop_max=self.hop_max,
            global_pool_M=self.global_pool_M,
            attribute_pool_size=self.attribute_pool_size,
            info_char_budget=self.info_char_budget,
            hop_ceiling=self.hop_ceiling,
            structure_agnostic=self.mode == "structure_agnostic",
        )

    def ppr_config(self):
        from .ppr import PPRConfig

        return PPRConfig(self.damping, self.ppr_tolerance, self.ppr_max_iterations, self.global_pool_M)

    def encoder_config(self):
        from .embedding import EncoderConfig

        return EncoderConfig(self.encoder, self.dim, self.vectors)

    def backend_config(self):
        from .rollout.backend import BackendConfig

        return BackendConfig(
            kind=self.backend,
            temperature=self.temperature,
            max_tokens=self.max_tokens,
            max_in_flight=self.max_in_flight,
        )

    def rollout_config(self, retriever=None):
        from .rollout.engine import RolloutConfig

        return RolloutConfig(
            max_search_steps=self.max_search_steps,
            retriever=retriever if retriever is not None else self.retriever_config(),
            template_modes=self.template_modes,
            templates_dir=self.templates_dir,
            max_total_tokens=self.max_total_tokens,
        )

    def template_fields(self):
        return {
            "dataset": self.dataset,
            "node_type": self.node_type,
            "domain_knowledge": self.domain_knowledge,
        }

    def __repr__(self) -> str:
        s = "-" * 60 + "\n"
        s += "{:<25s}{:>30s}\n".format("Run config", "value")
        for key, value in self.as_dict().items():
            s += "{:<25s}{:>30s}\n".format(key, str(value))
        s += "-" * 60 + "\n"
        return s


def load_config(path=None, overrides=None):
    """Build a RunConfig from defaults, a config file and overrides.

    Args:
        path (str, optional): config file, must exist when given.
        overrides (dict, optional): key -> value from the command line;
            None values are ignored.

    Raises:
        ConfigInvalid: unknown key, unparsable or out-of-range value, or a
            missing config file.

    Returns:
        RunConfig
    """
    values = {}
    if path is not None:
        if not Path(path).is_file():
            raise ConfigInvalid("config", "path does not exist: %s" % path)
        for key, text in read_config_file(path).items():
            values[key] = parse_value(key, text)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        values[key] = parse_value(key, value) if isinstance(value, str) else _checked(key, value)
    cfg = RunConfig(**values)
    logger.debug("Run config:\n{}".format(cfg))
    return cfg


def _checked(key, value):
    if key not in SCHEMA:
        raise ConfigInvalid(key, "unknown key")
    parser, _, check, _ = SCHEMA[key]
    if parser is _csv_floats:
        value = _csv_floats(value)
    if check is not None and not check(value):
        raise ConfigInvalid(key, "value %r out of range" % (value,))
    return value
