"""
Command line: ``graphsearch <command> [flags]``.

Commands:
    ingest   read nodes and edges files, write graph.bin and the ingest report
    index    build the embedding table, optionally warm the PPR cache
    run      one rollout for one anchor (or pair), print the trace
    eval     batch evaluation, write the report and per-instance outcomes
    bench    per-retrieval latency, graph-aware against structure-agnostic

Errors print ``error[<kind>]: <message>`` on stderr and exit with the code
of their kind in EXIT_CODES.
"""
from pathlib import Path
import argparse
import json
import sys
import logging

from . import __version__
from .config import SCHEMA, load_config
from .exceptions import GraphSearchError, UnknownCommand, ConfigInvalid
from .logger import update_logging_level

logger = logging.getLogger(__name__)

COMMANDS = ("ingest", "index", "run", "eval", "bench")

EXIT_CODES = {
    "ConfigInvalid": 3,
    "UnknownCommand": 4,
    "MalformedRecord": 10,
    "DanglingEdge": 11,
    "EmptyGraph": 12,
    "UnknownNode": 13,
    "EmptyText": 20,
    "DimensionMismatch": 21,
    "ZeroVector": 22,
    "MissingVector": 23,
    "MissingField": 30,
    "EmptyQueryText": 31,
    "NoAnswerBlock": 32,
    "UnresolvableClass": 33,
    "BackendFailure": 40,
    "AnswerExtractionFailed": 41,
    "TokenBudgetExceeded": 42,
    "ScriptExhausted": 43,
    "InsufficientEdges": 50,
}
# anything that is not a GraphSearchError
EXIT_OTHER = 1

_FLAGS = {
    "ingest": ("nodes", "edges", "directed", "index_dir"),
    "index": ("nodes", "edges", "directed", "index_dir", "encoder", "dim", "vectors",
              "damping", "ppr_tolerance", "ppr_max_iterations", "global_pool_M"),
    "run": ("index_dir", "traversal", "mode", "alpha", "k", "hop_max", "global_pool_M",
            "attribute_pool_size", "info_char_budget", "hop_ceiling", "max_search_steps",
            "max_total_tokens", "template_modes", "templates_dir", "dataset", "node_type",
            "domain_knowledge", "backend", "script", "temperature", "max_tokens",
            "retrieval_log"),
    "eval": ("index_dir", "instances", "n_nodes", "n_pos", "n_neg", "seed", "traversal", "mode",
             "alpha", "alpha_sweep", "k", "hop_max", "global_pool_M", "attribute_pool_size",
             "info_char_budget", "hop_ceiling", "max_search_steps", "max_total_tokens",
             "template_modes", "templates_dir", "dataset", "node_type", "domain_knowledge",
             "backend", "script", "temperature", "max_tokens", "max_in_flight", "out_dir",
             "retrieval_log"),
    "bench": ("index_dir", "bench_queries", "bench_nodes", "bench_degree", "seed", "k",
              "alpha", "out_dir"),
}


def _add_flag(parser, key):
    _, default, _, help_text = SCHEMA[key]
    flag = "--" + key.replace("_", "-")
    if key == "directed":
        parser.add_argument(flag, dest=key, action="store_const", const="true",
                            help="%s (default: %s)" % (help_text, default))
        return
    shown = ",".join(str(x) for x in default) if isinstance(default, tuple) else default
    parser.add_argument(flag, dest=key, default=None, metavar=key.upper(),
                        help="%s (default: %s)" % (help_text, shown))


class ArgumentParser(argparse.ArgumentParser):
    """Raises ConfigInvalid instead of exiting on bad flags."""

    def error(self, message):
        raise ConfigInvalid("argv", "%s: %s" % (self.prog, message))


def build_parser():
    parser = ArgumentParser(
        prog="graphsearch",
        description="Agentic structure-aware retrieval over attributed graphs.",
    )
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = parser.add_subparsers(dest="command", metavar="command")
    helps = {
        "ingest": "build graph.bin and the ingest report",
        "index": "build embeddings, optionally warm the PPR cache",
        "run": "one rollout, prints the trace",
        "eval": "batch evaluation",
        "bench": "retrieval latency comparison",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name], description=helps[name])
        p.add_argument("--config", default=None, help="key = value config file (default: None)")
        p.add_argument("--log-level", dest="log_level", default=None,
                       help="DEBUG, INFO, WARNING or ERROR (default: INFO)")
        for key in _FLAGS[name]:
            _add_flag(p, key)
        if name == "ingest":
            p.add_argument("--out", dest="index_dir", default=None, help="alias of --index-dir")
        if name == "index":
            p.add_argument("--warm", default=None,
                           help="comma separated external ids whose PPR pools are cached (default: None)")
        if name == "run":
            p.add_argument("--anchor", required=True, help="external id of the target node")
            p.add_argument("--anchor-b", default=None,
                           help="second node; makes the run a link prediction (default: None)")
    return parser


def _index_dir(cfg):
    path = Path(cfg.index_dir)
    if not (path / "graph.bin").is_file():
        raise ConfigInvalid("index_dir", "no graph.bin in %s, run ingest first" % path)
    return path


def cmd_ingest(cfg, args):
    from .graph.io import load_graph, save_graph

    cfg.require("nodes", "edges")
    cfg.validate_paths("nodes", "edges")
    g = load_graph(cfg.nodes, cfg.edges, directed=cfg.directed)
    out = Path(cfg.index_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_graph(g, out / "graph.bin")
    g.ingest_report.write(out / "ingest-report.txt")
    print(g.ingest_report)
    return 0


def cmd_index(cfg, args):
    from .embedding import corpus_embeddings
    from .graph.io import load_graph, save_graph, load_graph_bin
    from .ppr import PPRCache, global_pool

    cfg.validate_paths("nodes", "edges", "vectors")
    out = Path(cfg.index_dir)
    if cfg.nodes and cfg.edges:
        g = load_graph(cfg.nodes, cfg.edges, directed=cfg.directed)
        out.mkdir(parents=True, exist_ok=True)
        save_graph(g, out / "graph.bin")
        g.ingest_report.write(out / "ingest-report.txt")
    else:
        g = load_graph_bin(_index_dir(cfg) / "graph.bin")
    emb = corpus_embeddings(cfg.encoder_config(), g, index_dir=out)
    print("embeddings: %s x %s (%s)" % (len(emb), emb.dim, emb.kind))
    if args.warm:
        cache = PPRCache(out / "ppr-cache")
        ppr_cfg = cfg.ppr_config()
        ids = [x.strip() for x in args.warm.split(",") if x.strip()]
        for external_id in ids:
            global_pool(g, g.id_of(external_id), ppr_cfg, cache)
        print("warmed PPR cache for %s anchors" % len(ids))
    return 0


def _open_index(cfg):
    from .retriever.index import SearchIndex

    return SearchIndex.load(_index_dir(cfg), ppr_config=cfg.ppr_config())


def _backend(cfg, index):
    from .rollout.backend import make_backend

    if cfg.backend == "scripted":
        cfg.require("script")
        cfg.validate_paths("script")
    return make_backend(
        cfg.backend_config(),
        script=cfg.script,
        graph=index.graph,
        traversal=cfg.traversal,
        budget=cfg.info_char_budget,
    )


def _retrieval_log(cfg):
    from .retriever.retrieval_log import RetrievalLog

    return RetrievalLog(cfg.retrieval_log) if cfg.retrieval_log else None


def _rollout_config(cfg, g, kind, retriever=None):
    rollout_cfg = cfg.rollout_config(retriever)
    rollout_cfg.template = rollout_cfg.template_for(
        kind, class_list=g.class_list, **cfg.template_fields()
    )
    return rollout_cfg


def cmd_run(cfg, args):
    from types import SimpleNamespace
    from .query.schema import TaskKind
    from .rollout.engine import run_inference

    cfg.validate_paths("templates_dir", "script")
    index = _open_index(cfg)
    g = index.graph
    anchors = [g.id_of(args.anchor)]
    kind = TaskKind.NODE_CLASSIFICATION
    if args.anchor_b is not None:
        anchors.append(g.id_of(args.anchor_b))
        kind = TaskKind.LINK_PREDICTION
        # the pair's own edge is what is being predicted
        index = index.with_graph(g.without_edges([anchors]) if g.has_edge(*anchors) else g)
    task = SimpleNamespace(kind=kind, class_list=g.class_list)
    trace = run_inference(
        _backend(cfg, index), index, tuple(anchors), task, _rollout_config(cfg, g, kind),
        retrieval_log=_retrieval_log(cfg),
    )
    print(trace.prompt)
    print(trace.transcript)
    print(trace.to_json(g, timings=True))
    trace.raise_for_failure()
    return 0


def cmd_eval(cfg, args):
    from .tasks.evaluate import BaselineMode, run_eval, run_alpha_sweep
    from .tasks.instances import load_instances, build_node_instances, build_link_instances

    cfg.validate_paths("instances", "templates_dir", "script")
    index = _open_index(cfg)
    g = index.graph
    if cfg.instances:
        instances = load_instances(cfg.instances, g)
    elif cfg.n_pos or cfg.n_neg:
        instances = build_link_instances(g, cfg.n_pos, cfg.n_neg, cfg.seed)
    else:
        instances = build_node_instances(g, min(cfg.n_nodes, len([r for r in g.nodes if r.label])), cfg.seed)
    if not instances:
        raise ConfigInvalid("instances", "no instances to evaluate")
    mode = BaselineMode(cfg.mode)
    rollout_cfg = _rollout_config(cfg, g, instances[0].kind)
    backend = _backend(cfg, index)
    log = _retrieval_log(cfg)
    out = Path(cfg.out_dir)
    if cfg.alpha_sweep:
        reports = run_alpha_sweep(instances, backend, cfg.alpha_sweep, rollout_cfg, index, mode,
                                  cfg.max_in_flight, log)
        for alpha, report in zip(cfg.alpha_sweep, reports):
            report.write(out, stem="report-alpha-%s" % alpha)
            print(report)
        return 0
    report = run_eval(instances, backend, mode, rollout_cfg, index, cfg.max_in_flight, log)
    report.write(out)
    print(report)
    return 0


def cmd_bench(cfg, args):
    from .embedding import corpus_embeddings
    from .retriever.index import SearchIndex
    from .tasks.bench import bench_retrieval
    from .tasks.synthetic import synthetic_graph

    if (Path(cfg.index_dir) / "graph.bin").is_file():
        index = _open_index(cfg)
    else:
        logger.info("No index in {}, using a synthetic graph".format(cfg.index_dir))
        g = synthetic_graph(cfg.bench_nodes, cfg.bench_degree, cfg.seed)
        index = SearchIndex(g, corpus_embeddings(cfg.encoder_config(), g), ppr_config=cfg.ppr_config())
    retriever = cfg.retriever_config().replace(traversal="F", structure_agnostic=False)
    record = bench_retrieval(index, cfg.bench_queries, seed=cfg.seed, retriever_cfg=retriever)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "bench.json").write_text(json.dumps(record.as_dict(), indent=2) + "\n", encoding="utf-8")
    print(record)
    return 0


HANDLERS = {
    "ingest": cmd_ingest,
    "index": cmd_index,
    "run": cmd_run,
    "eval": cmd_eval,
    "bench": cmd_bench,
}


def _dispatch(argv):
    argv = list(argv)
    if not argv:
        build_parser().print_help(sys.stderr)
        raise UnknownCommand("no command given, expected one of %s" % ", ".join(COMMANDS))
    if not argv[0].startswith("-") and argv[0] not in COMMANDS:
        raise UnknownCommand("unknown command %r, expected one of %s" % (argv[0], ", ".join(COMMANDS)))
    args = build_parser().parse_args(argv)
    if args.command is None:
        return 0
    overrides = {key: getattr(args, key) for key in _FLAGS[args.command]}
    overrides["log_level"] = args.log_level
    cfg = load_config(args.config, overrides)
    update_logging_level(cfg.log_level)
    return HANDLERS[args.command](cfg, args)


def dispatch(argv):
    """Run one command and return its exit status."""
    try:
        return _dispatch(argv)
    except GraphSearchError as e:
        print("error[%s]: %s" % (e.kind, e), file=sys.stderr)
        return EXIT_CODES.get(e.kind, EXIT_OTHER)
    except (OSError, ValueError) as e:
        print("error[%s]: %s" % (type(e).__name__, e), file=sys.stderr)
        return EXIT_OTHER
    except SystemExit as e:
        # --help and --version
        if e.code is None or isinstance(e.code, int):
            return e.code or 0
        return EXIT_OTHER


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
