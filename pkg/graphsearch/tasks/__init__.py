from .instances import (
    TaskInstance,
    load_instances,
    write_instances,
    build_link_instances,
    build_node_instances,
)
from .synthetic import synthetic_graph, planted_partition_graph
from .evaluate import BaselineMode, EvalReport, Outcome, run_eval, run_alpha_sweep
from .bench import BenchRecord, bench_retrieval, geometric_mean_speedup

__all__ = [
    "TaskInstance",
    "load_instances",
    "write_instances",
    "build_link_instances",
    "build_node_instances",
    "synthetic_graph",
    "planted_partition_graph",
    "BaselineMode",
    "EvalReport",
    "Outcome",
    "run_eval",
    "run_alpha_sweep",
    "BenchRecord",
    "bench_retrieval",
    "geometric_mean_speedup",
]
