import pytest
import json
from graphsearch import exceptions
from graphsearch.cli import dispatch, EXIT_CODES
from graphsearch.config import load_config
from graphsearch.exceptions import ConfigInvalid

RUN_SCRIPT = """--- step 1 ---
<think>Check the neighbors first.</think>
<search> mode=local, hop=1, query="Markov chain sampling Gibbs sampler" </search>
--- step 2 ---
<think>The neighbors are about sampling.</think>
<answer>Probabilistic_Methods</answer>
"""


@pytest.fixture
def run_script(tmp_path):
    path = tmp_path / "run.txt"
    path.write_text(RUN_SCRIPT, encoding="utf-8")
    return path


def _trace_json(out):
    lines = [line for line in out.splitlines() if line.startswith('{"spans"')]
    assert len(lines) == 1
    return json.loads(lines[0])


def test_empty_config(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("# nothing set\n", encoding="utf-8")
    cfg = load_config(path)
    assert cfg.k == 3
    assert cfg.hop_max == 2
    assert cfg.temperature == 0.7
    assert cfg.max_total_tokens == 8192
    assert cfg.max_search_steps == 8
    assert cfg.retriever_config().alpha == 0.5
    cfg = load_config(path, {"traversal": "R"})
    assert cfg.retriever_config().alpha == 1.0


def test_config_errors(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("alpha = 1.5\n", encoding="utf-8")
    with pytest.raises(ConfigInvalid) as e:
        load_config(path)
    assert e.value.field == "alpha"
    path.write_text("colour = blue\n", encoding="utf-8")
    with pytest.raises(ConfigInvalid) as e:
        load_config(path)
    assert e.value.field == "colour"
    path.write_text("k = three\n", encoding="utf-8")
    with pytest.raises(ConfigInvalid):
        load_config(path)
    with pytest.raises(ConfigInvalid) as e:
        load_config(tmp_path / "absent.cfg")
    assert e.value.field == "config"


def test_flag_overrides_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("alpha = 1  # anchor only\nk = 5\n", encoding="utf-8")
    cfg = load_config(path, {"alpha": "0", "k": None})
    assert cfg.alpha == 0.0
    assert cfg.k == 5


def test_exit_codes_cover_error_kinds():
    kinds = {
        name
        for name, obj in vars(exceptions).items()
        if isinstance(obj, type) and issubclass(obj, exceptions.GraphSearchError)
        and obj is not exceptions.GraphSearchError
    }
    assert kinds == set(EXIT_CODES)
    assert len(set(EXIT_CODES.values())) == len(EXIT_CODES)


def test_unknown_command(capsys):
    assert dispatch(["frobnicate"]) == 4
    assert "error[UnknownCommand]" in capsys.readouterr().err
    assert dispatch([]) == 4


def test_bad_flags_return_status(capsys):
    assert dispatch(["run"]) == EXIT_CODES["ConfigInvalid"]
    err = capsys.readouterr().err
    assert "error[ConfigInvalid]" in err
    assert "--anchor" in err
    assert dispatch(["eval", "--k", "three"]) == EXIT_CODES["ConfigInvalid"]
    assert dispatch(["bench", "--no-such-flag"]) == EXIT_CODES["ConfigInvalid"]
    assert dispatch(["run", "--help"]) == 0
    assert dispatch(["--version"]) == 0


def test_ingest(tmp_path, g0_files, capsys):
    nodes, edges = g0_files
    out = tmp_path / "idx"
    assert dispatch(["ingest", "--nodes", str(nodes), "--edges", str(edges), "--out", str(out)]) == 0
    report = (out / "ingest-report.txt").read_text(encoding="utf-8")
    assert "nodes=6" in report
    assert "edges=5" in report
    assert (out / "graph.bin").is_file()


def test_ingest_dangling(tmp_path, g0_files, capsys):
    edges = tmp_path / "bad.tsv"
    edges.write_text("0\t9\n", encoding="utf-8")
    code = dispatch(["ingest", "--nodes", str(g0_files[0]), "--edges", str(edges), "--out", str(tmp_path)])
    assert code == EXIT_CODES["DanglingEdge"]
    assert "error[DanglingEdge]" in capsys.readouterr().err


def test_index_warm(tmp_path, g0_files, capsys):
    nodes, edges = g0_files
    out = tmp_path / "idx"
    code = dispatch(
        ["index", "--nodes", str(nodes), "--edges", str(edges), "--index-dir", str(out), "--warm", "0,3"]
    )
    assert code == 0
    assert (out / "embeddings.bin").is_file()
    assert len(list((out / "ppr-cache").glob("*.txt"))) == 2


def test_run(g0_index_dir, run_script, capsys):
    code = dispatch(
        ["run", "--index-dir", str(g0_index_dir), "--anchor", "0", "--traversal", "F",
         "--backend", "scripted", "--script", str(run_script)]
    )
    assert code == 0
    trace = _trace_json(capsys.readouterr().out)
    assert trace["spans"][-1]["phase"] == "answer"
    assert trace["answer"] == "Probabilistic_Methods"
    assert trace["searches"][0]["scope"] == "local-1"
    assert "timings" in trace


def test_run_failure_exit(tmp_path, g0_index_dir, sample_script, capsys):
    code = dispatch(
        ["run", "--index-dir", str(g0_index_dir), "--anchor", "0", "--script", str(sample_script)]
    )
    # "Movies" is not a class of this graph
    assert code == EXIT_CODES["AnswerExtractionFailed"]
    assert "error[AnswerExtractionFailed]" in capsys.readouterr().err


def test_run_link(tmp_path, g0_index_dir, capsys):
    script = tmp_path / "link.txt"
    script.write_text(
        '--- step 1 ---\n<search> mode=local, hop=1, query="sampler", anchor=b </search>\n'
        "--- step 2 ---\n<answer>yes</answer>\n",
        encoding="utf-8",
    )
    code = dispatch(
        ["run", "--index-dir", str(g0_index_dir), "--anchor", "0", "--anchor-b", "1", "--script", str(script)]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "The degree of target node A is 1," in out
    assert _trace_json(out)["answer"] is True


def test_eval_missing_instances(tmp_path, g0_index_dir, capsys):
    missing = tmp_path / "missing.tsv"
    code = dispatch(["eval", "--index-dir", str(g0_index_dir), "--instances", str(missing)])
    assert code == 3
    err = capsys.readouterr().err
    assert "error[ConfigInvalid]" in err
    assert "missing.tsv" in err


def test_eval(tmp_path, g0_index_dir, run_script, capsys):
    out = tmp_path / "results"
    code = dispatch(
        ["eval", "--index-dir", str(g0_index_dir), "--script", str(run_script), "--n-nodes", "5",
         "--out-dir", str(out), "--retrieval-log", str(out / "retrieval.jsonl")]
    )
    assert code == 0
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["n"] == 5
    assert report["accuracy"] == 0.6
    assert (out / "report-outcomes.csv").is_file()
    assert len((out / "retrieval.jsonl").read_text(encoding="utf-8").splitlines()) == 5


def test_eval_alpha_sweep(tmp_path, g0_index_dir, run_script, capsys):
    out = tmp_path / "results"
    code = dispatch(
        ["eval", "--index-dir", str(g0_index_dir), "--script", str(run_script), "--n-nodes", "2",
         "--alpha-sweep", "0,1", "--out-dir", str(out)]
    )
    assert code == 0
    assert (out / "report-alpha-0.0.json").is_file()
    assert (out / "report-alpha-1.0.json").is_file()


def test_bench(tmp_path, g0_index_dir, capsys):
    out = tmp_path / "results"
    code = dispatch(
        ["bench", "--index-dir", str(g0_index_dir), "--bench-queries", "20", "--out-dir", str(out)]
    )
    assert code == 0
    record = json.loads((out / "bench.json").read_text(encoding="utf-8"))
    assert record["scored_max"]["structure_agnostic"] == 5
    assert record["n_queries"] == 20
