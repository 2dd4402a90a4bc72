import pytest
import numpy as np
import requests
from graphsearch.exceptions import (
    AnswerExtractionFailed,
    BackendFailure,
    MalformedRecord,
    ScriptExhausted,
)
from graphsearch.query import Phase, extract_spans
from graphsearch.retriever import RetrievalLog, RetrieverConfig
from graphsearch.rollout import (
    BackendConfig,
    Generation,
    RemoteChatBackend,
    RolloutConfig,
    ScriptedBackend,
    scripted_backend,
    parse_script,
    run_inference,
    count_tokens,
    phase_token_counts,
    phase_shares,
    EMPTY_QUERY_MESSAGE,
    FINAL_INSTRUCTION,
)
from graphsearch.rollout.backend import SEARCH, EOS, LENGTH

SEARCH_GEN = '<think>Look around.</think>\n<search> mode=local, hop=2, query="gibbs sampler" </search>'
ANSWER_GEN = "<think>Enough.</think>\n<answer>Movies</answer>"


def check_control_flow(trace):
    """One information span per completed search, and the run ends in an
    answer span or a recorded failure."""
    assert len(trace.information_spans) == trace.completed_searches
    assert trace.total_tokens == count_tokens(trace.transcript)
    if trace.failure is None:
        assert trace.spans[-1].phase is Phase.ANSWER
    spans = trace.spans
    for i, span in enumerate(spans):
        if span.phase is Phase.INFORMATION:
            assert spans[i - 1].phase is Phase.SEARCH


def test_sample_script(g0_index, sample_script, movies_task):
    trace = run_inference(scripted_backend(sample_script), g0_index, (0,), movies_task, RolloutConfig())
    assert trace.failure is None
    assert trace.answer.value == "Movies"
    assert len(trace.searches) == 1
    assert len(trace.information_spans) == 1
    assert [s.phase for s in trace.spans] == [
        Phase.THINK,
        Phase.SEARCH,
        Phase.INFORMATION,
        Phase.THINK,
        Phase.ANSWER,
    ]
    info = trace.information_spans[0].text
    assert "Gibbs sampler convergence diagnostics" in info
    assert set(trace.searches[0].result.nodes) == {1, 2}
    check_control_flow(trace)


def test_zero_search(g0_index, movies_task):
    backend = ScriptedBackend(["<think>The title says it all.</think><answer>Books</answer>"])
    trace = run_inference(backend, g0_index, (0,), movies_task, RolloutConfig())
    assert trace.answer.value == "Books"
    assert trace.searches == []
    assert trace.token_counts["information"] == 0
    check_control_flow(trace)


def test_step_cap_then_answer(g0_index, movies_task):
    backend = ScriptedBackend([SEARCH_GEN] * 8 + [ANSWER_GEN])
    trace = run_inference(backend, g0_index, (0,), movies_task, RolloutConfig(max_search_steps=8))
    assert trace.final_instruction
    assert trace.answer.value == "Movies"
    assert trace.transcript.count(FINAL_INSTRUCTION) == 1
    # the instruction sits inside the last information span
    assert FINAL_INSTRUCTION in trace.information_spans[-1].text
    check_control_flow(trace)


def test_step_cap_search_again(g0_index, movies_task):
    backend = ScriptedBackend([SEARCH_GEN] * 9)
    trace = run_inference(backend, g0_index, (0,), movies_task, RolloutConfig(max_search_steps=8))
    assert trace.failure == "AnswerExtractionFailed"
    assert trace.rejected_generation == SEARCH_GEN
    assert len(trace.searches) == 8
    assert trace.answer is None
    check_control_flow(trace)
    with pytest.raises(AnswerExtractionFailed):
        trace.raise_for_failure()


def test_script_exhausted(g0_index, movies_task):
    trace = run_inference(ScriptedBackend([SEARCH_GEN]), g0_index, (0,), movies_task, RolloutConfig())
    assert trace.failure == "ScriptExhausted"
    check_control_flow(trace)
    with pytest.raises(ScriptExhausted):
        trace.raise_for_failure()


def test_unparseable_answer(g0_index, movies_task):
    for text in ("<think>I give up.</think>", "<answer>Paintings</answer>"):
        trace = run_inference(ScriptedBackend([text]), g0_index, (0,), movies_task, RolloutConfig())
        assert trace.failure == "AnswerExtractionFailed"


def test_replay_identical(g0_index, sample_script, movies_task):
    backend = scripted_backend(sample_script)
    a = run_inference(backend, g0_index, (0,), movies_task, RolloutConfig())
    b = run_inference(backend, g0_index, (0,), movies_task, RolloutConfig())
    assert a == b
    assert a.transcript == b.transcript
    assert a.to_json(g0_index.graph) == b.to_json(g0_index.graph)


def test_empty_query_consumes_step(g0_index, movies_task):
    log = RetrievalLog()
    backend = ScriptedBackend(['<search> mode=local, hop=1, query="" </search>', ANSWER_GEN])
    trace = run_inference(backend, g0_index, (0,), movies_task, RolloutConfig(), retrieval_log=log)
    assert trace.answer.value == "Movies"
    assert trace.searches[0].error == "EmptyQueryText"
    assert trace.searches[0].result is None
    assert EMPTY_QUERY_MESSAGE in trace.information_spans[0].text
    assert len(log) == 0
    check_control_flow(trace)


def test_fallback_recorded(g0_index, movies_task):
    backend = ScriptedBackend(['<search> mode=frontier, query="gibbs" </search>', ANSWER_GEN])
    trace = run_inference(backend, g0_index, (0,), movies_task, RolloutConfig())
    record = trace.searches[0]
    assert record.fallback is not None
    assert set(record.result.nodes) == {1, 2}
    assert trace.to_dict(g0_index.graph)["searches"][0]["fallback"].startswith("unknown mode")


def test_r_traversal(g0_index, movies_task):
    cfg = RolloutConfig(retriever=RetrieverConfig("R", k=2))
    backend = ScriptedBackend(["<search> gibbs sampling </search>"] * 2 + [ANSWER_GEN])
    trace = run_inference(backend, g0_index, (0,), movies_task, cfg)
    assert set(trace.searches[0].result.nodes) == {1, 2}
    assert 3 in trace.searches[1].result.nodes
    assert "<search> your query here </search>" in trace.prompt


def test_token_budget(g0_index, movies_task):
    cfg = RolloutConfig(max_total_tokens=10)
    trace = run_inference(ScriptedBackend([SEARCH_GEN, ANSWER_GEN]), g0_index, (0,), movies_task, cfg)
    assert trace.failure == "TokenBudgetExceeded"
    backend = ScriptedBackend([Generation("<think>and so on", LENGTH)])
    trace = run_inference(backend, g0_index, (0,), movies_task, RolloutConfig())
    assert trace.failure == "TokenBudgetExceeded"


def test_count_tokens():
    assert count_tokens("") == 0
    assert count_tokens("mode=local, hop=1") == 7
    assert count_tokens("<think>") == 3
    rng = np.random.default_rng(1)
    alphabet = list("abc xyz,.=<>/ \n12")
    for _ in range(500):
        a = "".join(rng.choice(alphabet, size=int(rng.integers(0, 20))))
        b = "".join(rng.choice(alphabet, size=int(rng.integers(0, 20))))
        joined = count_tokens(a + b)
        assert count_tokens(a) + count_tokens(b) >= joined
        assert joined >= count_tokens(a) + count_tokens(b) - 1


def test_crafted_shares():
    transcript = (
        "<think>" + " ".join(["w"] * 40) + "</think>\n"
        "<search>a b c</search>\n"
        "<information>" + " ".join(["x"] * 55) + "</information>\n"
        "<answer>yes</answer>"
    )
    counts = phase_token_counts(transcript, extract_spans(transcript))
    assert counts == {"think": 47, "search": 10, "information": 62, "answer": 8}
    shares = phase_shares(counts)
    assert shares["information"] == pytest.approx(62 / 127, abs=0.01)
    assert shares["information"] == pytest.approx(0.49, abs=0.01)
    assert sum(shares.values()) == pytest.approx(1.0, abs=1e-9)


def test_parse_script():
    gens = parse_script("--- step 1 ---\n<search> q </search>\n--- step 2 ---\n<answer>x</answer>\n")
    assert [g.finish for g in gens] == [SEARCH, EOS]
    assert gens[0].text == "<search> q </search>"
    with pytest.raises(MalformedRecord):
        parse_script("preamble\n--- step 1 ---\nx\n")
    with pytest.raises(MalformedRecord) as e:
        parse_script("--- step 1 ---\nx\n--- step 3 ---\ny\n")
    assert e.value.lineno == 3


class FakeResponse:
    def __init__(self, status_code, data=None):
        self.status_code = status_code
        self.data = data
        self.text = str(data)

    def json(self):
        return self.data


class FakeHttp:
    """Replays canned responses and keeps the request payloads."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.calls.append((url, json))
        item = self.responses.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


def _reply(content, finish="stop", **message):
    return FakeResponse(
        200, {"choices": [{"message": dict(content=content, **message), "finish_reason": finish}]}
    )


def _remote(responses):
    cfg = BackendConfig("remote-chat", endpoint="http://model.test/v1", model="m", backoff=0)
    http = FakeHttp(responses)
    return RemoteChatBackend(cfg, http=http), http


def test_remote_retry_and_stop():
    backend, http = _remote([
        FakeResponse(503),
        requests.ConnectionError("reset"),
        _reply('<think>hm</think>\n<search> mode=global, query="y" '),
    ])
    gen = backend.session().generate("prompt", "")
    assert gen.finish == SEARCH
    assert gen.text.endswith("</search>")
    assert len(http.calls) == 3
    url, payload = http.calls[0]
    assert url == "http://model.test/v1/chat/completions"
    assert payload["stop"] == ["</search>"]
    assert payload["messages"] == [{"role": "user", "content": "prompt"}]


def test_remote_reply_keeps_stop_string():
    backend, _ = _remote([_reply('<search> mode=global, query="y" </search>\n')])
    gen = backend.session().generate("prompt", "")
    assert gen.finish == SEARCH
    assert gen.text.count("</search>") == 1
    assert gen.text.endswith("</search>")
    backend, _ = _remote([_reply("<think>done</think>\n<answer>Movies</answer>")])
    assert backend.session().generate("prompt", "").finish == EOS


def test_remote_rollout_kept_stop_string(g0_index, movies_task):
    backend, _ = _remote([
        _reply('<think>Neighbors.</think>\n<search> mode=local, hop=1, query="gibbs" </search>'),
        _reply("<answer>Movies</answer>"),
    ])
    trace = run_inference(backend, g0_index, (0,), movies_task, RolloutConfig())
    assert trace.failure is None
    assert trace.answer.value == "Movies"
    assert len(trace.searches) == 1
    check_control_flow(trace)


def test_remote_failures():
    backend, http = _remote([_reply(None, refusal="I can't help with that")])
    with pytest.raises(BackendFailure):
        backend.session().generate("prompt", "")
    assert len(http.calls) == 1
    backend, http = _remote([FakeResponse(400, {"error": "bad"})])
    with pytest.raises(BackendFailure):
        backend.session().generate("prompt", "")
    assert len(http.calls) == 1
    backend, http = _remote([FakeResponse(500)] * 3)
    with pytest.raises(BackendFailure):
        backend.session().generate("prompt", "")
    assert len(http.calls) == 3
    backend, _ = _remote([_reply("<think>long", finish="length")])
    assert backend.session().generate("prompt", "").finish == LENGTH


def test_remote_rollout(g0_index, movies_task):
    backend, http = _remote([
        _reply('<think>Check the neighbors.</think>\n<search> mode=local, hop=1, query="gibbs" '),
        _reply("<think>Done.</think>\n<answer>Movies</answer>"),
    ])
    trace = run_inference(backend, g0_index, (0,), movies_task, RolloutConfig())
    assert trace.answer.value == "Movies"
    messages = http.calls[1][1]["messages"]
    assert messages[1]["role"] == "assistant"
    assert messages[1]["content"].rstrip().endswith("</information>")
    check_control_flow(trace)


def test_backend_config_env(monkeypatch):
    monkeypatch.setenv("GS_MODEL_ENDPOINT", "http://env.test")
    monkeypatch.setenv("GS_MODEL_NAME", "env-model")
    cfg = BackendConfig("remote-chat")
    assert cfg.endpoint == "http://env.test"
    assert cfg.model == "env-model"
    with pytest.raises(ValueError):
        BackendConfig("telepathy")
