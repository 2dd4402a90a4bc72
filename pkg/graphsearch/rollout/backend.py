"""
Model backends. A backend opens one session per rollout; a session turns
(prompt, transcript so far) into the next generation, which stops at
``</search>`` or at end of sequence.
"""
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from time import sleep
import threading
import os
import re
import logging

import requests

from ..exceptions import BackendFailure, ScriptExhausted, MalformedRecord
from ..query.schema import Phase
from ..query.spans import extract_spans

logger = logging.getLogger(__name__)

SEARCH = "search"
EOS = "eos"
LENGTH = "length"
STOP_SEARCH = "</search>"

SCRIPTED = "scripted"
REMOTE_CHAT = "remote-chat"
MAJORITY = "majority"

_STEP = re.compile(r"^--- step (\d+) ---[ \t]*$", re.M)
_ENTRY = re.compile(r"^\s*\d+\.\s(.*)$", re.M)


@dataclass(frozen=True)
class Generation:
    text: str
    finish: str = EOS

    def __post_init__(self):
        if self.finish not in (SEARCH, EOS, LENGTH):
            raise ValueError("unknown finish reason %r" % self.finish)


def classify_finish(text):
    return SEARCH if text.rstrip().endswith(STOP_SEARCH) else EOS


class BackendConfig:
    def __init__(
        self,
        kind=SCRIPTED,
        endpoint=None,
        model=None,
        api_key=None,
        temperature=0.7,
        max_tokens=8192,
        max_in_flight=4,
        timeout=120.0,
        max_attempts=3,
        backoff=0.5,
    ) -> None:
        """BackendConfig

        Args:
            kind (str): "scripted", "remote-chat" or "majority".
            endpoint (str, optional): base URL of a chat-completions server.
                Defaults to $GS_MODEL_ENDPOINT.
            model (str, optional): Defaults to $GS_MODEL_NAME.
            api_key (str, optional): Defaults to $GS_API_KEY.
            temperature (float): sampling temperature.
            max_tokens (int): generation cap per request.
            max_in_flight (int): concurrent remote requests.
            timeout (float): seconds per request.
            max_attempts (int): tries on transport errors and 5xx replies.
            backoff (float): first retry delay in seconds, doubled per retry.
        """
        if kind not in (SCRIPTED, REMOTE_CHAT, MAJORITY):
            raise ValueError("unknown backend kind %r" % kind)
        if temperature < 0:
            raise ValueError("temperature must be >= 0, got %s" % temperature)
        if max_tokens < 1 or max_in_flight < 1 or max_attempts < 1:
            raise ValueError("max_tokens, max_in_flight and max_attempts must be >= 1")
        self.kind = kind
        self.endpoint = endpoint or os.environ.get("GS_MODEL_ENDPOINT")
        self.model = model or os.environ.get("GS_MODEL_NAME")
        self.api_key = api_key or os.environ.get("GS_API_KEY")
        self.temperature = float(temperature)
        self.max_tokens = int(max_tokens)
        self.max_in_flight = int(max_in_flight)
        self.timeout = float(timeout)
        self.max_attempts = int(max_attempts)
        self.backoff = float(backoff)

    def as_dict(self):
        return {
            "kind": self.kind,
            "endpoint": self.endpoint,
            "model": self.model,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "max_in_flight": self.max_in_flight,
            "timeout": self.timeout,
            "max_attempts": self.max_attempts,
        }

    def __repr__(self) -> str:
        s = "-" * 60 + "\n"
        s += "{:<25s}{:>30s}\n".format("Backend", "value")
        for key, value in self.as_dict().items():
            s += "{:<25s}{:>30s}\n".format(key, str(value))
        s += "-" * 60 + "\n"
        return s


class ModelBackend:
    kind = None

    def session(self):
        raise NotImplementedError


class ScriptSession:
    def __init__(self, generations) -> None:
        self.generations = generations
        self.step = 0

    def generate(self, prompt, transcript):
        if self.step >= len(self.generations):
            raise ScriptExhausted(
                "script has %s generations, engine asked for generation %s"
                % (len(self.generations), self.step + 1)
            )
        gen = self.generations[self.step]
        self.step += 1
        return gen


class ScriptedBackend(ModelBackend):
    """Replays a fixed list of generations; every session starts over."""

    kind = SCRIPTED

    def __init__(self, generations) -> None:
        self.generations = [
            g if isinstance(g, Generation) else Generation(g, classify_finish(g))
            for g in generations
        ]

    def session(self):
        return ScriptSession(self.generations)

    def __len__(self):
        return len(self.generations)

    def __repr__(self) -> str:
        return "ScriptedBackend(%s generations)" % len(self.generations)


def parse_script(text, path="<script>"):
    """Split a script into generations at ``--- step N ---`` lines.

    Steps must be numbered 1, 2, ... in order. A generation ending with
    ``</search>`` stops at a search, anything else at end of sequence.
    """
    marks = list(_STEP.finditer(text))
    if text[: marks[0].start() if marks else len(text)].strip():
        raise MalformedRecord(path, 1, "text before the first '--- step N ---' line")
    generations = []
    for i, m in enumerate(marks):
        if int(m.group(1)) != i + 1:
            lineno = text.count("\n", 0, m.start()) + 1
            raise MalformedRecord(path, lineno, "expected step %s, found %s" % (i + 1, m.group(1)))
        stop = marks[i + 1].start() if i + 1 < len(marks) else len(text)
        body = text[m.end():stop].strip("\n")
        generations.append(Generation(body, classify_finish(body)))
    return generations


def scripted_backend(trace_file):
    path = Path(trace_file)
    generations = parse_script(path.read_text(encoding="utf-8"), path)
    logger.info("Loaded script {} with {} generations".format(path, len(generations)))
    return ScriptedBackend(generations)


class RemoteChatSession:
    def __init__(self, backend) -> None:
        self.backend = backend

    def generate(self, prompt, transcript):
        messages = [{"role": "user", "content": prompt}]
        if transcript:
            # the model continues its own partial turn
            messages.append({"role": "assistant", "content": transcript})
        return self.backend.complete(messages)


class RemoteChatBackend(ModelBackend):
    """Chat-completions client with ``</search>`` as stop sequence."""

    kind = REMOTE_CHAT

    def __init__(self, cfg, http=None) -> None:
        if not cfg.endpoint:
            raise BackendFailure("no endpoint: set GS_MODEL_ENDPOINT or endpoint")
        self.cfg = cfg
        self.url = cfg.endpoint.rstrip("/")
        if not self.url.endswith("/chat/completions"):
            self.url += "/chat/completions"
        self.http = http if http is not None else requests.Session()
        self._slots = threading.BoundedSemaphore(cfg.max_in_flight)

    def session(self):
        return RemoteChatSession(self)

    def _headers(self):
        headers = {"Content-Type": "application/json"}
        if self.cfg.api_key:
            headers["Authorization"] = "Bearer %s" % self.cfg.api_key
        return headers

    def complete(self, messages):
        payload = {
            "model": self.cfg.model,
            "messages": messages,
            "temperature": self.cfg.temperature,
            "max_tokens": self.cfg.max_tokens,
            "stop": [STOP_SEARCH],
        }
        last = None
        for attempt in range(self.cfg.max_attempts):
            if attempt:
                delay = self.cfg.backoff * 2 ** (attempt - 1)
                logger.warning("Retrying chat request in {:1.2f} s: {}".format(delay, last))
                sleep(delay)
            try:
                with self._slots:
                    r = self.http.post(
                        self.url, json=payload, headers=self._headers(), timeout=self.cfg.timeout
                    )
            except requests.RequestException as e:
                last = e
                continue
            if r.status_code >= 500:
                last = "HTTP %s" % r.status_code
                continue
            if r.status_code >= 400:
                raise BackendFailure("request rejected: HTTP %s %s" % (r.status_code, r.text[:200]))
            return self._parse(r.json())
        raise BackendFailure(
            "no reply after %s attempts: %s" % (self.cfg.max_attempts, last)
        )

    def _parse(self, data):
        try:
            choice = data["choices"][0]
            message = choice.get("message") or {}
            text = message.get("content") or ""
            reason = choice.get("finish_reason")
        except (KeyError, IndexError, TypeError):
            raise BackendFailure("malformed reply: %r" % (data,)) from None
        if message.get("refusal") or reason == "content_filter":
            raise BackendFailure("model refused: %s" % (message.get("refusal") or reason))
        if reason == "length":
            return Generation(text, LENGTH)
        if classify_finish(text) == SEARCH:
            return Generation(text.rstrip(), SEARCH)
        # most servers strip the stop string; an open <search> means it was hit
        if choice.get("stop_reason") == STOP_SEARCH or text.rfind("<search>") > text.rfind(STOP_SEARCH):
            return Generation(text + STOP_SEARCH, SEARCH)
        return Generation(text, EOS)

    def __repr__(self) -> str:
        return "RemoteChatBackend(%s, model=%s)" % (self.url, self.cfg.model)


class MajorityVoteSession:
    def __init__(self, backend) -> None:
        self.backend = backend

    def generate(self, prompt, transcript):
        b = self.backend
        n_searches = transcript.count(STOP_SEARCH)
        if n_searches < b.searches:
            if b.traversal == "F":
                block = 'mode=local, hop=1, query="%s"' % b.query_text
            else:
                block = b.query_text
            return Generation("<think>Look at the neighbors.</think>\n<search> %s </search>" % block, SEARCH)
        votes = Counter()
        for span in extract_spans(transcript):
            if span.phase is not Phase.INFORMATION or span.partial:
                continue
            for entry in _ENTRY.findall(span.text):
                label = b.labels.get(entry.strip())
                if label is not None:
                    votes[label] += 1
        if votes:
            best = max(votes.values())
            answer = min(label for label, n in votes.items() if n == best)
        else:
            answer = b.default
        return Generation("<think>Most neighbors share one category.</think>\n<answer>%s</answer>" % answer, EOS)


class MajorityVoteBackend(ModelBackend):
    """Rule-based stand-in for a model: searches a fixed number of times,
    then answers with the most frequent label among the returned nodes."""

    kind = MAJORITY

    def __init__(self, g, traversal="R", query_text="related work on the same topic", searches=1, budget=600):
        from ..retriever.ranker import truncate_text

        self.traversal = traversal
        self.query_text = query_text
        self.searches = searches
        self.labels = {}
        for v in range(g.n_nodes):
            label = g.node(v).label
            if label is not None:
                self.labels.setdefault(truncate_text(g.text(v), budget).strip(), label)
        classes = g.class_list
        self.default = classes[0] if classes else "unknown"

    def session(self):
        return MajorityVoteSession(self)

    def __repr__(self) -> str:
        return "MajorityVoteBackend(traversal=%s, searches=%s)" % (self.traversal, self.searches)


def make_backend(cfg, script=None, graph=None, traversal="R", budget=600):
    """Backend named by ``cfg.kind``."""
    if cfg.kind == SCRIPTED:
        if script is None:
            raise BackendFailure("scripted backend needs a script file")
        return scripted_backend(script)
    if cfg.kind == MAJORITY:
        return MajorityVoteBackend(graph, traversal=traversal, budget=budget)
    return RemoteChatBackend(cfg)
