"""
Newline-delimited JSON log of retrieval calls, one record per search.
"""
from pathlib import Path
import threading
import json
import logging

logger = logging.getLogger(__name__)


class RetrievalLog:
    def __init__(self, path=None) -> None:
        """Records are kept in memory and, when ``path`` is given, appended
        to that file as they arrive. Safe to share between rollouts."""
        self.path = Path(path) if path is not None else None
        self.records = []
        self._lock = threading.Lock()
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)

    def record(self, g, cands, q, hop, cfg, result):
        rec = {
            "anchor": g.external_id(cands.anchor),
            "scope": "+".join(cands.scope_used),
            "hop": hop,
            "alpha": cfg.alpha,
            "k": cfg.k,
            "candidates": result.candidate_count,
            "scored": result.scored_count,
            "elapsed_us": round(result.elapsed_us, 3),
            "fallback": cands.fallback_used,
            "returned": [[g.external_id(v), score] for v, score in result.entries],
        }
        line = json.dumps(rec)
        with self._lock:
            self.records.append(rec)
            if self.path is not None:
                with open(self.path, "a", encoding="utf-8") as f:
                    f.write(line + "\n")
        return rec

    def __len__(self):
        return len(self.records)

    def __repr__(self) -> str:
        return "RetrievalLog(path=%s, records=%s)" % (self.path, len(self.records))


def read_retrieval_log(path):
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]
