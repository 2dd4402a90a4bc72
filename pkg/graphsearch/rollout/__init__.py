from .tokens import count_tokens, phase_token_counts, phase_shares
from .backend import (
    Generation,
    BackendConfig,
    ModelBackend,
    ScriptedBackend,
    RemoteChatBackend,
    MajorityVoteBackend,
    scripted_backend,
    parse_script,
    make_backend,
)
from .engine import (
    RolloutConfig,
    RolloutTrace,
    SearchRecord,
    run_inference,
    EMPTY_QUERY_MESSAGE,
    FINAL_INSTRUCTION,
)

__all__ = [
    "count_tokens",
    "phase_token_counts",
    "phase_shares",
    "Generation",
    "BackendConfig",
    "ModelBackend",
    "ScriptedBackend",
    "RemoteChatBackend",
    "MajorityVoteBackend",
    "scripted_backend",
    "parse_script",
    "make_backend",
    "RolloutConfig",
    "RolloutTrace",
    "SearchRecord",
    "run_inference",
    "EMPTY_QUERY_MESSAGE",
    "FINAL_INSTRUCTION",
]
