"""Character, word and meta BiLSTM morphosyntactic tagger."""

from ._core import (
    AlignmentError,
    CheckpointError,
    ParseError,
    config_keys,
    default_config,
    evaluate,
    run_cli,
    synthesize,
    tag,
    train,
)

__all__ = [
    "AlignmentError",
    "CheckpointError",
    "ParseError",
    "config_keys",
    "default_config",
    "evaluate",
    "run_cli",
    "synthesize",
    "tag",
    "train",
]
