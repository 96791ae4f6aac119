from .backends import HAVE_COMPILED, resolve_backend
from .trainer import (
    SkipGramTrainer,
    TrainerConfig,
    Vocab,
    build_vocab,
    encode_corpus,
    train,
)

__all__ = [
    "HAVE_COMPILED",
    "SkipGramTrainer",
    "TrainerConfig",
    "Vocab",
    "build_vocab",
    "encode_corpus",
    "resolve_backend",
    "train",
]
