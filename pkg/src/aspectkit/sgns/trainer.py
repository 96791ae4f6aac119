"""Skip-gram negative-sampling trainer for in-domain word vectors.

The hot inner loop lives in a backend module: a Cython extension when the
package was built with a C compiler, otherwise a vectorized numpy fallback.
Both backends consume the same integer RNG schedule (a 64-bit linear
congruential generator drives subsampling, window sizing and negative
sampling), so they train on the exact same pair sequence; with a single
worker and a fixed seed each backend reproduces its output bit for bit.

Training follows the classic recipe: for every (center, context) pair inside
a per-center window of radius sampled uniformly from [1, window], push the
context word's input vector toward the center word's output vector and away
from ``negatives`` words drawn from the unigram^0.75 distribution. The input
matrix is returned as the VectorStore.
"""

from __future__ import annotations

import logging
import threading
from collections import Counter
from dataclasses import dataclass

import numpy as np

from ..corpus import Corpus
from ..embeddings import VectorStore
from ..errors import EmptyDatasetError
from .backends import resolve_backend

log = logging.getLogger(__name__)

# word2vec's LCG; both backends replicate it exactly.
LCG_MULT = 25214903917
LCG_INC = 11
LCG_MASK = (1 << 64) - 1

NEGATIVE_TABLE_DOMAIN = 2**31 - 1
NEGATIVE_POWER = 0.75


@dataclass(frozen=True)
class TrainerConfig:
    dim: int = 200
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    initial_lr: float = 0.025
    min_count: int = 5
    subsample_threshold: float = 1e-3
    seed: int = 1
    workers: int = 1

    def __post_init__(self):
        for name in ("dim", "window", "negatives", "epochs", "min_count", "workers"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if not self.initial_lr > 0:
            raise ValueError(f"initial_lr must be > 0, got {self.initial_lr}")
        if self.subsample_threshold < 0:
            raise ValueError(
                f"subsample_threshold must be >= 0, got {self.subsample_threshold}"
            )
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {self.seed!r}")


@dataclass
class Vocab:
    """Frequency-sorted training vocabulary with sampling tables.

    ``keep_prob[i]`` is the subsampling keep probability of word i (values
    above 1 mean the word is never dropped); ``cum_table`` is the cumulative
    unigram^0.75 table used for negative sampling.
    """

    words: tuple[str, ...]
    counts: np.ndarray
    index: dict[str, int]
    total_tokens: int
    keep_prob: np.ndarray
    cum_table: np.ndarray

    def __len__(self):
        return len(self.words)


def build_vocab(corpus: Corpus, config: TrainerConfig) -> Vocab:
    """Count norms, drop words rarer than min_count, derive sampling tables."""
    counts: Counter = Counter()
    for sentence in corpus:
        for token in sentence.tokens:
            counts[token.norm] += 1
    if not counts:
        raise EmptyDatasetError("corpus has no tokens")
    retained = [(w, c) for w, c in counts.items() if c >= config.min_count]
    if not retained:
        raise EmptyDatasetError(
            f"no word occurs at least min_count={config.min_count} times"
        )
    retained.sort(key=lambda wc: (-wc[1], wc[0]))
    words = tuple(w for w, _ in retained)
    count_arr = np.array([c for _, c in retained], dtype=np.int64)
    total = int(count_arr.sum())

    if config.subsample_threshold > 0:
        threshold_count = config.subsample_threshold * total
        keep_prob = (np.sqrt(count_arr / threshold_count) + 1.0) * (
            threshold_count / count_arr
        )
    else:
        keep_prob = np.ones(len(words), dtype=np.float64)

    mass = count_arr.astype(np.float64) ** NEGATIVE_POWER
    cum = np.cumsum(mass)
    cum_table = np.round(cum / cum[-1] * NEGATIVE_TABLE_DOMAIN).astype(np.uint32)
    cum_table[-1] = NEGATIVE_TABLE_DOMAIN

    return Vocab(
        words=words,
        counts=count_arr,
        index={w: i for i, w in enumerate(words)},
        total_tokens=total,
        keep_prob=keep_prob,
        cum_table=cum_table,
    )


def encode_corpus(corpus: Corpus, vocab: Vocab) -> tuple[np.ndarray, np.ndarray]:
    """Flatten the corpus into retained-word indices plus sentence offsets."""
    index = vocab.index
    lengths = [0]
    flat: list[int] = []
    for sentence in corpus:
        ids = [index[t.norm] for t in sentence.tokens if t.norm in index]
        if ids:
            flat.extend(ids)
            lengths.append(len(ids))
    data = np.array(flat, dtype=np.int32)
    offsets = np.cumsum(lengths, dtype=np.int64)
    return data, offsets


class _Shard:
    """One worker's contiguous slice of the corpus plus its RNG stream."""

    __slots__ = ("data", "offsets", "state", "processed", "total_planned", "result")

    def __init__(self, data, offsets, state, total_planned):
        self.data = data
        self.offsets = offsets
        self.state = state
        self.processed = 0
        self.total_planned = total_planned
        self.result = (0.0, 0)


class SkipGramTrainer:
    """Trains embeddings; after fit() exposes vocab_ and epoch_objectives_."""

    def __init__(self, config: TrainerConfig, backend: str | None = None):
        self.config = config
        self.backend_name, self._backend = resolve_backend(backend)

    def fit(self, corpus: Corpus) -> VectorStore:
        config = self.config
        vocab = build_vocab(corpus, config)
        data, offsets = encode_corpus(corpus, vocab)

        rng = np.random.default_rng(config.seed)
        syn0 = (rng.random((len(vocab), config.dim), dtype=np.float32) - 0.5) / config.dim
        syn1 = np.zeros_like(syn0)

        shards = self._make_shards(data, offsets, config)
        min_alpha = config.initial_lr * 1e-4
        subsample_enabled = 1 if config.subsample_threshold > 0 else 0

        epoch_objectives = []
        for epoch in range(config.epochs):
            if len(shards) == 1:
                self._run_shard(shards[0], syn0, syn1, vocab, min_alpha, subsample_enabled)
            else:
                threads = [
                    threading.Thread(
                        target=self._run_shard,
                        args=(shard, syn0, syn1, vocab, min_alpha, subsample_enabled),
                    )
                    for shard in shards
                ]
                for t in threads:
                    t.start()
                for t in threads:
                    t.join()
            obj_sum = sum(s.result[0] for s in shards)
            obj_terms = sum(s.result[1] for s in shards)
            avg = obj_sum / obj_terms if obj_terms else float("nan")
            epoch_objectives.append(avg)
            log.info("epoch %d/%d: mean objective %.6f", epoch + 1, config.epochs, avg)

        self.vocab_ = vocab
        self.epoch_objectives_ = tuple(epoch_objectives)
        return VectorStore(vocab.words, syn0)

    def _make_shards(self, data, offsets, config) -> list[_Shard]:
        n_sent = len(offsets) - 1
        bounds = [round(w * n_sent / config.workers) for w in range(config.workers + 1)]
        shards = []
        for w in range(config.workers):
            s0, s1 = bounds[w], bounds[w + 1]
            if s0 == s1:
                continue
            shard_offsets = (offsets[s0 : s1 + 1] - offsets[s0]).astype(np.int64)
            shard_data = np.ascontiguousarray(data[offsets[s0] : offsets[s1]])
            shards.append(
                _Shard(
                    data=shard_data,
                    offsets=np.ascontiguousarray(shard_offsets),
                    state=(config.seed + w) & LCG_MASK,
                    total_planned=config.epochs * int(shard_offsets[-1]),
                )
            )
        return shards

    def _run_shard(self, shard, syn0, syn1, vocab, min_alpha, subsample_enabled):
        state, processed, obj_sum, obj_terms = self._backend.train_chunk(
            syn0,
            syn1,
            shard.data,
            shard.offsets,
            vocab.keep_prob,
            vocab.cum_table,
            self.config.window,
            self.config.negatives,
            self.config.initial_lr,
            min_alpha,
            subsample_enabled,
            shard.state,
            shard.processed,
            shard.total_planned,
        )
        shard.state = state
        shard.processed = processed
        shard.result = (obj_sum, obj_terms)


def train(corpus: Corpus, config: TrainerConfig, backend: str | None = None) -> VectorStore:
    """Train and return the input-side vectors as a VectorStore."""
    return SkipGramTrainer(config, backend).fit(corpus)
