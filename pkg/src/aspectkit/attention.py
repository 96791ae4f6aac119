"""Attention mechanisms over token embeddings.

Contrastive attention folds a whole set of aspect query vectors into one
distribution: each token's raw score is the sum of its RBF-kernel responses
to every aspect vector, normalized over the sentence,

    weight_i = sum_a exp(-gamma * ||t_i - a||^2) / sum_j sum_a exp(-gamma * ||t_j - a||^2)

Dot-product attention (softmax over token-query inner products) and the
uniform mean baseline are provided for comparison. All arithmetic is done in
double precision; kernel responses are computed directly, as exponents at
realistic embedding scales do not underflow meaningfully.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np


@dataclass(frozen=True)
class AttentionConfig:
    """Sharpness of the RBF kernel. gamma == 0 degenerates to uniform weights."""

    gamma: float = 0.03

    def __post_init__(self):
        if not (self.gamma >= 0):
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")


@dataclass(frozen=True)
class AttentionResult:
    """Per-position weights plus the weighted summary vector.

    ``weights`` covers every sentence position; positions listed in
    ``skipped_positions`` had no embedding and hold weight 0. The remaining
    weights sum to 1.
    """

    weights: np.ndarray
    summary: np.ndarray
    skipped_positions: tuple[int, ...] = ()


def _as_matrix(x, name: str) -> np.ndarray:
    m = np.asarray(x, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got shape {m.shape}")
    return m


def rbf(x, y, gamma: float) -> float:
    """exp(-gamma * squared euclidean distance); a similarity in (0, 1]."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    diff = x - y
    return math.exp(-gamma * float(np.dot(diff, diff)))


def _squared_distances(tokens: np.ndarray, aspects: np.ndarray) -> np.ndarray:
    sq_t = np.sum(tokens * tokens, axis=1)[:, None]
    sq_a = np.sum(aspects * aspects, axis=1)[None, :]
    d2 = sq_t + sq_a - 2.0 * (tokens @ aspects.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def contrastive_attention(tokens, aspects, gamma: float) -> np.ndarray:
    """Single distribution over token positions from a set of aspect queries.

    ``tokens`` is an (n, d) matrix of token embeddings, ``aspects`` an (m, d)
    matrix of aspect embeddings. Returns nonnegative weights summing to 1.
    """
    tokens = _as_matrix(tokens, "tokens")
    aspects = _as_matrix(aspects, "aspects")
    if tokens.shape[0] < 1:
        raise ValueError("tokens matrix must have at least one row")
    if aspects.shape[0] < 1:
        raise ValueError("aspects matrix must have at least one row")
    if tokens.shape[1] != aspects.shape[1]:
        raise ValueError(
            f"dimension mismatch: tokens d={tokens.shape[1]}, aspects d={aspects.shape[1]}"
        )
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    responses = np.exp(-gamma * _squared_distances(tokens, aspects))
    scores = responses.sum(axis=1)
    total = scores.sum()
    if not (total > 0.0) or not np.isfinite(total):
        raise ValueError("attention responses underflowed; gamma is too large for this data")
    return scores / total


def softmax_attention(tokens, query) -> np.ndarray:
    """Softmax over token-query inner products, with max-subtraction.

    Unlike the bounded kernel scores, inner products grow with a token's
    vector norm, so this mechanism systematically favors high-norm tokens.
    """
    tokens = _as_matrix(tokens, "tokens")
    query = np.asarray(query, dtype=np.float64)
    if tokens.shape[0] < 1:
        raise ValueError("tokens matrix must have at least one row")
    if query.ndim != 1 or query.shape[0] != tokens.shape[1]:
        raise ValueError(
            f"query shape {query.shape} does not match token dimension {tokens.shape[1]}"
        )
    logits = tokens @ query
    logits -= logits.max()
    exps = np.exp(logits)
    return exps / exps.sum()


def summarize(tokens, weights) -> np.ndarray:
    """Weighted sum of token embeddings: the sentence summary vector."""
    tokens = _as_matrix(tokens, "tokens")
    weights = np.asarray(weights, dtype=np.float64)
    if weights.ndim != 1 or weights.shape[0] != tokens.shape[0]:
        raise ValueError(
            f"weights length {weights.shape} does not match {tokens.shape[0]} token rows"
        )
    return weights @ tokens


def mean_summary(tokens) -> np.ndarray:
    """Arithmetic mean of token embeddings; the no-attention baseline."""
    tokens = _as_matrix(tokens, "tokens")
    if tokens.shape[0] < 1:
        raise ValueError("tokens matrix must have at least one row")
    return tokens.mean(axis=0)


def weight_lines(forms: Sequence[str], weights: Sequence[float]) -> Iterator[str]:
    """Render per-token weights as "token<TAB>weight" lines for inspection."""
    if len(forms) != len(weights):
        raise ValueError(f"{len(forms)} tokens but {len(weights)} weights")
    for form, weight in zip(forms, weights):
        yield f"{form}\t{float(weight):.4f}"
