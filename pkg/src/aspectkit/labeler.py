"""Sentence labeling: attention summary -> nearest label embedding.

A sentence is labeled with the aspect whose label vector has the highest
cosine similarity to the attention-weighted summary of the sentence's token
embeddings. Label vectors are means of the embeddings of a few query words
per label, so no manual cluster naming is involved.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .attention import (
    AttentionConfig,
    AttentionResult,
    contrastive_attention,
    softmax_attention,
)
from .candidates import CandidateSet
from .corpus import Corpus, Sentence
from .embeddings import VectorStore
from .errors import OOVError

log = logging.getLogger(__name__)

METHODS = ("cat", "attention", "mean")


@dataclass(frozen=True)
class LabelDefinition:
    """An aspect label and the words whose mean embedding defines it."""

    name: str
    query_terms: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise ValueError("label name must be non-empty")
        terms = tuple(self.query_terms) or (self.name,)
        object.__setattr__(self, "query_terms", terms)


# "staff" and "service" name the same aspect in the restaurant datasets, and
# "ambiance" is a common alternate spelling; including both maximizes the
# chance that a label resolves in whatever corpus the vectors came from.
DEFAULT_LABELS = (
    LabelDefinition("food"),
    LabelDefinition("staff", ("staff", "service")),
    LabelDefinition("ambience", ("ambience", "ambiance")),
)


@dataclass(frozen=True)
class LabelMatrix:
    """Label names in fixed order with their stacked definition vectors."""

    labels: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != len(self.labels):
            raise ValueError(f"need one matrix row per label, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("label matrix contains NaN or Inf")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class LabeledResult:
    """Outcome for one sentence; ``label`` is None when the labeler abstains."""

    label: str | None
    similarities: dict[str, float] | None
    attention: AttentionResult | None

    @property
    def abstained(self) -> bool:
        return self.label is None


def build_label_vectors(
    store: VectorStore, definitions: Sequence[LabelDefinition]
) -> LabelMatrix:
    """Resolve each definition's query terms to a mean vector.

    Unresolvable terms are skipped (and logged by the store); a definition
    with no resolvable term at all raises an OOVError naming the label.
    """
    if not definitions:
        raise ValueError("need at least one label definition")
    rows = []
    for definition in definitions:
        try:
            rows.append(store.mean_vector(definition.query_terms))
        except OOVError as exc:
            raise OOVError(
                f"label {definition.name!r}: none of its query terms have vectors ({exc})"
            ) from None
    return LabelMatrix(tuple(d.name for d in definitions), np.stack(rows))


def assign_label(summary, labels: LabelMatrix) -> tuple[str | None, np.ndarray | None]:
    """Argmax cosine similarity between the summary and each label vector.

    Ties resolve to the earliest label in the matrix order. A zero-norm
    summary yields (None, None): the abstain signal.
    """
    summary = np.asarray(summary, dtype=np.float64)
    if summary.ndim != 1 or summary.shape[0] != labels.matrix.shape[1]:
        raise ValueError(
            f"summary shape {summary.shape} does not match label dimension "
            f"{labels.matrix.shape[1]}"
        )
    norm = float(np.linalg.norm(summary))
    if norm == 0.0:
        return None, None
    label_norms = np.linalg.norm(labels.matrix, axis=1)
    denominators = np.where(label_norms > 0.0, label_norms * norm, 1.0)
    sims = np.where(label_norms > 0.0, (labels.matrix @ summary) / denominators, 0.0)
    return labels.labels[int(np.argmax(sims))], sims


def _label_from_rows(
    rows: np.ndarray,
    kept_positions: Sequence[int],
    n_tokens: int,
    aspect_vectors: np.ndarray,
    labels: LabelMatrix,
    method: str,
    gamma: float,
) -> LabeledResult:
    """Shared scoring core over a precomputed token-embedding matrix."""
    n = rows.shape[0]
    if method == "cat":
        weights = contrastive_attention(rows, aspect_vectors, gamma)
    elif method == "attention":
        weights = softmax_attention(rows, aspect_vectors.mean(axis=0))
    elif method == "mean":
        weights = np.full(n, 1.0 / n)
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    summary = weights @ rows
    label, sims = assign_label(summary, labels)
    full_weights = np.zeros(n_tokens)
    full_weights[list(kept_positions)] = weights
    skipped = tuple(i for i in range(n_tokens) if i not in set(kept_positions))
    attention = AttentionResult(full_weights, summary, skipped)
    similarities = dict(zip(labels.labels, sims.tolist())) if sims is not None else None
    return LabeledResult(label, similarities, attention)


def sentence_rows(
    sentence: Sentence, store: VectorStore
) -> tuple[np.ndarray | None, tuple[int, ...]]:
    """Stack embeddings for the in-vocabulary tokens of a sentence.

    Returns (matrix, kept_positions); matrix is None when every token is
    out of vocabulary.
    """
    rows = []
    kept = []
    for i, token in enumerate(sentence.tokens):
        vec = store.lookup(token.norm)
        if vec is not None:
            rows.append(vec)
            kept.append(i)
    if not rows:
        return None, ()
    return np.stack(rows).astype(np.float64), tuple(kept)


def label_sentence(
    sentence: Sentence,
    store: VectorStore,
    candidates: CandidateSet,
    labels: LabelMatrix,
    method: str = "cat",
    config: AttentionConfig = AttentionConfig(),
) -> LabeledResult:
    """Run the per-sentence pipeline: embed, attend, summarize, assign.

    ``method`` selects the weighting: "cat" (contrastive attention),
    "attention" (softmax against the mean candidate query), or "mean"
    (uniform). Sentences with no in-vocabulary token abstain.
    """
    rows, kept = sentence_rows(sentence, store)
    if rows is None:
        return LabeledResult(None, None, None)
    return _label_from_rows(
        rows,
        kept,
        len(sentence.tokens),
        candidates.vectors.astype(np.float64),
        labels,
        method,
        config.gamma,
    )


def label_corpus(
    corpus: Corpus,
    store: VectorStore,
    candidates: CandidateSet,
    labels: LabelMatrix,
    method: str = "cat",
    config: AttentionConfig = AttentionConfig(),
) -> list[LabeledResult]:
    aspect_vectors = candidates.vectors.astype(np.float64)
    results = []
    for sentence in corpus:
        rows, kept = sentence_rows(sentence, store)
        if rows is None:
            results.append(LabeledResult(None, None, None))
        else:
            results.append(
                _label_from_rows(
                    rows, kept, len(sentence.tokens), aspect_vectors,
                    labels, method, config.gamma,
                )
            )
    return results
