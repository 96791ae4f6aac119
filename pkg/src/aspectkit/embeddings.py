"""Word-vector storage and the word2vec text format.

Vectors are kept raw (not length-normalized): the RBF attention kernel works
on squared euclidean distances of the embeddings as trained, and dot-product
attention deliberately keeps its norm sensitivity. Cosine scoring normalizes
internally where needed.
"""

from __future__ import annotations

import logging
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import OOVError, VectorFormatError

log = logging.getLogger(__name__)


class VectorStore:
    """An immutable vocabulary-indexed embedding matrix.

    Lookups try the exact form first and fall back to the case-folded form,
    so a store loaded from a lowercased training corpus resolves "Food" to
    the row for "food".
    """

    def __init__(self, words: Sequence[str], matrix: np.ndarray):
        words = tuple(words)
        matrix = np.ascontiguousarray(matrix, dtype=np.float32)
        if matrix.ndim != 2:
            raise VectorFormatError(f"matrix must be 2-D, got shape {matrix.shape}")
        if matrix.shape[0] != len(words):
            raise VectorFormatError(
                f"{len(words)} words but {matrix.shape[0]} matrix rows"
            )
        if matrix.shape[1] < 1:
            raise VectorFormatError("vector dimension must be at least 1")
        if not np.all(np.isfinite(matrix)):
            raise VectorFormatError("matrix contains NaN or Inf values")
        vocab = {w: i for i, w in enumerate(words)}
        if len(vocab) != len(words):
            raise VectorFormatError("duplicate words in vocabulary")
        self.words = words
        self.vocab = vocab
        self.matrix = matrix
        self.matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self):
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.vocab or word.casefold() in self.vocab

    def lookup(self, word: str) -> np.ndarray | None:
        """Return the stored row for ``word`` (or its case-folded form), else None."""
        idx = self.vocab.get(word)
        if idx is None:
            idx = self.vocab.get(word.casefold())
        if idx is None:
            return None
        return self.matrix[idx]

    def mean_vector(self, words: Iterable[str]) -> np.ndarray:
        """Arithmetic mean (float64) of the rows that resolve.

        Unresolved words are skipped and logged; if nothing resolves an
        OOVError listing the misses is raised.
        """
        rows = []
        misses = []
        for word in words:
            vec = self.lookup(word)
            if vec is None:
                misses.append(word)
            else:
                rows.append(vec)
        if not rows:
            raise OOVError(f"no vectors found for any of: {', '.join(misses)}")
        if misses:
            log.info("mean_vector: skipped %d out-of-vocabulary words: %s",
                     len(misses), ", ".join(misses))
        return np.mean(np.stack(rows).astype(np.float64), axis=0)


def load_word2vec_text(stream: Iterable[str]) -> VectorStore:
    """Load vectors in the word2vec text format: header "V d", then V rows
    "word v1 ... vd" (space-separated, ``.`` decimal separator)."""
    lines = iter(stream)
    try:
        header = next(lines)
    except StopIteration:
        raise VectorFormatError("empty stream: missing 'V d' header") from None
    parts = header.split()
    if len(parts) != 2:
        raise VectorFormatError(f"bad header {header.strip()!r}: expected 'V d'")
    try:
        count, dim = int(parts[0]), int(parts[1])
    except ValueError:
        raise VectorFormatError(f"bad header {header.strip()!r}: expected 'V d'") from None
    if count < 0 or dim < 1:
        raise VectorFormatError(f"bad header values V={count} d={dim}")

    words: list[str] = []
    seen: set[str] = set()
    data = np.empty((count, dim), dtype=np.float32)
    row = 0
    for raw in lines:
        if not raw.strip():
            continue
        if row >= count:
            raise VectorFormatError(f"header promised {count} rows but more follow")
        parts = raw.split()
        word, values = parts[0], parts[1:]
        if len(values) != dim:
            raise VectorFormatError(
                f"row for {word!r} has {len(values)} values, expected {dim}"
            )
        if word in seen:
            raise VectorFormatError(f"duplicate word {word!r}")
        try:
            vec = np.array([float(v) for v in values], dtype=np.float32)
        except ValueError as exc:
            raise VectorFormatError(f"row for {word!r}: {exc}") from None
        if not np.all(np.isfinite(vec)):
            raise VectorFormatError(f"row for {word!r} contains NaN or Inf")
        data[row] = vec
        seen.add(word)
        words.append(word)
        row += 1
    if row != count:
        raise VectorFormatError(f"header promised {count} rows but found {row}")
    return VectorStore(words, data)


def save_word2vec_text(store: VectorStore, sink: TextIO) -> None:
    """Write the text format consumed by :func:`load_word2vec_text`.

    Values are printed with 9 significant digits, enough to round-trip
    float32 exactly.
    """
    sink.write(f"{len(store)} {store.dim}\n")
    for word, vec in zip(store.words, store.matrix):
        sink.write(word)
        for v in vec:
            sink.write(f" {float(v):.9g}")
        sink.write("\n")
