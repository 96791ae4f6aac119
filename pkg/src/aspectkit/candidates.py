"""Aspect-candidate extraction.

The aspect query matrix is built from corpus statistics: frequent nouns
(the main method), frequent tokens regardless of POS (ablation), or nouns
co-occurring with sentiment-bearing seed adjectives (ablation). Candidates
without an embedding are dropped before ranking so the stacked vector matrix
stays dense.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .corpus import Corpus, Upos
from .embeddings import VectorStore
from .errors import NoCandidatesError, ParseError

log = logging.getLogger(__name__)

DEFAULT_SEED_ADJECTIVES = frozenset(
    {"good", "bad", "great", "terrible", "excellent", "awful", "nice", "poor"}
)
DEFAULT_ADJ_WINDOW = 3


@dataclass(frozen=True)
class CandidateSet:
    """Ranked aspect terms with their stacked embedding rows.

    Terms are ordered by descending score; ties break lexicographically.
    ``vectors[i]`` is exactly the store row for ``terms[i]``.
    """

    terms: tuple[str, ...]
    vectors: np.ndarray
    scores: tuple[int, ...]

    def __len__(self):
        return len(self.terms)

    def head(self, n: int) -> "CandidateSet":
        """The top-n prefix (or the whole set if fewer terms qualify)."""
        if n >= len(self.terms):
            return self
        return CandidateSet(self.terms[:n], self.vectors[:n], self.scores[:n])

    def save(self, sink: TextIO) -> None:
        for term, score in zip(self.terms, self.scores):
            sink.write(f"{term}\t{score}\n")


def read_candidates(stream: Iterable[str], store: VectorStore) -> CandidateSet:
    """Load a "term<TAB>score" file and re-resolve vectors against ``store``."""
    terms: list[str] = []
    scores: list[int] = []
    rows: list[np.ndarray] = []
    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n")
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError("expected 'term<TAB>score'", line_no=line_no)
        term, score = parts
        vec = store.lookup(term)
        if vec is None:
            raise NoCandidatesError(f"candidate {term!r} is not in the vector store")
        terms.append(term)
        scores.append(int(score))
        rows.append(vec)
    if not terms:
        raise NoCandidatesError("candidate file is empty")
    return CandidateSet(tuple(terms), np.stack(rows), tuple(scores))


def _ranked(counts: Counter, store: VectorStore, n: int, what: str) -> CandidateSet:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    in_vocab = {term: c for term, c in counts.items() if store.lookup(term) is not None}
    dropped = len(counts) - len(in_vocab)
    if dropped:
        log.info("dropped %d out-of-vocabulary %s before ranking", dropped, what)
    if not in_vocab:
        raise NoCandidatesError(f"no in-vocabulary {what} found")
    ordered = sorted(in_vocab.items(), key=lambda kv: (-kv[1], kv[0]))[:n]
    terms = tuple(term for term, _ in ordered)
    scores = tuple(score for _, score in ordered)
    vectors = np.stack([store.lookup(term) for term in terms])
    return CandidateSet(terms, vectors, scores)


def top_n_nouns(corpus: Corpus, store: VectorStore, n: int) -> CandidateSet:
    """The n most frequent in-vocabulary nouns, by token occurrence count."""
    counts = Counter(
        tok.norm for sent in corpus for tok in sent.tokens if tok.upos is Upos.NOUN
    )
    return _ranked(counts, store, n, "nouns")


def top_n_tokens(corpus: Corpus, store: VectorStore, n: int) -> CandidateSet:
    """The n most frequent in-vocabulary tokens regardless of POS tag."""
    counts = Counter(tok.norm for sent in corpus for tok in sent.tokens)
    return _ranked(counts, store, n, "tokens")


def adj_noun_candidates(
    corpus: Corpus,
    store: VectorStore,
    n: int,
    seed_adjectives: Iterable[str] = DEFAULT_SEED_ADJECTIVES,
    window: int = DEFAULT_ADJ_WINDOW,
) -> CandidateSet:
    """Nouns ranked by co-occurrence with seed adjectives.

    A noun occurrence is credited once when any seed adjective appears within
    ``window`` tokens before it in the same sentence. This is a windowed
    approximation of adjectival modification; no parser is involved.
    """
    seeds = {w.casefold() for w in seed_adjectives}
    if not seeds:
        raise ValueError("seed_adjectives must be non-empty")
    if window < 0:
        raise ValueError(f"window must be >= 0, got {window}")
    counts: Counter = Counter()
    for sentence in corpus:
        toks = sentence.tokens
        for i, tok in enumerate(toks):
            if tok.upos is not Upos.NOUN:
                continue
            lo = max(0, i - window)
            if any(toks[j].norm in seeds for j in range(lo, i)):
                counts[tok.norm] += 1
    return _ranked(counts, store, n, "adjective-modified nouns")
