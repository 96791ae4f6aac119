import functools

import numpy as np
import pytest

from aspectkit.corpus import Corpus, Sentence, Token, Upos
from aspectkit.embeddings import VectorStore


def sent(text, tags=None, labels=()):
    """Build a Sentence from space-separated forms and optional tags."""
    forms = text.split()
    tag_list = tags.split() if tags else ["OTHER"] * len(forms)
    assert len(tag_list) == len(forms)
    return Sentence(
        tuple(Token(f, Upos(t)) for f, t in zip(forms, tag_list)),
        tuple(labels),
    )


def corpus_of(*sentences):
    return Corpus(tuple(sentences), source_id="<test>")


def random_store(words, dim, rng):
    return VectorStore(words, rng.normal(size=(len(words), dim)).astype(np.float32))


def two_topic_corpus(n_sentences, rng, words_per_topic=5, min_len=5, max_len=10):
    """Sentences drawing words from one of two disjoint vocabularies."""
    topics = (
        [f"a{i}" for i in range(words_per_topic)],
        [f"b{i}" for i in range(words_per_topic)],
    )
    sentences = []
    for _ in range(n_sentences):
        topic = topics[int(rng.integers(2))]
        words = rng.choice(topic, size=int(rng.integers(min_len, max_len)))
        sentences.append(Sentence(tuple(Token(w) for w in words)))
    return Corpus(tuple(sentences), source_id="two-topic"), topics


def mean_pairwise_cosine(words_a, words_b, store):
    values = []
    for a in words_a:
        for b in words_b:
            if a == b:
                continue
            va, vb = store.lookup(a), store.lookup(b)
            values.append(
                float(np.dot(va, vb) / (np.linalg.norm(va) * np.linalg.norm(vb)))
            )
    return float(np.mean(values))


def topic_margin(topics, store):
    """Mean intra-topic cosine minus mean cross-topic cosine."""
    intra = 0.5 * (
        mean_pairwise_cosine(topics[0], topics[0], store)
        + mean_pairwise_cosine(topics[1], topics[1], store)
    )
    cross = mean_pairwise_cosine(topics[0], topics[1], store)
    return intra - cross


# Acceptance criteria register their outcome here; a terminal-summary hook
# prints one line per criterion at the end of the run.
ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def criterion(number, name):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            tag = f"criterion {number}: {name}"
            try:
                result = fn(*args, **kwargs)
            except pytest.skip.Exception:
                ACCEPTANCE_RESULTS.append((tag, "SKIP"))
                raise
            except BaseException:
                ACCEPTANCE_RESULTS.append((tag, "FAIL"))
                raise
            ACCEPTANCE_RESULTS.append((tag, "PASS"))
            return result

        return wrapper

    return decorate


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for tag, status in sorted(set(ACCEPTANCE_RESULTS)):
        terminalreporter.write_line(f"{status:4s} {tag}")
