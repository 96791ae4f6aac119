"""Corpus ingestion and evaluation-set filtering.

Two input formats are supported: a CoNLL-U subset (tab-separated; columns
ID, FORM and UPOS are consumed; ``# label = <aspect>`` comments attach gold
labels to the following sentence) and plain whitespace-tokenized text, one
sentence per line. Parsed corpora are immutable and safe to share.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO

from .errors import EmptyDatasetError, ParseError

log = logging.getLogger(__name__)


class Upos(str, enum.Enum):
    """Universal POS tags; anything unrecognized degrades to OTHER."""

    ADJ = "ADJ"
    ADP = "ADP"
    ADV = "ADV"
    AUX = "AUX"
    CCONJ = "CCONJ"
    DET = "DET"
    INTJ = "INTJ"
    NOUN = "NOUN"
    NUM = "NUM"
    PART = "PART"
    PRON = "PRON"
    PROPN = "PROPN"
    PUNCT = "PUNCT"
    SCONJ = "SCONJ"
    SYM = "SYM"
    VERB = "VERB"
    X = "X"
    OTHER = "OTHER"

    @classmethod
    def _missing_(cls, value):
        return cls.OTHER


@dataclass(frozen=True, slots=True)
class Token:
    """A surface token with its case-folded form and POS tag."""

    form: str
    upos: Upos = Upos.OTHER
    norm: str = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "norm", self.form.casefold())


@dataclass(frozen=True, slots=True)
class Sentence:
    tokens: tuple[Token, ...]
    gold_labels: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "gold_labels", tuple(self.gold_labels))

    @property
    def gold_label(self) -> str | None:
        """The gold aspect label, when the sentence carries exactly one."""
        return self.gold_labels[0] if len(self.gold_labels) == 1 else None

    def text(self) -> str:
        return " ".join(t.form for t in self.tokens)

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True, slots=True)
class Corpus:
    sentences: tuple[Sentence, ...]
    source_id: str = "<memory>"

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)

    def __len__(self):
        return len(self.sentences)


def parse_conllu(lines: Iterable[str], source_id: str = "<stream>") -> Corpus:
    """Parse a CoNLL-U subset stream into a Corpus.

    Sentences are delimited by blank lines. Token lines need at least four
    tab-separated columns (ID, FORM, LEMMA, UPOS); multiword range lines
    (``3-4``) and empty nodes (``3.1``) are skipped. ``# label = X`` comments
    accumulate as gold labels of the enclosing sentence; duplicate labels are
    collapsed. Unknown UPOS values map to ``Upos.OTHER``.
    """
    sentences: list[Sentence] = []
    tokens: list[Token] = []
    labels: list[str] = []

    def flush():
        if tokens or labels:
            sentences.append(Sentence(tuple(tokens), tuple(labels)))
        tokens.clear()
        labels.clear()

    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            body = line[1:]
            if "=" in body:
                key, _, value = body.partition("=")
                if key.strip() == "label":
                    value = value.strip()
                    if value and value not in labels:
                        labels.append(value)
            continue
        cols = line.split("\t")
        if len(cols) < 4:
            raise ParseError(
                f"expected at least 4 tab-separated columns, got {len(cols)}",
                source=source_id,
                line_no=line_no,
            )
        token_id = cols[0]
        if "-" in token_id or "." in token_id:
            continue
        tokens.append(Token(form=cols[1], upos=Upos(cols[3])))
    flush()
    return Corpus(tuple(sentences), source_id=source_id)


def write_conllu(corpus: Corpus, sink: TextIO) -> None:
    """Serialize a corpus back to the CoNLL-U subset consumed by parse_conllu."""
    for sentence in corpus:
        for label in sentence.gold_labels:
            sink.write(f"# label = {label}\n")
        for i, token in enumerate(sentence.tokens, start=1):
            sink.write(f"{i}\t{token.form}\t_\t{token.upos.value}\t_\t_\t_\t_\t_\t_\n")
        sink.write("\n")


def parse_plain(
    lines: Iterable[str],
    noun_lexicon: Iterable[str] | None = None,
    source_id: str = "<stream>",
) -> Corpus:
    """Parse whitespace-tokenized text, one sentence per line.

    Tokens whose case-folded form appears in ``noun_lexicon`` are tagged NOUN;
    everything else is OTHER. Blank lines are skipped.
    """
    lexicon = {w.casefold() for w in noun_lexicon} if noun_lexicon is not None else None
    sentences = []
    for raw in lines:
        forms = raw.split()
        if not forms:
            continue
        tokens = tuple(
            Token(form, Upos.NOUN if lexicon and form.casefold() in lexicon else Upos.OTHER)
            for form in forms
        )
        sentences.append(Sentence(tokens))
    return Corpus(tuple(sentences), source_id=source_id)


# Discard reasons reported by prepare_eval_set.
NO_TOKENS = "no_tokens"
NO_LABEL = "no_label"
MULTIPLE_LABELS = "multiple_labels"
LABEL_NOT_ALLOWED = "label_not_allowed"


def prepare_eval_set(
    corpus: Corpus, allowed_labels: Iterable[str]
) -> tuple[Corpus, dict[str, int]]:
    """Filter a labeled corpus down to evaluable sentences.

    Keeps sentences that carry exactly one gold label from ``allowed_labels``
    and at least one token; everything else is discarded. Returns the filtered
    corpus plus a per-reason discard count.
    """
    allowed = set(allowed_labels)
    kept: list[Sentence] = []
    discarded = {NO_TOKENS: 0, NO_LABEL: 0, MULTIPLE_LABELS: 0, LABEL_NOT_ALLOWED: 0}
    for sentence in corpus:
        if not sentence.tokens:
            discarded[NO_TOKENS] += 1
        elif len(sentence.gold_labels) == 0:
            discarded[NO_LABEL] += 1
        elif len(sentence.gold_labels) > 1:
            discarded[MULTIPLE_LABELS] += 1
        elif sentence.gold_labels[0] not in allowed:
            discarded[LABEL_NOT_ALLOWED] += 1
        else:
            kept.append(sentence)
    if not kept:
        raise EmptyDatasetError(
            "no sentences with exactly one allowed label remain "
            f"(discarded: {discarded})"
        )
    log.info(
        "prepared eval set from %s: kept %d of %d sentences (discarded: %s)",
        corpus.source_id, len(kept), len(corpus), discarded,
    )
    return Corpus(tuple(kept), source_id=f"{corpus.source_id}#eval"), discarded
