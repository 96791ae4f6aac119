"""Scoring, hyperparameter grid search, and the learning-curve experiment.

Metrics are support-weighted macro averages: because the class distribution
is heavily skewed in the target datasets, per-class scores are averaged with
class-support weights. Abstained sentences (no in-vocabulary token) are
excluded from precision/recall and reported separately.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .candidates import top_n_nouns
from .corpus import Corpus
from .embeddings import VectorStore
from .errors import AspectKitError, EmptyDatasetError
from .labeler import (
    DEFAULT_LABELS,
    LabelDefinition,
    LabelMatrix,
    _label_from_rows,
    build_label_vectors,
    sentence_rows,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvaluationReport:
    """Per-class and support-weighted macro P/R/F plus the confusion matrix.

    ``confusion[i, j]`` counts sentences with gold label i predicted as j,
    in ``label_order``. Weighted macro recall equals accuracy by definition
    and is computed as trace/N so the identity holds exactly.
    """

    label_order: tuple[str, ...]
    per_class: dict[str, ClassMetrics]
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    confusion: np.ndarray
    n_evaluated: int
    abstain_count: int = 0

    @property
    def accuracy(self) -> float:
        return self.weighted_recall

    def to_dict(self) -> dict:
        return {
            "label_order": list(self.label_order),
            "per_class": {
                name: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for name, m in self.per_class.items()
            },
            "weighted_macro": {
                "precision": self.weighted_precision,
                "recall": self.weighted_recall,
                "f1": self.weighted_f1,
            },
            "confusion": self.confusion.tolist(),
            "n_evaluated": self.n_evaluated,
            "abstain_count": self.abstain_count,
        }

    def format_table(self) -> str:
        width = max(8, max(len(name) for name in self.label_order))
        lines = [f"{'label':<{width}}  {'prec':>8}  {'recall':>8}  {'f1':>8}  {'support':>8}"]
        for name in self.label_order:
            m = self.per_class[name]
            lines.append(
                f"{name:<{width}}  {m.precision:8.4f}  {m.recall:8.4f}  "
                f"{m.f1:8.4f}  {m.support:8d}"
            )
        lines.append(
            f"{'weighted':<{width}}  {self.weighted_precision:8.4f}  "
            f"{self.weighted_recall:8.4f}  {self.weighted_f1:8.4f}  "
            f"{self.n_evaluated:8d}"
        )
        if self.abstain_count:
            lines.append(f"abstained: {self.abstain_count}")
        return "\n".join(lines)


def evaluate(
    predictions: Sequence[str | None],
    gold: Sequence[str],
    label_order: Sequence[str],
) -> EvaluationReport:
    """Score predictions against gold labels.

    ``None`` predictions are abstentions: the pair is excluded from the
    confusion matrix and counted in ``abstain_count``. Precision and recall
    default to 0 where undefined; F1 is 0 when P + R == 0.
    """
    if len(predictions) != len(gold):
        raise ValueError(
            f"{len(predictions)} predictions but {len(gold)} gold labels"
        )
    order = tuple(label_order)
    index = {name: i for i, name in enumerate(order)}
    if len(index) != len(order):
        raise ValueError("label_order contains duplicates")

    confusion = np.zeros((len(order), len(order)), dtype=np.int64)
    abstain_count = 0
    for pred, true in zip(predictions, gold):
        if true not in index:
            raise ValueError(f"gold label {true!r} not in label_order {order}")
        if pred is None:
            abstain_count += 1
            continue
        if pred not in index:
            raise ValueError(f"predicted label {pred!r} not in label_order {order}")
        confusion[index[true], index[pred]] += 1

    n = int(confusion.sum())
    if n == 0:
        raise EmptyDatasetError("every prediction abstained; nothing to score")

    per_class: dict[str, ClassMetrics] = {}
    weighted_p_terms = []
    weighted_f_terms = []
    for i, name in enumerate(order):
        tp = int(confusion[i, i])
        support = int(confusion[i, :].sum())
        predicted = int(confusion[:, i].sum())
        precision = tp / predicted if predicted else 0.0
        recall = tp / support if support else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[name] = ClassMetrics(precision, recall, f1, support)
        weighted_p_terms.append(support * precision)
        weighted_f_terms.append(support * f1)

    return EvaluationReport(
        label_order=order,
        per_class=per_class,
        weighted_precision=math.fsum(weighted_p_terms) / n,
        weighted_recall=int(np.trace(confusion)) / n,
        weighted_f1=math.fsum(weighted_f_terms) / n,
        confusion=confusion,
        n_evaluated=n,
        abstain_count=abstain_count,
    )


@dataclass(frozen=True)
class GridConfig:
    """The (candidate count, gamma) grid explored on development data."""

    candidate_counts: tuple[int, ...] = (50, 100, 200, 500, 980)
    gammas: tuple[float, ...] = (0.01, 0.03, 0.1, 0.3, 1.0)
    method: str = "cat"

    def __post_init__(self):
        if not self.candidate_counts or not self.gammas:
            raise ValueError("candidate_counts and gammas must be non-empty")


@dataclass(frozen=True)
class GridCell:
    candidate_count: int
    gamma: float
    report: EvaluationReport

    @property
    def weighted_f1(self) -> float:
        return self.report.weighted_f1


@dataclass(frozen=True)
class GridSearchResult:
    cells: tuple[GridCell, ...]
    best: GridCell

    def format_table(self) -> str:
        lines = [f"{'top_n':>6}  {'gamma':>8}  {'prec':>8}  {'recall':>8}  {'f1':>8}  {'abstain':>7}"]
        for cell in self.cells:
            r = cell.report
            lines.append(
                f"{cell.candidate_count:6d}  {cell.gamma:8.4f}  {r.weighted_precision:8.4f}  "
                f"{r.weighted_recall:8.4f}  {r.weighted_f1:8.4f}  {r.abstain_count:7d}"
            )
        lines.append(
            f"best: top_n={self.best.candidate_count} gamma={self.best.gamma:.4f} "
            f"f1={self.best.weighted_f1:.4f}"
        )
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "cells": [
                {
                    "candidate_count": c.candidate_count,
                    "gamma": c.gamma,
                    "weighted_precision": c.report.weighted_precision,
                    "weighted_recall": c.report.weighted_recall,
                    "weighted_f1": c.report.weighted_f1,
                    "abstain_count": c.report.abstain_count,
                }
                for c in self.cells
            ],
            "best": {
                "candidate_count": self.best.candidate_count,
                "gamma": self.best.gamma,
                "report": self.best.report.to_dict(),
            },
        }


def _label_prepared_corpus(
    corpus: Corpus,
    store: VectorStore,
    aspect_vectors: np.ndarray,
    labels: LabelMatrix,
    method: str,
    gamma: float,
    row_cache: list | None = None,
) -> tuple[list[str | None], list[str]]:
    """Predictions and golds for a corpus prepared via prepare_eval_set."""
    predictions: list[str | None] = []
    golds: list[str] = []
    if row_cache is None:
        row_cache = [sentence_rows(s, store) for s in corpus]
    for sentence, (rows, kept) in zip(corpus, row_cache):
        gold = sentence.gold_label
        if gold is None:
            raise EmptyDatasetError(
                "evaluation corpus contains a sentence without exactly one gold "
                "label; run prepare_eval_set first"
            )
        golds.append(gold)
        if rows is None:
            predictions.append(None)
        else:
            result = _label_from_rows(
                rows, kept, len(sentence.tokens), aspect_vectors, labels, method, gamma
            )
            predictions.append(result.label)
    return predictions, golds


def grid_search(
    dev: Corpus,
    store: VectorStore,
    grid: GridConfig,
    labels: LabelMatrix,
    candidate_corpus: Corpus | None = None,
    workers: int = 1,
) -> GridSearchResult:
    """Evaluate every (candidate count, gamma) cell and pick the best F1.

    Candidates are frequent nouns drawn from ``candidate_corpus`` (the dev
    corpus itself when omitted). Cells are independent and evaluated on
    ``workers`` threads; ties break toward the smaller candidate count, then
    the smaller gamma, so the result depends neither on grid order nor on
    completion order.
    """
    if len(dev) == 0:
        raise EmptyDatasetError("development corpus is empty")
    source = candidate_corpus if candidate_corpus is not None else dev
    full = top_n_nouns(source, store, max(grid.candidate_counts))
    row_cache = [sentence_rows(s, store) for s in dev]

    gammas = grid.gammas if grid.method == "cat" else (grid.gammas[0],)
    if grid.method != "cat" and len(grid.gammas) > 1:
        log.info("method %r ignores gamma; evaluating one gamma per count", grid.method)

    vectors_by_count = {
        count: full.head(count).vectors.astype(np.float64)
        for count in grid.candidate_counts
    }

    def run_cell(job):
        count, gamma = job
        predictions, golds = _label_prepared_corpus(
            dev, store, vectors_by_count[count], labels, grid.method, gamma, row_cache
        )
        return GridCell(count, gamma, evaluate(predictions, golds, labels.labels))

    jobs = [(count, gamma) for count in grid.candidate_counts for gamma in gammas]
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(run_cell, jobs))
    else:
        cells = [run_cell(job) for job in jobs]
    best = min(cells, key=lambda c: (-c.weighted_f1, c.candidate_count, c.gamma))
    return GridSearchResult(tuple(cells), best)


@dataclass(frozen=True)
class PipelineConfig:
    """End-to-end labeling settings used by the learning-curve experiment."""

    method: str = "cat"
    gamma: float = 0.03
    top_n: int = 200
    label_definitions: tuple[LabelDefinition, ...] = DEFAULT_LABELS


@dataclass(frozen=True)
class CurvePoint:
    fraction: float
    n_sentences: int
    f_scores: tuple[float, ...]

    @property
    def mean_f(self) -> float:
        valid = [f for f in self.f_scores if not math.isnan(f)]
        return float(np.mean(valid)) if valid else float("nan")

    @property
    def std_f(self) -> float:
        valid = [f for f in self.f_scores if not math.isnan(f)]
        return float(np.std(valid)) if valid else float("nan")


def learning_curve(
    train_corpus: Corpus,
    eval_corpus: Corpus,
    trainer_config,
    pipeline: PipelineConfig = PipelineConfig(),
    increments: int = 10,
    seeds: int = 5,
) -> tuple[CurvePoint, ...]:
    """Weighted-macro F1 as a function of training-data size.

    For each fraction k/increments the first k/increments of the training
    sentences are used to train ``seeds`` embedding models (seeds
    ``trainer_config.seed .. +seeds-1``); the full pipeline (candidates,
    label vectors, labeling) is rebuilt per model and scored on
    ``eval_corpus``. Fractions too small to train are recorded as NaN points
    rather than raised.
    """
    from .sgns import train  # deferred: keeps module import light

    if len(train_corpus) == 0:
        raise EmptyDatasetError("training corpus is empty")
    if increments < 1 or seeds < 1:
        raise ValueError("increments and seeds must be >= 1")

    points = []
    for k in range(1, increments + 1):
        n_k = (len(train_corpus) * k) // increments
        prefix = Corpus(
            train_corpus.sentences[:n_k],
            source_id=f"{train_corpus.source_id}#first{k}of{increments}",
        )
        scores = []
        for offset in range(seeds):
            config = replace(trainer_config, seed=trainer_config.seed + offset)
            try:
                store = train(prefix, config)
                labels = build_label_vectors(store, pipeline.label_definitions)
                cands = top_n_nouns(prefix, store, pipeline.top_n)
                predictions, golds = _label_prepared_corpus(
                    eval_corpus, store, cands.vectors.astype(np.float64),
                    labels, pipeline.method, pipeline.gamma,
                )
                scores.append(evaluate(predictions, golds, labels.labels).weighted_f1)
            except AspectKitError as exc:
                log.warning(
                    "learning curve: fraction %d/%d seed %d failed: %s",
                    k, increments, config.seed, exc,
                )
                scores.append(float("nan"))
        points.append(CurvePoint(k / increments, n_k, tuple(scores)))
    return tuple(points)


def curve_tsv(points: Sequence[CurvePoint]) -> str:
    """Plot-ready TSV: fraction, mean weighted F1, standard deviation."""
    lines = ["fraction\tmean_f\tstd_f"]
    for p in points:
        lines.append(f"{p.fraction:.4f}\t{p.mean_f:.4f}\t{p.std_f:.4f}")
    return "\n".join(lines) + "\n"
