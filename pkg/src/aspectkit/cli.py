"""Command-line entry point.

Subcommands: train-embeddings, extract-candidates, label, evaluate,
grid-search, learning-curve. Option precedence is flags > config file >
built-in defaults; a flat "key = value" config file can be passed with
--config or via the ASPECTKIT_CONFIG environment variable. Exit codes:
0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import contextlib
import dataclasses
import json
import logging
import os
import sys

from .attention import AttentionConfig, weight_lines
from .candidates import (
    DEFAULT_ADJ_WINDOW,
    DEFAULT_SEED_ADJECTIVES,
    adj_noun_candidates,
    read_candidates,
    top_n_nouns,
    top_n_tokens,
)
from .corpus import Corpus, parse_conllu, parse_plain, prepare_eval_set
from .embeddings import load_word2vec_text, save_word2vec_text
from .errors import AspectKitError
from .evaluation import (
    GridConfig,
    PipelineConfig,
    curve_tsv,
    evaluate,
    grid_search,
    learning_curve,
)
from .labeler import DEFAULT_LABELS, LabelDefinition, build_label_vectors, label_corpus
from .manifest import build_manifest, write_manifest
from .sgns import TrainerConfig, train

log = logging.getLogger(__name__)

CONFIG_ENV = "ASPECTKIT_CONFIG"
DEFAULT_GAMMA = 0.03


class _Parser(argparse.ArgumentParser):
    """Usage problems exit 1; code 2 is reserved for data errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value}")
    return value


def _nonneg_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(_positive_int(part) for part in text.split(",") if part.strip())


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(_positive_float(part) for part in text.split(",") if part.strip())


def _str_list(text: str) -> tuple[str, ...]:
    items = tuple(part.strip() for part in text.split(",") if part.strip())
    if not items:
        raise argparse.ArgumentTypeError("expected a comma-separated list")
    return items


def _label_definitions(text: str) -> tuple[LabelDefinition, ...]:
    """Parse "food=food;staff=staff,service" (terms default to the name)."""
    definitions = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, _, terms = chunk.partition("=")
        name = name.strip()
        if not name:
            raise argparse.ArgumentTypeError(f"bad label definition {chunk!r}")
        term_tuple = tuple(t.strip() for t in terms.split(",") if t.strip())
        definitions.append(LabelDefinition(name, term_tuple))
    if not definitions:
        raise argparse.ArgumentTypeError("no label definitions given")
    return tuple(definitions)


def _load_corpus(path: str, fmt: str, noun_lexicon_path: str | None = None) -> Corpus:
    lexicon = None
    if noun_lexicon_path:
        with open(noun_lexicon_path, encoding="utf-8") as fh:
            lexicon = {line.strip() for line in fh if line.strip()}
    with open(path, encoding="utf-8") as fh:
        if fmt == "plain":
            return parse_plain(fh, noun_lexicon=lexicon, source_id=path)
        return parse_conllu(fh, source_id=path)


def _load_store(path: str):
    with open(path, encoding="utf-8") as fh:
        return load_word2vec_text(fh)


@contextlib.contextmanager
def _out_stream(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def _resolve_labels(args) -> tuple[LabelDefinition, ...]:
    return args.labels if args.labels is not None else DEFAULT_LABELS


def _prepare_if_requested(corpus: Corpus, args, definitions) -> Corpus:
    if not getattr(args, "prepare_eval", False):
        return corpus
    allowed = args.allowed_labels or tuple(d.name for d in definitions)
    corpus, discarded = prepare_eval_set(corpus, allowed)
    print(
        f"eval set: kept {len(corpus)} sentences; discarded "
        + ", ".join(f"{k}={v}" for k, v in discarded.items()),
        file=sys.stderr,
    )
    return corpus


def _candidates_for(args, corpus: Corpus, store) -> "CandidateSet":
    if getattr(args, "candidates", None):
        with open(args.candidates, encoding="utf-8") as fh:
            return read_candidates(fh, store)
    source = corpus
    if getattr(args, "candidate_corpus", None):
        source = _load_corpus(
            args.candidate_corpus, args.format, getattr(args, "noun_lexicon", None)
        )
    return top_n_nouns(source, store, args.top_n)


# --- subcommands -----------------------------------------------------------


def cmd_train_embeddings(args) -> int:
    corpus = _load_corpus(args.corpus, args.format, args.noun_lexicon)
    config = TrainerConfig(
        dim=args.dim,
        window=args.window,
        negatives=args.negatives,
        epochs=args.epochs,
        initial_lr=args.lr,
        min_count=args.min_count,
        subsample_threshold=args.subsample,
        seed=args.seed,
        workers=args.workers,
    )
    store = train(corpus, config)
    with open(args.output, "w", encoding="utf-8") as fh:
        save_word2vec_text(store, fh)
    write_manifest(
        build_manifest(
            "train-embeddings", dataclasses.asdict(config), [args.corpus], [args.output]
        ),
        args.output,
    )
    print(f"trained {len(store)} vectors of dimension {store.dim} -> {args.output}")
    return 0


def cmd_extract_candidates(args) -> int:
    corpus = _load_corpus(args.corpus, args.format, args.noun_lexicon)
    store = _load_store(args.vectors)
    if args.method == "nouns":
        cands = top_n_nouns(corpus, store, args.top_n)
    elif args.method == "tokens":
        cands = top_n_tokens(corpus, store, args.top_n)
    else:
        seeds = args.seed_adjectives or tuple(sorted(DEFAULT_SEED_ADJECTIVES))
        cands = adj_noun_candidates(
            corpus, store, args.top_n, seed_adjectives=seeds, window=args.adj_window
        )
    with open(args.output, "w", encoding="utf-8") as fh:
        cands.save(fh)
    write_manifest(
        build_manifest(
            "extract-candidates",
            {
                "method": args.method,
                "top_n": args.top_n,
                "adj_window": args.adj_window,
                "seed_adjectives": sorted(args.seed_adjectives or DEFAULT_SEED_ADJECTIVES),
            },
            [args.corpus, args.vectors],
            [args.output],
        ),
        args.output,
    )
    print(f"wrote {len(cands)} candidates -> {args.output}")
    return 0


def cmd_label(args) -> int:
    if args.gamma is not None and args.method != "cat":
        print(
            f"warning: --method {args.method} ignores --gamma", file=sys.stderr
        )
    gamma = args.gamma if args.gamma is not None else DEFAULT_GAMMA
    store = _load_store(args.vectors)
    corpus = _load_corpus(args.corpus, args.format, args.noun_lexicon)
    definitions = _resolve_labels(args)
    corpus = _prepare_if_requested(corpus, args, definitions)
    labels = build_label_vectors(store, definitions)
    candidates = _candidates_for(args, corpus, store)

    results = label_corpus(
        corpus, store, candidates, labels, args.method, AttentionConfig(gamma)
    )
    abstained = 0
    with _out_stream(args.output) as out:
        for sentence, result in zip(corpus, results):
            if len(sentence.gold_labels) == 1:
                gold = sentence.gold_labels[0]
            elif not sentence.gold_labels:
                gold = None
            else:
                gold = list(sentence.gold_labels)
            record = {
                "text": sentence.text(),
                "gold": gold,
                "predicted": result.label,
                "similarities": (
                    {k: round(v, 6) for k, v in result.similarities.items()}
                    if result.similarities is not None
                    else None
                ),
            }
            if args.show_attention:
                record["weights"] = (
                    [round(w, 6) for w in result.attention.weights.tolist()]
                    if result.attention is not None
                    else [0.0] * len(sentence.tokens)
                )
            out.write(json.dumps(record) + "\n")
            abstained += result.abstained

    if args.attention_tsv:
        with open(args.attention_tsv, "w", encoding="utf-8") as fh:
            for sentence, result in zip(corpus, results):
                weights = (
                    result.attention.weights.tolist()
                    if result.attention is not None
                    else [0.0] * len(sentence.tokens)
                )
                for line in weight_lines([t.form for t in sentence.tokens], weights):
                    fh.write(line + "\n")
                fh.write("\n")

    if args.output:
        write_manifest(
            build_manifest(
                "label",
                {
                    "method": args.method,
                    "gamma": gamma,
                    "top_n": args.top_n,
                    "candidates": args.candidates,
                    "labels": [
                        {"name": d.name, "query_terms": list(d.query_terms)}
                        for d in definitions
                    ],
                },
                [p for p in (args.corpus, args.vectors, args.candidates) if p],
                [args.output],
            ),
            args.output,
        )
    print(
        f"labeled {len(corpus)} sentences ({abstained} abstained) with method={args.method}",
        file=sys.stderr,
    )
    return 0


def _read_predictions(path: str) -> tuple[list, list]:
    predictions, golds = [], []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            record = json.loads(line)
            gold = record.get("gold")
            if not isinstance(gold, str):
                raise AspectKitError(
                    f"{path}: record {line_no} lacks a single gold label; "
                    "label with --prepare-eval to filter the corpus first"
                )
            golds.append(gold)
            predictions.append(record.get("predicted"))
    if not golds:
        raise AspectKitError(f"{path}: no prediction records found")
    return predictions, golds


def cmd_evaluate(args) -> int:
    predictions, golds = _read_predictions(args.predictions)
    definitions = _resolve_labels(args)
    order = tuple(d.name for d in definitions)
    report = evaluate(predictions, golds, order)
    print(report.format_table())
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        write_manifest(
            build_manifest(
                "evaluate", {"labels": list(order)}, [args.predictions], [args.output]
            ),
            args.output,
        )
    return 0


def cmd_grid_search(args) -> int:
    store = _load_store(args.vectors)
    dev = _load_corpus(args.dev, args.format, args.noun_lexicon)
    definitions = _resolve_labels(args)
    allowed = args.allowed_labels or tuple(d.name for d in definitions)
    dev, discarded = prepare_eval_set(dev, allowed)
    print(
        f"dev set: kept {len(dev)} sentences; discarded "
        + ", ".join(f"{k}={v}" for k, v in discarded.items()),
        file=sys.stderr,
    )
    labels = build_label_vectors(store, definitions)
    candidate_corpus = None
    if args.candidate_corpus:
        candidate_corpus = _load_corpus(args.candidate_corpus, args.format, args.noun_lexicon)
    grid = GridConfig(args.candidate_counts, args.gammas, args.method)
    result = grid_search(
        dev, store, grid, labels, candidate_corpus, workers=args.workers
    )
    print(result.format_table())
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump(result.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        write_manifest(
            build_manifest(
                "grid-search",
                {
                    "method": args.method,
                    "candidate_counts": list(args.candidate_counts),
                    "gammas": list(args.gammas),
                },
                [p for p in (args.dev, args.vectors, args.candidate_corpus) if p],
                [args.output],
            ),
            args.output,
        )
    return 0


def cmd_learning_curve(args) -> int:
    train_corpus = _load_corpus(args.train_corpus, args.format, args.noun_lexicon)
    eval_corpus = _load_corpus(args.eval_corpus, "conllu")
    definitions = _resolve_labels(args)
    allowed = args.allowed_labels or tuple(d.name for d in definitions)
    eval_corpus, _ = prepare_eval_set(eval_corpus, allowed)
    trainer = TrainerConfig(
        dim=args.dim,
        window=args.window,
        negatives=args.negatives,
        epochs=args.epochs,
        initial_lr=args.lr,
        min_count=args.min_count,
        subsample_threshold=args.subsample,
        seed=args.seed,
        workers=args.workers,
    )
    pipeline = PipelineConfig(
        method=args.method,
        gamma=args.gamma if args.gamma is not None else DEFAULT_GAMMA,
        top_n=args.top_n,
        label_definitions=definitions,
    )
    points = learning_curve(
        train_corpus, eval_corpus, trainer, pipeline,
        increments=args.increments, seeds=args.seeds,
    )
    tsv = curve_tsv(points)
    sys.stdout.write(tsv)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(tsv)
        write_manifest(
            build_manifest(
                "learning-curve",
                {
                    "trainer": dataclasses.asdict(trainer),
                    "pipeline": {
                        "method": pipeline.method,
                        "gamma": pipeline.gamma,
                        "top_n": pipeline.top_n,
                    },
                    "increments": args.increments,
                    "seeds": args.seeds,
                },
                [args.train_corpus, args.eval_corpus],
                [args.output],
            ),
            args.output,
        )
    return 0


# --- parser construction ----------------------------------------------------


def _add_trainer_options(parser):
    parser.add_argument("--dim", type=_positive_int, default=200)
    parser.add_argument("--window", type=_positive_int, default=5)
    parser.add_argument("--negatives", type=_positive_int, default=5)
    parser.add_argument("--epochs", type=_positive_int, default=5)
    parser.add_argument("--lr", type=_positive_float, default=0.025)
    parser.add_argument("--min-count", type=_positive_int, default=5)
    parser.add_argument("--subsample", type=_nonneg_float, default=1e-3)
    parser.add_argument("--seed", type=_nonneg_int, default=1)
    parser.add_argument("--workers", type=_positive_int, default=1)


def _add_label_options(parser):
    parser.add_argument(
        "--labels",
        type=_label_definitions,
        default=None,
        help="label definitions, e.g. 'food=food;staff=staff,service'",
    )
    parser.add_argument(
        "--allowed-labels",
        type=_str_list,
        default=None,
        help="gold labels retained by eval-set filtering (default: the label names)",
    )


def build_parser() -> tuple[_Parser, argparse._SubParsersAction]:
    parser = _Parser(prog="aspectkit", description=__doc__)
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("-v", "--verbose", action="store_true")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = subparsers.add_parser("train-embeddings", help="train skip-gram vectors")
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", choices=("conllu", "plain"), default="conllu")
    p.add_argument("--noun-lexicon",
                   help="word list (one per line) tagged NOUN in plain corpora")
    p.add_argument("--output", required=True)
    _add_trainer_options(p)
    p.set_defaults(func=cmd_train_embeddings)

    p = subparsers.add_parser("extract-candidates", help="rank aspect candidate terms")
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", choices=("conllu", "plain"), default="conllu")
    p.add_argument("--noun-lexicon",
                   help="word list (one per line) tagged NOUN in plain corpora")
    p.add_argument("--vectors", required=True)
    p.add_argument("--method", choices=("nouns", "tokens", "adj-noun"), default="nouns")
    p.add_argument("--top-n", type=_positive_int, default=200)
    p.add_argument("--adj-window", type=_nonneg_int, default=DEFAULT_ADJ_WINDOW)
    p.add_argument("--seed-adjectives", type=_str_list, default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_extract_candidates)

    p = subparsers.add_parser("label", help="assign aspect labels to sentences")
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", choices=("conllu", "plain"), default="conllu")
    p.add_argument("--noun-lexicon",
                   help="word list (one per line) tagged NOUN in plain corpora")
    p.add_argument("--vectors", required=True)
    p.add_argument("--method", choices=("cat", "attention", "mean"), default="cat")
    p.add_argument("--gamma", type=_positive_float, default=None)
    p.add_argument("--top-n", type=_positive_int, default=200)
    p.add_argument("--candidates", help="reuse a term<TAB>score candidate file")
    p.add_argument("--candidate-corpus", help="corpus for on-the-fly candidate extraction")
    p.add_argument("--prepare-eval", action="store_true",
                   help="keep only sentences with exactly one allowed gold label")
    _add_label_options(p)
    p.add_argument("--show-attention", action="store_true",
                   help="include per-token weights in the JSON records")
    p.add_argument("--attention-tsv", help="also write token<TAB>weight blocks here")
    p.add_argument("--output", help="predictions JSONL (default: stdout)")
    p.set_defaults(func=cmd_label)

    p = subparsers.add_parser("evaluate", help="score a predictions file")
    p.add_argument("--predictions", required=True)
    _add_label_options(p)
    p.add_argument("--output", help="write the report as JSON here")
    p.set_defaults(func=cmd_evaluate)

    p = subparsers.add_parser("grid-search", help="sweep candidate count and gamma")
    p.add_argument("--dev", required=True)
    p.add_argument("--format", choices=("conllu", "plain"), default="conllu")
    p.add_argument("--noun-lexicon",
                   help="word list (one per line) tagged NOUN in plain corpora")
    p.add_argument("--vectors", required=True)
    p.add_argument("--method", choices=("cat", "attention", "mean"), default="cat")
    p.add_argument("--candidate-counts", type=_int_list, default=(50, 100, 200, 500, 980))
    p.add_argument("--gammas", type=_float_list, default=(0.01, 0.03, 0.1, 0.3, 1.0))
    p.add_argument("--candidate-corpus")
    p.add_argument("--workers", type=_positive_int, default=1,
                   help="threads for evaluating grid cells")
    _add_label_options(p)
    p.add_argument("--output", help="write all cells and the best one as JSON here")
    p.set_defaults(func=cmd_grid_search)

    p = subparsers.add_parser("learning-curve", help="score against training-data size")
    p.add_argument("--train-corpus", required=True)
    p.add_argument("--format", choices=("conllu", "plain"), default="conllu")
    p.add_argument("--noun-lexicon",
                   help="word list (one per line) tagged NOUN in plain corpora")
    p.add_argument("--eval-corpus", required=True)
    p.add_argument("--increments", type=_positive_int, default=10)
    p.add_argument("--seeds", type=_positive_int, default=5,
                   help="embedding models trained per increment")
    _add_trainer_options(p)
    p.add_argument("--method", choices=("cat", "attention", "mean"), default="cat")
    p.add_argument("--gamma", type=_positive_float, default=None)
    p.add_argument("--top-n", type=_positive_int, default=200)
    _add_label_options(p)
    p.add_argument("--output", help="write the TSV here as well")
    p.set_defaults(func=cmd_learning_curve)

    return parser, subparsers


def _read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise AspectKitError(f"{path}: line {line_no}: expected 'key = value'")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config_defaults(subparsers, config: dict[str, str]) -> None:
    for sub in set(subparsers.choices.values()):
        overrides = {}
        for action in sub._actions:
            if action.dest in config:
                value = config[action.dest]
                if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
                    overrides[action.dest] = value.lower() in ("1", "true", "yes", "on")
                else:
                    overrides[action.dest] = value
        if overrides:
            sub.set_defaults(**overrides)


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)

    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    config_path = known.config or os.environ.get(CONFIG_ENV)

    parser, subparsers = build_parser()
    try:
        if config_path:
            _apply_config_defaults(subparsers, _read_config_file(config_path))
    except (AspectKitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args) or 0
    except AspectKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
