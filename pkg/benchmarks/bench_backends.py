#!/usr/bin/env python3
"""Benchmark the compiled skip-gram core against the pure-numpy fallback.

Trains both backends on the same synthetic corpus with the same seed (they
follow an identical sampling schedule) and reports tokens/second plus output
agreement. Optionally also times the vectorized attention kernel against a
naive per-pair loop.

Usage:
    python3 benchmarks/bench_backends.py [--sentences N] [--dim D] [--epochs E]
    python3 benchmarks/bench_backends.py --attention
"""

import argparse
import math
import time

import numpy as np

from aspectkit.attention import contrastive_attention
from aspectkit.corpus import Corpus, Sentence, Token
from aspectkit.sgns import HAVE_COMPILED, SkipGramTrainer, TrainerConfig


def synthetic_corpus(n_sentences, vocab_size, seed):
    rng = np.random.default_rng(seed)
    # zipf-ish frequencies so the negative-sampling table is non-trivial
    words = [f"w{i}" for i in range(vocab_size)]
    probs = 1.0 / np.arange(1, vocab_size + 1)
    probs /= probs.sum()
    sentences = []
    for _ in range(n_sentences):
        length = int(rng.integers(5, 25))
        picks = rng.choice(words, size=length, p=probs)
        sentences.append(Sentence(tuple(Token(w) for w in picks)))
    return Corpus(tuple(sentences), source_id="bench")


def bench_sgns(args):
    corpus = synthetic_corpus(args.sentences, args.vocab, args.seed)
    n_tokens = sum(len(s.tokens) for s in corpus)
    config = TrainerConfig(
        dim=args.dim, window=5, negatives=5, epochs=args.epochs,
        min_count=1, subsample_threshold=1e-3, seed=args.seed,
        workers=args.workers,
    )
    print(f"corpus: {len(corpus)} sentences, {n_tokens} tokens, vocab {args.vocab}")
    print(f"config: dim={args.dim} epochs={args.epochs} workers={args.workers}")

    backends = (["compiled"] if HAVE_COMPILED else []) + ["pure"]
    results = {}
    for name in backends:
        trainer = SkipGramTrainer(config, backend=name)
        start = time.perf_counter()
        store = trainer.fit(corpus)
        elapsed = time.perf_counter() - start
        rate = n_tokens * args.epochs / elapsed
        results[name] = (elapsed, store, trainer.epoch_objectives_)
        print(f"{name:>9}: {elapsed:7.2f} s  {rate:12,.0f} tokens/s  "
              f"final objective {trainer.epoch_objectives_[-1]:.6f}")

    if len(results) == 2:
        (t_c, store_c, _), (t_p, store_p, _) = results["compiled"], results["pure"]
        print(f"speedup: {t_p / t_c:.1f}x")
        mc = store_c.matrix.astype(np.float64)
        mp = store_p.matrix.astype(np.float64)
        cos = np.sum(mc * mp, axis=1) / (
            np.linalg.norm(mc, axis=1) * np.linalg.norm(mp, axis=1)
        )
        print(f"agreement: min per-word cosine {cos.min():.6f}, "
              f"max abs diff {np.abs(mc - mp).max():.2e}")


def naive_attention(tokens, aspects, gamma):
    raw = []
    for t in tokens:
        total = 0.0
        for a in aspects:
            diff = t - a
            total += math.exp(-gamma * float(np.dot(diff, diff)))
        raw.append(total)
    total = sum(raw)
    return np.array([r / total for r in raw])


def bench_attention(args):
    rng = np.random.default_rng(args.seed)
    tokens = rng.normal(size=(20, args.dim))
    aspects = rng.normal(size=(200, args.dim))
    rounds = 200

    start = time.perf_counter()
    for _ in range(rounds):
        fast = contrastive_attention(tokens, aspects, 0.03)
    t_fast = (time.perf_counter() - start) / rounds

    start = time.perf_counter()
    for _ in range(rounds):
        slow = naive_attention(tokens, aspects, 0.03)
    t_slow = (time.perf_counter() - start) / rounds

    print(f"attention over 20x{args.dim} tokens, 200 aspects:")
    print(f"vectorized: {t_fast * 1e3:8.3f} ms/sentence")
    print(f"     naive: {t_slow * 1e3:8.3f} ms/sentence")
    print(f"   speedup: {t_slow / t_fast:.1f}x, max weight diff {np.abs(fast - slow).max():.2e}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sentences", type=int, default=20_000)
    parser.add_argument("--vocab", type=int, default=2_000)
    parser.add_argument("--dim", type=int, default=100)
    parser.add_argument("--epochs", type=int, default=1)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--attention", action="store_true",
                        help="benchmark the attention kernel instead of sgns")
    args = parser.parse_args()
    if args.attention:
        bench_attention(args)
    else:
        bench_sgns(args)


if __name__ == "__main__":
    main()
