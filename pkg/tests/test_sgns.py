import io

import numpy as np
import pytest

from aspectkit.corpus import Corpus
from aspectkit.embeddings import load_word2vec_text, save_word2vec_text
from aspectkit.errors import EmptyDatasetError
from aspectkit.sgns import (
    HAVE_COMPILED,
    SkipGramTrainer,
    TrainerConfig,
    build_vocab,
    encode_corpus,
    resolve_backend,
    train,
)

from conftest import corpus_of, sent, topic_margin, two_topic_corpus

BACKENDS = ("compiled", "pure") if HAVE_COMPILED else ("pure",)

QUICK = TrainerConfig(
    dim=16, window=3, negatives=3, epochs=2, min_count=1,
    subsample_threshold=1e-3, seed=7,
)


@pytest.fixture(scope="module")
def small_corpus():
    rng = np.random.default_rng(0)
    corpus, _ = two_topic_corpus(300, rng)
    return corpus


class TestTrainerConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"dim": 0},
            {"window": 0},
            {"negatives": 0},
            {"epochs": 0},
            {"min_count": 0},
            {"workers": 0},
            {"initial_lr": 0.0},
            {"subsample_threshold": -1e-3},
            {"seed": -1},
        ],
    )
    def test_invalid_values_rejected(self, kwargs):
        with pytest.raises(ValueError):
            TrainerConfig(**kwargs)


class TestBuildVocab:
    def test_word_above_min_count_retained(self):
        corpus = corpus_of(*[sent("food") for _ in range(10)])
        vocab = build_vocab(corpus, TrainerConfig(min_count=5))
        assert vocab.words == ("food",)
        assert vocab.counts[0] == 10
        assert vocab.total_tokens == 10

    def test_word_below_min_count_dropped(self):
        corpus = corpus_of(*([sent("food")] * 10 + [sent("rare")] * 3))
        vocab = build_vocab(corpus, TrainerConfig(min_count=5))
        assert "rare" not in vocab.index

    def test_empty_corpus_is_an_error(self):
        with pytest.raises(EmptyDatasetError):
            build_vocab(Corpus(()), TrainerConfig())

    def test_everything_filtered_is_an_error(self):
        corpus = corpus_of(sent("one two three"))
        with pytest.raises(EmptyDatasetError):
            build_vocab(corpus, TrainerConfig(min_count=5))

    def test_sorted_by_count_then_lexicographic(self):
        corpus = corpus_of(*([sent("b a")] * 3 + [sent("c")] * 5))
        vocab = build_vocab(corpus, TrainerConfig(min_count=1))
        assert vocab.words == ("c", "a", "b")

    def test_subsampling_disabled_keeps_everything(self):
        corpus = corpus_of(*[sent("food bar") for _ in range(10)])
        vocab = build_vocab(corpus, TrainerConfig(min_count=1, subsample_threshold=0.0))
        np.testing.assert_array_equal(vocab.keep_prob, 1.0)

    def test_cum_table_monotone_and_capped(self):
        corpus = corpus_of(*([sent("a b c")] * 5 + [sent("a")] * 7))
        vocab = build_vocab(corpus, TrainerConfig(min_count=1))
        table = vocab.cum_table
        assert np.all(np.diff(table.astype(np.int64)) >= 0)
        assert table[-1] == 2**31 - 1


class TestEncode:
    def test_oov_tokens_dropped(self):
        corpus = corpus_of(*([sent("food bar")] * 5 + [sent("rare food")] * 1))
        vocab = build_vocab(corpus, TrainerConfig(min_count=5))
        data, offsets = encode_corpus(corpus, vocab)
        assert len(data) == 11  # 5x2 retained + 1 from the rare sentence
        assert len(offsets) == 7
        assert data.max() < len(vocab)


class TestTrain:
    def test_requested_dimension(self, small_corpus):
        store = train(small_corpus, TrainerConfig(
            dim=50, window=2, negatives=2, epochs=1, min_count=1, seed=3,
        ))
        assert store.dim == 50
        assert store.matrix.shape == (len(store), 50)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_bit_identical_reruns(self, small_corpus, backend):
        first = SkipGramTrainer(QUICK, backend=backend).fit(small_corpus)
        second = SkipGramTrainer(QUICK, backend=backend).fit(small_corpus)
        assert first.words == second.words
        np.testing.assert_array_equal(first.matrix, second.matrix)

    def test_seed_changes_output(self, small_corpus):
        base = train(small_corpus, QUICK)
        other = train(small_corpus, TrainerConfig(
            dim=16, window=3, negatives=3, epochs=2, min_count=1,
            subsample_threshold=1e-3, seed=8,
        ))
        assert not np.array_equal(base.matrix, other.matrix)

    @pytest.mark.skipif(not HAVE_COMPILED, reason="compiled backend not built")
    def test_backends_follow_the_same_schedule(self, small_corpus):
        compiled = SkipGramTrainer(QUICK, backend="compiled")
        pure = SkipGramTrainer(QUICK, backend="pure")
        store_c = compiled.fit(small_corpus)
        store_p = pure.fit(small_corpus)
        assert store_c.words == store_p.words
        # same pair schedule: identical objective term counts, near-identical
        # objective values; vectors agree up to float noise
        np.testing.assert_allclose(
            compiled.epoch_objectives_, pure.epoch_objectives_, rtol=1e-3
        )
        mc = store_c.matrix.astype(np.float64)
        mp = store_p.matrix.astype(np.float64)
        cosines = np.sum(mc * mp, axis=1) / (
            np.linalg.norm(mc, axis=1) * np.linalg.norm(mp, axis=1)
        )
        assert cosines.min() > 0.999

    def test_two_topic_structure_is_learned(self):
        rng = np.random.default_rng(1)
        corpus, topics = two_topic_corpus(800, rng)
        store = train(corpus, TrainerConfig(
            dim=24, window=5, negatives=5, epochs=5, min_count=5,
            subsample_threshold=0.0, seed=1,
        ))
        assert topic_margin(topics, store) > 0.2

    def test_objective_improves_over_epochs(self, small_corpus):
        trainer = SkipGramTrainer(TrainerConfig(
            dim=16, window=3, negatives=5, epochs=4, min_count=1,
            subsample_threshold=0.0, seed=2,
        ))
        trainer.fit(small_corpus)
        objectives = trainer.epoch_objectives_
        assert len(objectives) == 4
        assert objectives[-1] >= objectives[0]

    @pytest.mark.parametrize(
        "config",
        [
            TrainerConfig(dim=8, window=1, negatives=1, epochs=1, min_count=1,
                          subsample_threshold=0.0, seed=0),
            TrainerConfig(dim=32, window=5, negatives=5, epochs=2, min_count=2,
                          subsample_threshold=1e-3, seed=5),
            TrainerConfig(dim=8, window=2, negatives=7, epochs=2, min_count=1,
                          subsample_threshold=1e-2, seed=9, initial_lr=0.05),
        ],
    )
    def test_output_always_finite(self, small_corpus, config):
        store = train(small_corpus, config)
        assert np.all(np.isfinite(store.matrix))

    def test_multiple_workers_smoke(self, small_corpus):
        store = train(small_corpus, TrainerConfig(
            dim=16, window=3, negatives=3, epochs=2, min_count=1, seed=4, workers=3,
        ))
        assert np.all(np.isfinite(store.matrix))
        assert len(store) > 0

    def test_save_load_roundtrip(self, small_corpus):
        store = train(small_corpus, QUICK)
        buffer = io.StringIO()
        save_word2vec_text(store, buffer)
        reread = load_word2vec_text(io.StringIO(buffer.getvalue()))
        assert reread.words == store.words
        np.testing.assert_array_equal(reread.matrix, store.matrix)


class TestBackendSelection:
    def test_pure_always_available(self):
        name, module = resolve_backend("pure")
        assert name == "pure"
        assert hasattr(module, "train_chunk")

    def test_auto_resolves(self):
        name, _ = resolve_backend(None)
        assert name in ("compiled", "pure")

    def test_unknown_backend_rejected(self):
        with pytest.raises(ValueError):
            resolve_backend("gpu")

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("ASPECTKIT_SGNS_BACKEND", "pure")
        name, _ = resolve_backend(None)
        assert name == "pure"
