import numpy as np
import pytest

from aspectkit.attention import AttentionConfig
from aspectkit.candidates import top_n_nouns
from aspectkit.embeddings import VectorStore
from aspectkit.errors import OOVError
from aspectkit.labeler import (
    DEFAULT_LABELS,
    LabelDefinition,
    LabelMatrix,
    assign_label,
    build_label_vectors,
    label_corpus,
    label_sentence,
)

from conftest import corpus_of, sent


@pytest.fixture
def store():
    words = ["food", "staff", "ambience", "bread", "waiter", "decor", "the"]
    matrix = np.array(
        [
            [1.0, 0.0, 0.0],   # food
            [0.0, 1.0, 0.0],   # staff
            [0.0, 0.0, 1.0],   # ambience
            [0.9, 0.1, 0.0],   # bread: close to food
            [0.1, 0.9, 0.0],   # waiter: close to staff
            [0.0, 0.1, 0.9],   # decor: close to ambience
            [0.3, 0.3, 0.3],   # the
        ],
        dtype=np.float32,
    )
    return VectorStore(words, matrix)


@pytest.fixture
def labels(store):
    return build_label_vectors(
        store, (LabelDefinition("food"), LabelDefinition("staff"), LabelDefinition("ambience"))
    )


@pytest.fixture
def candidates(store):
    corpus = corpus_of(
        sent("bread waiter decor food staff ambience", "NOUN NOUN NOUN NOUN NOUN NOUN")
    )
    return top_n_nouns(corpus, store, 6)


class TestLabelDefinition:
    def test_terms_default_to_name(self):
        assert LabelDefinition("food").query_terms == ("food",)

    def test_explicit_terms_kept(self):
        d = LabelDefinition("staff", ("staff", "service"))
        assert d.query_terms == ("staff", "service")

    def test_default_labels_cover_spelling_variants(self):
        by_name = {d.name: d for d in DEFAULT_LABELS}
        assert "service" in by_name["staff"].query_terms
        assert "ambiance" in by_name["ambience"].query_terms


class TestBuildLabelVectors:
    def test_single_term_equals_its_vector(self, store):
        matrix = build_label_vectors(store, (LabelDefinition("food"),))
        np.testing.assert_array_equal(matrix.matrix[0], [1.0, 0.0, 0.0])

    def test_two_terms_mean(self, store):
        matrix = build_label_vectors(
            store, (LabelDefinition("mixed", ("food", "staff")),)
        )
        np.testing.assert_array_equal(matrix.matrix[0], [0.5, 0.5, 0.0])

    def test_unresolved_terms_skipped(self, store):
        matrix = build_label_vectors(
            store, (LabelDefinition("food", ("food", "zzzz")),)
        )
        np.testing.assert_array_equal(matrix.matrix[0], [1.0, 0.0, 0.0])

    def test_fully_oov_definition_names_the_label(self, store):
        with pytest.raises(OOVError, match="mystery"):
            build_label_vectors(store, (LabelDefinition("mystery", ("zzzz",)),))


class TestAssignLabel:
    def test_exact_match_on_orthogonal_labels(self, labels):
        label, sims = assign_label(np.array([1.0, 0.0, 0.0]), labels)
        assert label == "food"
        assert sims[0] == pytest.approx(1.0, abs=1e-12)

    def test_positive_scaling_invariance(self, labels):
        rng = np.random.default_rng(3)
        for _ in range(25):
            summary = rng.normal(size=3)
            for k in (0.001, 0.5, 7.0, 1e4):
                base_label, base_sims = assign_label(summary, labels)
                scaled_label, scaled_sims = assign_label(k * summary, labels)
                assert scaled_label == base_label
                np.testing.assert_allclose(scaled_sims, base_sims, atol=1e-9)

    def test_tie_breaks_toward_earlier_label(self):
        matrix = LabelMatrix(("food", "staff"), np.array([[1.0, 0.0], [1.0, 0.0]]))
        label, _ = assign_label(np.array([2.0, 0.0]), matrix)
        assert label == "food"

    def test_zero_norm_summary_abstains(self, labels):
        label, sims = assign_label(np.zeros(3), labels)
        assert label is None
        assert sims is None

    def test_dimension_mismatch(self, labels):
        with pytest.raises(ValueError):
            assign_label(np.ones(5), labels)


class TestLabelSentence:
    def test_single_known_token_reduces_to_cosine_lookup(self, store, labels, candidates):
        sentence = sent("zzz bread qqq", "OTHER NOUN OTHER")
        result = label_sentence(sentence, store, candidates, labels, "cat")
        assert result.label == "food"
        vec = store.lookup("bread").astype(np.float64)
        expected = {
            name: float(np.dot(vec, row) / (np.linalg.norm(vec) * np.linalg.norm(row)))
            for name, row in zip(labels.labels, labels.matrix)
        }
        for name, value in expected.items():
            assert result.similarities[name] == pytest.approx(value, abs=1e-12)

    def test_all_oov_abstains(self, store, labels, candidates):
        result = label_sentence(sent("zzz qqq"), store, candidates, labels, "cat")
        assert result.abstained
        assert result.similarities is None
        assert result.attention is None

    def test_gamma_zero_cat_equals_mean(self, store, labels, candidates):
        rng = np.random.default_rng(8)
        vocab = list(store.words) + ["zzz", "qqq"]
        for _ in range(100):
            words = rng.choice(vocab, size=rng.integers(1, 8))
            sentence = sent(" ".join(words))
            cat = label_sentence(
                sentence, store, candidates, labels, "cat", AttentionConfig(0.0)
            )
            mean = label_sentence(sentence, store, candidates, labels, "mean")
            assert cat.label == mean.label

    def test_weights_cover_positions_and_sum_to_one(self, store, labels, candidates):
        sentence = sent("bread zzz waiter", "NOUN OTHER NOUN")
        result = label_sentence(sentence, store, candidates, labels, "cat")
        att = result.attention
        assert att.weights.shape == (3,)
        assert att.weights[1] == 0.0
        assert att.skipped_positions == (1,)
        assert att.weights.sum() == pytest.approx(1.0, abs=1e-9)

    def test_unknown_method_rejected(self, store, labels, candidates):
        with pytest.raises(ValueError):
            label_sentence(sent("bread", "NOUN"), store, candidates, labels, "bogus")

    def test_attention_method_uses_mean_candidate_query(self, store, labels, candidates):
        sentence = sent("bread waiter", "NOUN NOUN")
        result = label_sentence(sentence, store, candidates, labels, "attention")
        assert result.label in labels.labels
        assert result.attention.weights.sum() == pytest.approx(1.0, abs=1e-9)

    def test_deterministic(self, store, labels, candidates):
        sentence = sent("bread waiter decor", "NOUN NOUN NOUN")
        first = label_sentence(sentence, store, candidates, labels, "cat")
        second = label_sentence(sentence, store, candidates, labels, "cat")
        assert first.label == second.label
        assert first.similarities == second.similarities
        np.testing.assert_array_equal(first.attention.weights, second.attention.weights)


class TestLabelCorpus:
    def test_matches_per_sentence_calls(self, store, labels, candidates):
        corpus = corpus_of(
            sent("bread waiter", "NOUN NOUN"),
            sent("zzz"),
            sent("decor decor", "NOUN NOUN"),
        )
        batch = label_corpus(corpus, store, candidates, labels, "cat")
        single = [
            label_sentence(s, store, candidates, labels, "cat") for s in corpus
        ]
        assert [r.label for r in batch] == [r.label for r in single]
        assert len(batch) == len(corpus)
