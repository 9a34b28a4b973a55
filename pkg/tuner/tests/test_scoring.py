import numpy as np
import pytest

from masktune import (
    TEMPLATES,
    base_prediction_rows,
    emit_base_predictions,
    score_articles,
    score_mask,
)


class TestScoreMask:
    def test_full_vocabulary_distribution(self, model_and_tokenizer):
        model, tokenizer = model_and_tokenizer
        scores = score_mask(model, tokenizer, "[MASK]: the article contains a")
        assert scores.vocab_probs.shape == (len(tokenizer.get_vocab()),)
        assert scores.vocab_probs.sum() == pytest.approx(1.0, abs=1e-6)
        assert (scores.vocab_probs >= 0).all()

    def test_answer_probs_are_distribution_entries(self, model_and_tokenizer):
        model, tokenizer = model_and_tokenizer
        scores = score_mask(model, tokenizer, "[MASK]: the article contains a")
        news_id = tokenizer.convert_tokens_to_ids("news")
        rumor_id = tokenizer.convert_tokens_to_ids("rumor")
        assert scores.answer_probs[0] == scores.vocab_probs[news_id]
        assert scores.answer_probs[1] == scores.vocab_probs[rumor_id]

    def test_repeated_calls_are_deterministic(self, model_and_tokenizer):
        model, tokenizer = model_and_tokenizer
        first = score_mask(model, tokenizer, "[MASK]: the a the a")
        second = score_mask(model, tokenizer, "[MASK]: the a the a")
        np.testing.assert_array_equal(first.vocab_probs, second.vocab_probs)

    def test_missing_mask_rejected(self, model_and_tokenizer):
        model, tokenizer = model_and_tokenizer
        with pytest.raises(ValueError, match="exactly one mask"):
            score_mask(model, tokenizer, "no mask in sight")

    def test_multiple_masks_rejected(self, model_and_tokenizer):
        model, tokenizer = model_and_tokenizer
        with pytest.raises(ValueError, match="exactly one mask"):
            score_mask(model, tokenizer, "[MASK] and [MASK]: text")


class TestBasePredictionRows:
    def test_equal_answer_scores_emit_uniform(self):
        rows = base_prediction_rows(np.array([[0.2, 0.2]]))
        np.testing.assert_allclose(rows, [[0.5, 0.5]], atol=1e-15)

    def test_matches_softmax_oracle(self):
        rng = np.random.default_rng(2)
        probs = rng.random((50, 2))
        rows = base_prediction_rows(probs)
        oracle = np.exp(probs) / np.exp(probs).sum(axis=1, keepdims=True)
        np.testing.assert_allclose(rows, oracle, atol=1e-9)

    def test_logit_space_variant_renormalizes(self):
        rows = base_prediction_rows(np.array([[0.3, 0.1]]), logit_space=True)
        np.testing.assert_allclose(rows, [[0.75, 0.25]], atol=1e-12)

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(3)
        rows = base_prediction_rows(rng.random((100, 2)) * 0.01)
        np.testing.assert_allclose(rows.sum(axis=1), 1.0, atol=1e-9)


class TestEmission:
    def test_file_format_and_row_sums(self, model_and_tokenizer, article_corpus, tmp_path):
        model, tokenizer = model_and_tokenizer
        out = tmp_path / "pred.csv"
        rows = emit_base_predictions(model, tokenizer, article_corpus, TEMPLATES["P1"], out)
        lines = out.read_text().splitlines()
        assert lines[0] == "article_id,p_real,p_fake"
        assert len(lines) == 1 + len(article_corpus)
        parsed = np.array([[float(x) for x in line.split(",")[1:]] for line in lines[1:]])
        np.testing.assert_allclose(parsed.sum(axis=1), 1.0, atol=1e-9)
        np.testing.assert_allclose(parsed, rows, atol=1e-16)

    def test_emission_matches_scoring_plus_softmax(self, model_and_tokenizer,
                                                   article_corpus, tmp_path):
        model, tokenizer = model_and_tokenizer
        texts = [a.text for a in article_corpus]
        answer_probs = score_articles(model, tokenizer, texts, TEMPLATES["P1"])
        expected = np.exp(answer_probs) / np.exp(answer_probs).sum(axis=1, keepdims=True)
        rows = emit_base_predictions(model, tokenizer, article_corpus, TEMPLATES["P1"],
                                     tmp_path / "p.csv")
        np.testing.assert_allclose(rows, expected, atol=1e-9)

    def test_batched_scoring_matches_single(self, model_and_tokenizer, article_corpus):
        model, tokenizer = model_and_tokenizer
        texts = [a.text for a in article_corpus[:5]]
        batched = score_articles(model, tokenizer, texts, TEMPLATES["P1"], batch_size=2)
        single = score_articles(model, tokenizer, texts, TEMPLATES["P1"], batch_size=1)
        np.testing.assert_allclose(batched, single, atol=1e-6)
