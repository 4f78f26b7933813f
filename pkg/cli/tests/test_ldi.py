from __future__ import annotations

import numpy as np
import pytest
from matlm.corpus import build_corpus, build_query
from matlm.exceptions import DomainError
from matlm.models.ldi import (
    LdiScorer,
    TopicQuery,
    ldi_build,
    ldi_pzd_oracle,
    ldi_pzq_oracle,
    ldi_pzw_oracle,
    ldi_query,
    ldi_score,
    ldi_similarity_oracle,
)
from matlm.topics import TopicParams


def _random_query(rng, corpus, query_id="q", size=4):
    tokens = [corpus.vocab.terms[int(i)] for i in rng.integers(0, corpus.num_terms, size)]
    return build_query(query_id, tokens, corpus.vocab)


def test_term_topic_distributions(golden_corpus, ldi_params):
    index = ldi_build(golden_corpus, ldi_params)
    np.testing.assert_allclose(
        index.term_topics, [[1.0, 0.5, 0.0], [0.0, 0.5, 1.0]], rtol=0, atol=1e-15
    )
    assert ldi_pzw_oracle(ldi_params, 1) == [0.5, 0.5]


def test_single_topic_gives_unit_term_vectors(golden_corpus):
    params = TopicParams(theta=np.ones((2, 1)), phi=np.array([[0.2, 0.3, 0.5]]))
    index = ldi_build(golden_corpus, params)
    assert np.array_equal(index.term_topics, np.ones((1, 3)))

    query = build_query("q", ["a", "c"], golden_corpus.vocab)
    scores = ldi_score(index, ldi_query(index, query)).scores
    np.testing.assert_allclose(scores, [1.0, 1.0], rtol=0, atol=1e-15)


def test_symmetric_topics_split_evenly(golden_corpus):
    params = TopicParams(
        theta=np.full((2, 2), 0.5), phi=np.array([[0.2, 0.3, 0.5], [0.2, 0.3, 0.5]])
    )
    index = ldi_build(golden_corpus, params)
    np.testing.assert_allclose(index.term_topics, np.full((2, 3), 0.5), rtol=0, atol=1e-15)


def test_document_topic_vectors(golden_corpus, ldi_params):
    index = ldi_build(golden_corpus, ldi_params)
    np.testing.assert_allclose(index.doc_topics[:, 0], [0.8333, 0.1667], rtol=0, atol=1e-4)
    np.testing.assert_allclose(index.doc_topics[:, 0], [5 / 6, 1 / 6], rtol=0, atol=1e-12)
    np.testing.assert_allclose(index.doc_topics[:, 1], [0.25, 0.75], rtol=0, atol=1e-12)


def test_single_term_document_copies_its_term_vector(ldi_params):
    corpus = build_corpus([["a", "a", "a"], ["b", "c"], ["c"]])
    params = TopicParams(theta=np.full((3, 2), 0.5), phi=ldi_params.phi)
    index = ldi_build(corpus, params)
    np.testing.assert_allclose(index.doc_topics[:, 0], [1.0, 0.0], rtol=0, atol=1e-15)
    np.testing.assert_allclose(index.doc_topics[:, 2], [0.0, 1.0], rtol=0, atol=1e-15)


def test_empty_document_scores_zero(ldi_params, caplog):
    corpus = build_corpus([["a", "a", "b"], [], ["b", "c"]])
    params = TopicParams(theta=np.full((3, 2), 0.5), phi=ldi_params.phi)
    with caplog.at_level("INFO"):
        index = ldi_build(corpus, params)
    assert "1 empty documents" in caplog.text
    assert np.array_equal(index.doc_topics[:, 1], [0.0, 0.0])

    scores = ldi_score(index, ldi_query(index, build_query("q", ["a"], corpus.vocab))).scores
    assert scores[1] == 0.0
    assert ldi_pzd_oracle(corpus, params, 1) == [0.0, 0.0]


def test_query_topic_vectors(golden_corpus, ldi_params):
    index = ldi_build(golden_corpus, ldi_params)
    cases = {("a",): [1.0, 0.0], ("a", "b"): [0.75, 0.25], ("b",): [0.5, 0.5]}
    for tokens, expected in cases.items():
        query = build_query("q", list(tokens), golden_corpus.vocab)
        topic_query = ldi_query(index, query)
        np.testing.assert_allclose(topic_query.vector, expected, rtol=0, atol=1e-15)
        assert topic_query.query_id == "q"


def test_out_of_vocabulary_query_is_rejected(golden_corpus, ldi_params):
    index = ldi_build(golden_corpus, ldi_params)
    query = build_query("q9", ["zzz", "yyy"], golden_corpus.vocab)
    with pytest.raises(DomainError, match="no in-vocabulary terms"):
        ldi_query(index, query)
    with pytest.raises(DomainError, match="no in-vocabulary terms"):
        ldi_pzq_oracle(ldi_params, query)


def test_cosine_scores(golden_corpus, ldi_params):
    index = ldi_build(golden_corpus, ldi_params)
    query = build_query("q1", ["a"], golden_corpus.vocab)
    scores = ldi_score(index, ldi_query(index, query))
    assert scores.scores[0] == pytest.approx(0.9806, abs=1e-4)
    assert scores.scores[0] == pytest.approx(5 / np.sqrt(26), abs=1e-12)
    assert scores.model == "ldi"
    assert ldi_similarity_oracle([5 / 6, 1 / 6], [1.0, 0.0]) == pytest.approx(0.9806, abs=1e-4)


def test_similarity_oracle_handles_zero_vectors():
    assert ldi_similarity_oracle([0.0, 0.0], [1.0, 0.0]) == 0.0


def test_index_matches_oracles_on_random_instances(random_instance):
    rng = np.random.default_rng(616)
    for _ in range(100):
        corpus, params = random_instance(rng)
        index = ldi_build(corpus, params)

        expected_w = np.array([ldi_pzw_oracle(params, term) for term in range(corpus.num_terms)])
        np.testing.assert_allclose(index.term_topics, expected_w.T, rtol=1e-12, atol=1e-15)

        expected_d = np.array(
            [ldi_pzd_oracle(corpus, params, doc) for doc in range(corpus.num_documents)]
        )
        np.testing.assert_allclose(index.doc_topics, expected_d.T, rtol=1e-12, atol=1e-15)

        query = _random_query(rng, corpus)
        topic_query = ldi_query(index, query)
        expected_q = ldi_pzq_oracle(params, query)
        np.testing.assert_allclose(topic_query.vector, expected_q, rtol=1e-12, atol=1e-15)

        scores = ldi_score(index, topic_query).scores
        expected_scores = [ldi_similarity_oracle(column, expected_q) for column in expected_d]
        np.testing.assert_allclose(scores, expected_scores, rtol=1e-12, atol=1e-12)


def test_topic_vectors_are_distributions(random_instance):
    rng = np.random.default_rng(7)
    for _ in range(30):
        corpus, params = random_instance(rng)
        index = ldi_build(corpus, params)
        assert np.all(np.abs(index.term_topics.sum(axis=0) - 1.0) <= 1e-12)

        nonempty = corpus.doc_lengths > 0
        column_sums = index.doc_topics.sum(axis=0)
        assert np.all(np.abs(column_sums[nonempty] - 1.0) <= 1e-12)
        assert np.all(column_sums[~nonempty] == 0.0)

        vector = ldi_query(index, _random_query(rng, corpus)).vector
        assert abs(vector.sum() - 1.0) <= 1e-12
        assert np.all(vector >= 0.0)


def test_query_vector_scaling_leaves_scores_unchanged(random_instance):
    rng = np.random.default_rng(19)
    for _ in range(20):
        corpus, params = random_instance(rng)
        index = ldi_build(corpus, params)
        topic_query = ldi_query(index, _random_query(rng, corpus))
        base = ldi_score(index, topic_query).scores
        assert np.all((base >= 0.0) & (base <= 1.0))

        for factor in (1e-6, 1e-3, 7.0, 1e6):
            scaled = TopicQuery(vector=factor * topic_query.vector, query_id=topic_query.query_id)
            np.testing.assert_allclose(
                ldi_score(index, scaled).scores, base, rtol=1e-12, atol=1e-15
            )

        query = _random_query(rng, corpus)
        np.testing.assert_allclose(
            ldi_query(index, query.scaled(7.0)).vector,
            ldi_query(index, query).vector,
            rtol=1e-15,
            atol=0.0,
        )


def test_permuting_topics_leaves_scores_unchanged(random_instance):
    rng = np.random.default_rng(23)
    for _ in range(20):
        corpus, params = random_instance(rng)
        order = rng.permutation(params.k)
        permuted = TopicParams(theta=params.theta[:, order], phi=params.phi[order, :])
        query = _random_query(rng, corpus)

        original = LdiScorer.build(corpus, params).score(query).scores
        shuffled = LdiScorer.build(corpus, permuted).score(query).scores
        np.testing.assert_allclose(shuffled, original, rtol=1e-12, atol=1e-15)


def test_term_without_topic_mass_is_rejected(golden_corpus):
    params = TopicParams(
        theta=np.full((2, 2), 0.5), phi=np.array([[0.5, 0.5, 0.0], [0.4, 0.6, 0.0]])
    )
    with pytest.raises(DomainError, match="Term 'c' \\(index 2\\)"):
        ldi_build(golden_corpus, params)
