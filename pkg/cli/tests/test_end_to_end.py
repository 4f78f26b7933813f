from __future__ import annotations

import time

import numpy as np
import pytest
from matlm.config import LbdmConfig, ScoreMode
from matlm.corpus import build_query, synthesize_corpus
from matlm.models.lbdm import lbdm_build, lbdm_score
from matlm.models.lmd import lmd_build_matrix, lmd_score
from matlm.ranking import rank_scores
from matlm.topics import synthesize_topic_params


@pytest.mark.end_to_end
def test_large_collection_scores_without_dense_matrix():
    corpus = synthesize_corpus(seed=0, m=50_000, n=100_000, tokens_per_doc=200)
    matrix = lmd_build_matrix(corpus, mu=2000.0)

    m, n = matrix.shape
    nnz = corpus.frequencies.nnz
    assert matrix.storage_bytes <= 32 * (nnz + m + n)
    assert matrix.storage_bytes < m * n

    query = build_query("q1", ["t10", "t2000", "t99999"], corpus.vocab)
    for mode in ScoreMode:
        started = time.perf_counter()
        scores = lmd_score(matrix, query, mode).scores
        elapsed = time.perf_counter() - started
        assert elapsed < 1.0, f"{mode.value} scoring took {elapsed:.3f}s"
        assert scores.shape == (m,)
        assert np.all(np.isfinite(scores))

    ranked = rank_scores("q1", scores, corpus.doc_ids, 1000)
    assert len(ranked) == 1000


@pytest.mark.end_to_end
def test_large_lbdm_applies_topic_product_per_query():
    corpus = synthesize_corpus(seed=1, m=20_000, n=8_000, tokens_per_doc=50)
    params = synthesize_topic_params(seed=1, m=20_000, n=8_000, k=20)
    model = lbdm_build(corpus, params, LbdmConfig(mu=1000.0, lambda_=0.7))
    assert model.topic_product is None

    query = build_query("q1", ["t1", "t2", "t3", "t3"], corpus.vocab)
    for mode in ScoreMode:
        scores = lbdm_score(model, query, mode).scores
        assert scores.shape == (20_000,)
        assert np.all(np.isfinite(scores))
