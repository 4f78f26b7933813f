"""
Dirichlet-smoothed query likelihood.

P = diag(N_d + μ)⁻¹·F + diag(μ/(N_d + μ))·1·(C/|C|)ᵀ is kept as a
SparsePlusRank1 so scoring touches only F's nonzeros and two vectors.
The collection model is C divided by the token total, which keeps every
cell equal to the elementwise estimate and every row stochastic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from matlm.config import ScoreMode, SmoothConfig
from matlm.corpus import Corpus, Query
from matlm.exceptions import DomainError
from matlm.kernels import SparsePlusRank1, readonly, spr1_matmat, spr1_matvec
from matlm.models.base import ScoreVector, require_terms, weighted_log_sum

logger = logging.getLogger(__name__)

MODEL_NAME = "lmd"


def lmd_prob_oracle(corpus: Corpus, doc: int, term: int, mu: float) -> float:
    """
    p(w|D) = |D|/(|D|+μ)·n_w/N_w + μ/(|D|+μ)·n_w^C/N_w^C, one cell at a time.
    """
    if mu < 0:
        raise DomainError(f"mu must be nonnegative, got {mu}.")
    if not (0 <= doc < corpus.num_documents and 0 <= term < corpus.num_terms):
        raise DomainError(f"Cell ({doc}, {term}) is outside the corpus.")
    length = float(corpus.doc_lengths[doc])
    if mu == 0 and length == 0:
        raise DomainError(f"Document {doc} is empty and mu is 0; p(w|D) is 0/0.")
    if corpus.total_tokens == 0:
        raise DomainError("The collection has no tokens; p(w|C) is undefined.")

    count = float(corpus.frequencies[doc, term])
    document_mle = count / length if length > 0 else 0.0
    collection_mle = float(corpus.collection_frequencies[term]) / corpus.total_tokens
    weight = length / (length + mu)
    return weight * document_mle + (mu / (length + mu)) * collection_mle


def lmd_build_matrix(corpus: Corpus, mu: float) -> SparsePlusRank1:
    if mu < 0 or not np.isfinite(mu):
        raise DomainError(f"mu must be a finite nonnegative number, got {mu}.")
    if corpus.total_tokens == 0:
        raise DomainError("The collection has no tokens; p(w|C) is undefined.")

    denominators = corpus.doc_lengths + mu
    if mu == 0 and (corpus.doc_lengths == 0).any():
        row = int(np.flatnonzero(corpus.doc_lengths == 0)[0])
        raise DomainError(f"Document {row} is empty; mu=0 leaves its row undefined.")

    collection_model = corpus.collection_frequencies / float(corpus.total_tokens)
    return SparsePlusRank1(
        scale=readonly(1.0 / denominators),
        sparse=corpus.frequencies,
        left=readonly(mu / denominators),
        right=readonly(collection_model),
    )


def lmd_score(
    matrix: SparsePlusRank1,
    query: Query,
    mode: ScoreMode = ScoreMode.LOG,
) -> ScoreVector:
    mode = ScoreMode(mode)
    rows, cols = matrix.shape
    if query.num_terms != cols:
        raise DomainError(
            f"Query {query.id!r} was built for {query.num_terms} terms, model has {cols}."
        )

    if mode is ScoreMode.LINEAR:
        if query.is_empty:
            scores = np.zeros(rows, dtype=np.float64)
        else:
            scores = spr1_matvec(matrix, query.to_dense())
    else:
        terms = require_terms(query, MODEL_NAME)
        scores = weighted_log_sum(matrix.columns(terms), query.counts)

    return ScoreVector(scores=scores, model=MODEL_NAME, query_id=query.id, mode=mode)


def lmd_score_batch(
    matrix: SparsePlusRank1,
    queries: Sequence[Query],
    mode: ScoreMode = ScoreMode.LOG,
) -> list[ScoreVector]:
    """
    Score many queries; linear mode multiplies the whole query matrix at once.
    """
    mode = ScoreMode(mode)
    if mode is not ScoreMode.LINEAR or not queries:
        return [lmd_score(matrix, query, mode) for query in queries]

    cols = matrix.shape[1]
    block = np.zeros((cols, len(queries)), dtype=np.float64)
    for position, query in enumerate(queries):
        if query.num_terms != cols:
            raise DomainError(
                f"Query {query.id!r} was built for {query.num_terms} terms, model has {cols}."
            )
        block[query.term_ids, position] = query.counts

    scores = spr1_matmat(matrix, block)
    return [
        ScoreVector(
            scores=np.ascontiguousarray(scores[:, position]),
            model=MODEL_NAME,
            query_id=query.id,
            mode=mode,
        )
        for position, query in enumerate(queries)
    ]


@dataclass(frozen=True, eq=False)
class LmdScorer:
    matrix: SparsePlusRank1
    config: SmoothConfig
    name: str = MODEL_NAME

    @classmethod
    def build(cls, corpus: Corpus, config: SmoothConfig) -> LmdScorer:
        logger.debug("Building LMD matrix with mu=%g", config.mu)
        return cls(matrix=lmd_build_matrix(corpus, config.mu), config=config)

    def score(self, query: Query) -> ScoreVector:
        return lmd_score(self.matrix, query, self.config.score_mode)

    def score_batch(self, queries: Sequence[Query]) -> list[ScoreVector]:
        return lmd_score_batch(self.matrix, queries, self.config.score_mode)
