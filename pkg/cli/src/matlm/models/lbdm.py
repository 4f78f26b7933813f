"""
LDA-based document model: P_LBDM = λ·P + (1−λ)·θ·φ.

P_LBDM is never formed. Linear scores blend the structured LMD product with
the topic product; T = θ·φ is materialized only for small collections and
otherwise applied right to left as θ·(φ·q).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence, cast

import numpy as np

from matlm.config import LbdmConfig, ScoreMode
from matlm.corpus import Corpus, Query
from matlm.exceptions import DomainError
from matlm.kernels import Array, IndexArray, SparsePlusRank1, dense_matmul, readonly
from matlm.models.base import ScoreVector, require_terms, weighted_log_sum
from matlm.models.lmd import lmd_build_matrix, lmd_prob_oracle, lmd_score_batch
from matlm.topics import TopicParams

logger = logging.getLogger(__name__)

MODEL_NAME = "lbdm"


def lbdm_prob_oracle(
    corpus: Corpus,
    params: TopicParams,
    doc: int,
    term: int,
    mu: float,
    lambda_: float,
) -> float:
    """
    λ·p_LMD(w|D) + (1−λ)·Σ_z p(w|z)·p(z|D) for one cell.
    """
    if not 0.0 <= lambda_ <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lambda_}.")
    smoothed = lmd_prob_oracle(corpus, doc, term, mu)
    topical = 0.0
    for topic in range(params.k):
        topical += float(params.phi[topic, term]) * float(params.theta[doc, topic])
    return lambda_ * smoothed + (1.0 - lambda_) * topical


@dataclass(frozen=True, eq=False)
class LbdmModel:
    matrix: SparsePlusRank1
    theta: Array
    phi: Array
    lambda_: float
    topic_product: Array | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def topic_columns(self, cols: IndexArray) -> Array:
        """Columns of θ·φ, from the cached product when available."""
        if self.topic_product is not None:
            return cast(Array, self.topic_product[:, cols])
        return cast(Array, self.theta @ self.phi[:, cols])

    def topic_scores(self, block: Array) -> Array:
        """θ·φ·X evaluated without the m×n product unless it is cached."""
        if self.topic_product is not None:
            return cast(Array, self.topic_product @ block)
        return cast(Array, self.theta @ (self.phi @ block))

    def columns(self, cols: IndexArray) -> Array:
        smoothed = self.matrix.columns(cols)
        return cast(
            Array, self.lambda_ * smoothed + (1.0 - self.lambda_) * self.topic_columns(cols)
        )

    def to_dense(self) -> Array:
        return self.columns(np.arange(self.shape[1], dtype=np.int64))


def lbdm_build(corpus: Corpus, params: TopicParams, config: LbdmConfig) -> LbdmModel:
    params.check_matches(corpus)
    matrix = lmd_build_matrix(corpus, config.mu)

    cells = corpus.num_documents * corpus.num_terms
    topic_product: Array | None = None
    if cells <= config.topic_product_threshold:
        logger.debug("Materializing theta·phi (%d cells)", cells)
        topic_product = readonly(dense_matmul(params.theta, params.phi))
    else:
        logger.debug("theta·phi has %d cells; applying it factored per query", cells)

    return LbdmModel(
        matrix=matrix,
        theta=params.theta,
        phi=params.phi,
        lambda_=float(config.lambda_),
        topic_product=topic_product,
    )


def lbdm_score(
    model: LbdmModel,
    query: Query,
    mode: ScoreMode = ScoreMode.LOG,
) -> ScoreVector:
    return lbdm_score_batch(model, [query], mode)[0]


def lbdm_score_batch(
    model: LbdmModel,
    queries: Sequence[Query],
    mode: ScoreMode = ScoreMode.LOG,
) -> list[ScoreVector]:
    mode = ScoreMode(mode)
    cols = model.shape[1]
    for query in queries:
        if query.num_terms != cols:
            raise DomainError(
                f"Query {query.id!r} was built for {query.num_terms} terms, model has {cols}."
            )

    if mode is ScoreMode.LOG:
        results = []
        for query in queries:
            terms = require_terms(query, MODEL_NAME)
            scores = weighted_log_sum(model.columns(terms), query.counts)
            results.append(
                ScoreVector(scores=scores, model=MODEL_NAME, query_id=query.id, mode=mode)
            )
        return results

    smoothed = lmd_score_batch(model.matrix, queries, ScoreMode.LINEAR)
    block = np.zeros((cols, len(queries)), dtype=np.float64)
    for position, query in enumerate(queries):
        block[query.term_ids, position] = query.counts
    topical = model.topic_scores(block)

    weight = model.lambda_
    return [
        ScoreVector(
            scores=weight * lmd.scores + (1.0 - weight) * topical[:, position],
            model=MODEL_NAME,
            query_id=query.id,
            mode=mode,
        )
        for position, (query, lmd) in enumerate(zip(queries, smoothed))
    ]


@dataclass(frozen=True, eq=False)
class LbdmScorer:
    model: LbdmModel
    config: LbdmConfig
    name: str = MODEL_NAME

    @classmethod
    def build(cls, corpus: Corpus, params: TopicParams, config: LbdmConfig) -> LbdmScorer:
        return cls(model=lbdm_build(corpus, params, config), config=config)

    def score(self, query: Query) -> ScoreVector:
        return lbdm_score(self.model, query, self.config.score_mode)

    def score_batch(self, queries: Sequence[Query]) -> list[ScoreVector]:
        return lbdm_score_batch(self.model, queries, self.config.score_mode)
