"""
Topic-space indexing.

Terms, documents and queries become p(z|·) vectors:
W = φ·diag(1ᵀφ)⁻¹, D = W·Fᵀ·diag(N_d)⁻¹, Q = W·q̂ with q̂ the query MLE,
and documents are ranked by the cosine between their D column and Q.
p(z) is uniform, so p(z|w) is plain column normalization of φ.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence, cast

import numpy as np

from matlm.corpus import Corpus, Query
from matlm.exceptions import DomainError
from matlm.kernels import Array, col_normalize, cosine_columns, diag_inv_scale, readonly
from matlm.models.base import ScoreVector
from matlm.topics import TopicParams

logger = logging.getLogger(__name__)

MODEL_NAME = "ldi"


@dataclass(frozen=True, eq=False)
class LdiIndex:
    term_topics: Array
    doc_topics: Array

    @property
    def k(self) -> int:
        return int(self.term_topics.shape[0])


@dataclass(frozen=True, eq=False)
class TopicQuery:
    vector: Array
    query_id: str


def ldi_pzw_oracle(params: TopicParams, term: int) -> list[float]:
    column = [float(params.phi[topic, term]) for topic in range(params.k)]
    total = math.fsum(column)
    if total <= 0:
        raise DomainError(f"Term {term} is never generated by any topic.")
    return [value / total for value in column]


def ldi_pzd_oracle(corpus: Corpus, params: TopicParams, doc: int) -> list[float]:
    """
    Σ_w p(z|w)·n_w/N_w over the terms of one document.
    """
    length = float(corpus.doc_lengths[doc])
    result = [0.0] * params.k
    if length == 0:
        return result
    row = corpus.frequencies[doc]
    for term, count in zip(row.indices, row.data):
        weights = ldi_pzw_oracle(params, int(term))
        for topic in range(params.k):
            result[topic] += weights[topic] * (float(count) / length)
    return result


def ldi_pzq_oracle(params: TopicParams, query: Query) -> list[float]:
    if query.is_empty:
        raise DomainError(f"Query {query.id!r} has no in-vocabulary terms.")
    length = query.length
    result = [0.0] * params.k
    for term, count in zip(query.term_ids, query.counts):
        weights = ldi_pzw_oracle(params, int(term))
        for topic in range(params.k):
            result[topic] += weights[topic] * (float(count) / length)
    return result


def ldi_similarity_oracle(pzd: Sequence[float], pzq: Sequence[float]) -> float:
    dot = sum(a * b for a, b in zip(pzd, pzq))
    norm_d = math.sqrt(sum(a * a for a in pzd))
    norm_q = math.sqrt(sum(b * b for b in pzq))
    if norm_d == 0 or norm_q == 0:
        return 0.0
    return dot / (norm_d * norm_q)


def ldi_build(corpus: Corpus, params: TopicParams) -> LdiIndex:
    params.check_matches(corpus)
    try:
        term_topics = col_normalize(params.phi)
    except DomainError:
        sums = params.phi.sum(axis=0)
        term = int(np.flatnonzero(~(sums > 0))[0])
        raise DomainError(
            f"Term {corpus.vocab.terms[term]!r} (index {term}) is never generated by any "
            "topic; check that the wordmap matches the corpus."
        )

    # empty documents have no nonzeros, so any positive divisor leaves their row empty
    lengths = np.where(corpus.doc_lengths > 0, corpus.doc_lengths, 1.0)
    term_distribution = diag_inv_scale(lengths, corpus.frequencies)
    doc_topics = np.asarray(term_distribution @ term_topics.T).T

    empty = int((corpus.doc_lengths == 0).sum())
    if empty:
        logger.info("%d empty documents get zero topic vectors", empty)
    return LdiIndex(
        term_topics=readonly(term_topics),
        doc_topics=readonly(np.ascontiguousarray(doc_topics)),
    )


def ldi_query(index: LdiIndex, query: Query) -> TopicQuery:
    if query.num_terms != index.term_topics.shape[1]:
        raise DomainError(
            f"Query {query.id!r} was built for {query.num_terms} terms, "
            f"index has {index.term_topics.shape[1]}."
        )
    if query.is_empty:
        raise DomainError(
            f"Query {query.id!r} has no in-vocabulary terms and no topic representation."
        )
    weights = query.counts / query.length
    vector = index.term_topics[:, query.term_ids] @ weights
    return TopicQuery(vector=cast(Array, vector), query_id=query.id)


def ldi_score(index: LdiIndex, topic_query: TopicQuery) -> ScoreVector:
    scores = cosine_columns(index.doc_topics, topic_query.vector)
    return ScoreVector(scores=scores, model=MODEL_NAME, query_id=topic_query.query_id)


@dataclass(frozen=True, eq=False)
class LdiScorer:
    index: LdiIndex
    name: str = MODEL_NAME

    @classmethod
    def build(cls, corpus: Corpus, params: TopicParams) -> LdiScorer:
        return cls(index=ldi_build(corpus, params))

    def score(self, query: Query) -> ScoreVector:
        return ldi_score(self.index, ldi_query(self.index, query))

    def score_batch(self, queries: Sequence[Query]) -> list[ScoreVector]:
        return [self.score(query) for query in queries]
