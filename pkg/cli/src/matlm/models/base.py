from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from matlm.config import ScoreMode
from matlm.corpus import Query
from matlm.exceptions import DomainError
from matlm.kernels import Array, IndexArray


@dataclass(frozen=True, eq=False)
class ScoreVector:
    """One score per document for a single query."""

    scores: Array
    model: str
    query_id: str
    mode: ScoreMode | None = None

    def __len__(self) -> int:
        return int(self.scores.size)


class Scorer(Protocol):
    name: str

    def score(self, query: Query) -> ScoreVector: ...

    def score_batch(self, queries: Sequence[Query]) -> list[ScoreVector]: ...


def weighted_log_sum(probabilities: Array, counts: Array) -> Array:
    """
    Σ_w f_q(w)·ln p over the query columns of an m×|q| probability block.

    Zero probabilities produce -inf scores rather than warnings.
    """
    with np.errstate(divide="ignore"):
        logs = np.log(probabilities)
    return np.asarray((logs * counts).sum(axis=1), dtype=np.float64)


def require_terms(query: Query, model: str) -> IndexArray:
    if query.is_empty:
        raise DomainError(
            f"Query {query.id!r} has no in-vocabulary terms; "
            f"log-mode {model} scores are undefined."
        )
    return query.term_ids
