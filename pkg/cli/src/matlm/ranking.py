from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import polars as pl
from tqdm.auto import tqdm

from matlm.config import ModelName, RunConfig
from matlm.corpus import Corpus, Query, load_corpus_file, load_queries_file
from matlm.exceptions import ConfigError, DataFileError, DomainError
from matlm.kernels import Array
from matlm.models import LbdmScorer, LdiScorer, LmdScorer, ScoreVector, Scorer
from matlm.topics import load_topic_params
from matlm.utils.file import read_text_lines, save_json_report, write_text_lines

logger = logging.getLogger(__name__)

# m x batch_size dense score block per chunk
QUERY_BATCH_SIZE = 64


@dataclass(frozen=True)
class RankedEntry:
    doc_id: str
    rank: int
    score: float


@dataclass(frozen=True)
class RankedList:
    query_id: str
    entries: tuple[RankedEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class RunResult:
    lists: list[RankedList]
    diagnostics: list[dict[str, Any]] = field(default_factory=list)


def rank_scores(
    query_id: str,
    scores: Array,
    doc_ids: Sequence[str],
    top_k: int,
) -> RankedList:
    """
    Sort by descending score, ties by ascending document index, keep top_k.
    """
    if top_k < 1:
        raise DomainError("top_k must be positive.")
    if scores.size != len(doc_ids):
        raise DomainError(f"Got {scores.size} scores for {len(doc_ids)} documents.")

    ranked = (
        pl.DataFrame(
            {
                "doc_index": np.arange(scores.size, dtype=np.int64),
                "score": np.asarray(scores, dtype=np.float64),
            }
        )
        .sort(["score", "doc_index"], descending=[True, False])
        .head(top_k)
    )

    entries = tuple(
        RankedEntry(doc_id=doc_ids[index], rank=position, score=float(score))
        for position, (index, score) in enumerate(
            zip(ranked["doc_index"].to_list(), ranked["score"].to_list()), start=1
        )
    )
    return RankedList(query_id=query_id, entries=entries)


def build_scorer(config: RunConfig, corpus: Corpus) -> Scorer:
    """
    Construct the configured model; only topic models read θ/φ files.
    """
    if config.model is ModelName.LMD:
        if config.theta or config.phi or config.wordmap:
            logger.debug("Ignoring topic parameter paths for model 'lmd'")
        return LmdScorer.build(corpus, config.smoothing)

    if config.theta is None or config.phi is None or config.wordmap is None:
        raise ConfigError(f"model '{config.model.value}' requires theta, phi and wordmap paths")
    params = load_topic_params(
        config.theta, config.phi, config.wordmap, corpus, others_path=config.others
    )
    if config.model is ModelName.LBDM:
        return LbdmScorer.build(corpus, params, config.lbdm)
    return LdiScorer.build(corpus, params)


def _score_chunk(scorer: Scorer, chunk: Sequence[Query]) -> list[ScoreVector | DomainError]:
    try:
        return list(scorer.score_batch(chunk))
    except DomainError:
        pass
    # rescore one by one so the failure is attributed to its query
    outcomes: list[ScoreVector | DomainError] = []
    for query in chunk:
        try:
            outcomes.append(scorer.score(query))
        except DomainError as exc:
            outcomes.append(exc)
    return outcomes


def rank_queries(
    scorer: Scorer,
    queries: Sequence[Query],
    doc_ids: Sequence[str],
    top_k: int,
    show_progress: bool = False,
    batch_size: int = QUERY_BATCH_SIZE,
) -> RunResult:
    """
    Score queries in chunks of `batch_size`; linear LMD and LBDM take one matrix product
    per chunk.
    """
    if batch_size < 1:
        raise DomainError("batch_size must be positive.")

    result = RunResult(lists=[])
    with tqdm(
        total=len(queries), desc="Scoring queries", unit="query", disable=not show_progress
    ) as progress:
        for start in range(0, len(queries), batch_size):
            chunk = queries[start : start + batch_size]
            for query, outcome in zip(chunk, _score_chunk(scorer, chunk)):
                entry: dict[str, Any] = {"query_id": query.id}
                if query.dropped_terms:
                    entry["dropped_terms"] = list(query.dropped_terms)
                if isinstance(outcome, DomainError):
                    logger.warning("Query %s skipped: %s", query.id, outcome)
                    entry["error"] = str(outcome)
                    result.diagnostics.append(entry)
                    continue
                if len(entry) > 1:
                    result.diagnostics.append(entry)
                result.lists.append(rank_scores(query.id, outcome.scores, doc_ids, top_k))
            progress.update(len(chunk))
    return result


def rank(config: RunConfig) -> RunResult:
    corpus = load_corpus_file(config.corpus, docids_path=config.docids)
    queries = load_queries_file(config.queries, corpus.vocab)
    logger.info("Loaded %d queries from %s", len(queries), config.queries)

    scorer = build_scorer(config, corpus)
    return rank_queries(
        scorer,
        queries,
        corpus.doc_ids,
        config.top_k,
        show_progress=config.show_progress,
    )


def format_trec_line(query_id: str, entry: RankedEntry, run_tag: str) -> str:
    return f"{query_id} Q0 {entry.doc_id} {entry.rank} {entry.score:.6f} {run_tag}"


def write_trec_run(lists: Sequence[RankedList], run_tag: str, path: Path) -> Path:
    return write_text_lines(
        (
            format_trec_line(ranked.query_id, entry, run_tag)
            for ranked in lists
            for entry in ranked.entries
        ),
        path,
    )


def write_diagnostics(result: RunResult, config: RunConfig) -> Path:
    report = {
        "model": config.model.value,
        "run_tag": config.run_tag,
        "ranked_queries": len(result.lists),
        "queries": result.diagnostics,
    }
    return save_json_report(report, config.diagnostics_file)


def read_trec_run(path: Path) -> dict[str, list[tuple[str, int, float]]]:
    runs: dict[str, list[tuple[str, int, float]]] = {}
    for number, line in enumerate(read_text_lines(path), start=1):
        fields = line.split(" ")
        if len(fields) != 6 or fields[1] != "Q0":
            raise DataFileError(
                path, "expected '<qid> Q0 <docid> <rank> <score> <tag>'", line=number
            )
        query_id, _, doc_id, rank_text, score_text, _ = fields
        try:
            runs.setdefault(query_id, []).append((doc_id, int(rank_text), float(score_text)))
        except ValueError:
            raise DataFileError(path, "rank or score is not numeric", line=number)
    return runs
