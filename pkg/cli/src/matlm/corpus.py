from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence, cast

import numpy as np
from scipy import sparse

from matlm.exceptions import DataFileError, DomainError
from matlm.kernels import Array, IndexArray, as_frequency_matrix, readonly
from matlm.utils.file import read_text_lines

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Vocabulary:
    """
    Bijection between terms and dense indices in [0, n).
    """

    terms: tuple[str, ...]
    index: Mapping[str, int] = field(repr=False)

    @classmethod
    def from_terms(cls, terms: Iterable[str]) -> Vocabulary:
        ordered = tuple(terms)
        index = {term: position for position, term in enumerate(ordered)}
        if len(index) != len(ordered):
            raise DomainError("Vocabulary terms must be unique.")
        return cls(terms=ordered, index=index)

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: object) -> bool:
        return term in self.index

    def get(self, term: str) -> int | None:
        return self.index.get(term)


@dataclass(frozen=True, eq=False)
class Corpus:
    vocab: Vocabulary
    frequencies: sparse.csr_matrix
    doc_lengths: Array
    collection_frequencies: Array
    total_tokens: int
    doc_ids: tuple[str, ...]

    @classmethod
    def from_frequencies(
        cls,
        frequencies: object,
        vocab: Vocabulary | None = None,
        doc_ids: Sequence[str] | None = None,
    ) -> Corpus:
        matrix = as_frequency_matrix(frequencies)
        rows, cols = matrix.shape
        if rows == 0:
            raise DomainError("A corpus needs at least one document.")
        if vocab is None:
            vocab = Vocabulary.from_terms(f"t{index}" for index in range(cols))
        if len(vocab) != cols:
            raise DomainError(f"Vocabulary has {len(vocab)} terms, matrix has {cols} columns.")
        ids = tuple(doc_ids) if doc_ids is not None else default_doc_ids(rows)
        if len(ids) != rows:
            raise DomainError(f"Got {len(ids)} document ids for {rows} documents.")

        doc_lengths = np.asarray(matrix.sum(axis=1), dtype=np.float64).ravel()
        collection = np.asarray(matrix.sum(axis=0), dtype=np.float64).ravel()
        return cls(
            vocab=vocab,
            frequencies=matrix,
            doc_lengths=cast(Array, readonly(doc_lengths)),
            collection_frequencies=cast(Array, readonly(collection)),
            total_tokens=int(round(float(matrix.data.sum()))),
            doc_ids=ids,
        )

    @property
    def num_documents(self) -> int:
        return int(self.frequencies.shape[0])

    @property
    def num_terms(self) -> int:
        return int(self.frequencies.shape[1])

    def document_tokens(self, doc: int) -> Counter[str]:
        start, stop = self.frequencies.indptr[doc], self.frequencies.indptr[doc + 1]
        return Counter(
            {
                self.vocab.terms[int(column)]: int(count)
                for column, count in zip(
                    self.frequencies.indices[start:stop], self.frequencies.data[start:stop]
                )
            }
        )


@dataclass(frozen=True, eq=False)
class Query:
    """
    Term-frequency row F_q over vocabulary indices.
    """

    id: str
    term_ids: IndexArray
    counts: Array
    num_terms: int
    dropped_terms: tuple[str, ...] = ()

    @property
    def is_empty(self) -> bool:
        return self.term_ids.size == 0

    @property
    def length(self) -> float:
        return float(self.counts.sum())

    def to_dense(self) -> Array:
        vector = np.zeros(self.num_terms, dtype=np.float64)
        vector[self.term_ids] = self.counts
        return cast(Array, vector)

    def scaled(self, factor: float) -> Query:
        return Query(
            id=self.id,
            term_ids=self.term_ids,
            counts=cast(Array, self.counts * factor),
            num_terms=self.num_terms,
            dropped_terms=self.dropped_terms,
        )


def default_doc_ids(count: int) -> tuple[str, ...]:
    return tuple(f"d{index}" for index in range(1, count + 1))


def build_corpus(
    documents: Sequence[Sequence[str]],
    doc_ids: Sequence[str] | None = None,
) -> Corpus:
    """
    Count tokens into a CSR document-term matrix; vocabulary follows first appearance.
    """
    if len(documents) == 0:
        raise DomainError("A corpus needs at least one document.")

    index: dict[str, int] = {}
    rows: list[int] = []
    cols: list[int] = []
    for row, tokens in enumerate(documents):
        for token in tokens:
            if not token:
                raise DomainError(f"Document {row} contains an empty token.")
            column = index.setdefault(token, len(index))
            rows.append(row)
            cols.append(column)

    matrix = sparse.coo_matrix(
        (np.ones(len(rows), dtype=np.float64), (rows, cols)),
        shape=(len(documents), len(index)),
    )
    corpus = Corpus.from_frequencies(
        matrix, vocab=Vocabulary.from_terms(index), doc_ids=doc_ids
    )
    logger.info(
        "Corpus built: %d documents, %d terms, %d tokens",
        corpus.num_documents,
        corpus.num_terms,
        corpus.total_tokens,
    )
    return corpus


def build_query(query_id: str, tokens: Sequence[str], vocab: Vocabulary) -> Query:
    counts: Counter[int] = Counter()
    dropped: list[str] = []
    for token in tokens:
        position = vocab.get(token)
        if position is None:
            dropped.append(token)
        else:
            counts[position] += 1

    if dropped:
        logger.warning("Query %s: dropped out-of-vocabulary terms %s", query_id, dropped)

    term_ids = np.array(sorted(counts), dtype=np.int64)
    values = np.array([counts[int(term)] for term in term_ids], dtype=np.float64)
    return Query(
        id=query_id,
        term_ids=cast(IndexArray, readonly(term_ids)),
        counts=cast(Array, readonly(values)),
        num_terms=len(vocab),
        dropped_terms=tuple(dropped),
    )


def load_corpus_file(path: Path, docids_path: Path | None = None) -> Corpus:
    """
    Parse a JGibbLDA data file: a document count line, then one document per line.
    """
    lines = read_text_lines(path)
    if not lines:
        raise DataFileError(path, "file is empty; expected a document count line", line=1)
    try:
        declared = int(lines[0].strip())
    except ValueError:
        raise DataFileError(path, f"invalid document count {lines[0].strip()!r}", line=1)
    if declared < 1:
        raise DataFileError(path, f"document count must be positive, got {declared}", line=1)

    body = lines[1:]
    # trailing blank lines beyond the declared count are tolerated
    while len(body) > declared and not body[-1].strip():
        body.pop()
    if len(body) != declared:
        raise DataFileError(
            path,
            f"declared {declared} documents but found {len(body)}",
            line=len(lines) if len(body) < declared else declared + 2,
        )

    doc_ids = load_doc_ids(docids_path, declared) if docids_path is not None else None
    return build_corpus([line.split() for line in body], doc_ids=doc_ids)


def load_doc_ids(path: Path, expected: int) -> list[str]:
    ids = [line.strip() for line in read_text_lines(path) if line.strip()]
    if len(ids) != expected:
        raise DataFileError(path, f"expected {expected} document ids, found {len(ids)}")
    return ids


def load_queries_file(path: Path, vocab: Vocabulary) -> list[Query]:
    queries: list[Query] = []
    seen: set[str] = set()
    for number, line in enumerate(read_text_lines(path), start=1):
        fields = line.split()
        if not fields:
            continue
        query_id, tokens = fields[0], fields[1:]
        if query_id in seen:
            raise DataFileError(path, f"duplicate query id {query_id!r}", line=number)
        seen.add(query_id)
        queries.append(build_query(query_id, tokens, vocab))
    return queries


def synthesize_corpus(seed: int, m: int, n: int, tokens_per_doc: int) -> Corpus:
    """
    Random corpus assembled directly in CSR form, for scale tests.
    """
    if min(m, n, tokens_per_doc) < 1:
        raise DomainError("m, n and tokens_per_doc must be positive.")
    rng = np.random.default_rng(seed)
    rows = np.repeat(np.arange(m, dtype=np.int64), tokens_per_doc)
    cols = rng.integers(0, n, size=m * tokens_per_doc, dtype=np.int64)
    matrix = sparse.csr_matrix(
        (np.ones(rows.size, dtype=np.float64), (rows, cols)), shape=(m, n)
    )
    return Corpus.from_frequencies(matrix)
