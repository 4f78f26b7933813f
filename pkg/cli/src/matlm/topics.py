"""
θ/φ ingestion in JGibbLDA's text formats.

- `.theta`: one row per document, whitespace-separated p(z|d) values.
- `.phi`: one row per topic, whitespace-separated p(w|z) values in wordmap id order.
- `wordmap.txt`: first line is the pair count, then `term id` per line.
- `.others`: `key=value` lines summarizing the sampler run.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence, cast

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from matlm.corpus import Corpus, Vocabulary
from matlm.exceptions import DataFileError, DomainError
from matlm.kernels import Array, readonly
from matlm.utils.file import read_text_lines, write_text_lines

logger = logging.getLogger(__name__)

ROW_SUM_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class TopicParams:
    theta: Array
    phi: Array

    def __post_init__(self) -> None:
        if self.theta.ndim != 2 or self.phi.ndim != 2:
            raise DomainError("theta and phi must be 2D matrices.")
        if self.theta.shape[1] != self.phi.shape[0]:
            raise DomainError(
                f"theta has {self.theta.shape[1]} topics, phi has {self.phi.shape[0]}."
            )

    @property
    def k(self) -> int:
        return int(self.phi.shape[0])

    @property
    def num_documents(self) -> int:
        return int(self.theta.shape[0])

    @property
    def num_terms(self) -> int:
        return int(self.phi.shape[1])

    def check_matches(self, corpus: Corpus) -> None:
        if self.num_documents != corpus.num_documents:
            raise DomainError(
                f"theta covers {self.num_documents} documents, "
                f"corpus has {corpus.num_documents}."
            )
        if self.num_terms != corpus.num_terms:
            raise DomainError(
                f"phi covers {self.num_terms} terms, corpus has {corpus.num_terms}."
            )


@dataclass(frozen=True, eq=False)
class WordMap:
    """External word ids as assigned by the sampler."""

    ids: Mapping[str, int]

    def __len__(self) -> int:
        return len(self.ids)


class LdaRunSummary(BaseModel):
    model_config = ConfigDict(extra="allow")

    alpha: float | None = None
    beta: float | None = None
    ntopics: int = Field(ge=1)
    ndocs: int | None = Field(default=None, ge=0)
    nwords: int | None = Field(default=None, ge=0)
    liter: int | None = None


@dataclass(frozen=True, eq=False)
class TextMatrix:
    values: Array
    # 1-based source line of each row; blank lines are skipped
    lines: tuple[int, ...]


def load_matrix(path: Path) -> TextMatrix:
    rows: list[list[float]] = []
    lines: list[int] = []
    width: int | None = None
    for number, line in enumerate(read_text_lines(path), start=1):
        fields = line.split()
        if not fields:
            continue
        try:
            values = [float(value) for value in fields]
        except ValueError as exc:
            raise DataFileError(path, f"non-numeric field ({exc})", line=number)
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise DataFileError(
                path, f"ragged row: expected {width} values, found {len(values)}", line=number
            )
        if not all(np.isfinite(values)):
            raise DataFileError(path, "non-finite value", line=number)
        rows.append(values)
        lines.append(number)
    if not rows:
        raise DataFileError(path, "no matrix rows found")
    return TextMatrix(values=cast(Array, np.array(rows, dtype=np.float64)), lines=tuple(lines))


def validate_stochastic_rows(loaded: TextMatrix, path: Path, label: str) -> Array:
    """
    Check rows are distributions; renormalize rows that are within tolerance of 1.
    """
    matrix = loaded.values
    if (matrix < 0).any() or (matrix > 1).any():
        row = int(np.flatnonzero(((matrix < 0) | (matrix > 1)).any(axis=1))[0])
        raise DataFileError(path, f"{label} entries must lie in [0, 1]", line=loaded.lines[row])
    sums = matrix.sum(axis=1)
    deviation = np.abs(sums - 1.0)
    if (deviation > ROW_SUM_TOLERANCE).any():
        row = int(np.flatnonzero(deviation > ROW_SUM_TOLERANCE)[0])
        raise DataFileError(
            path,
            f"{label} row sums to {sums[row]:.9g}, expected 1 within {ROW_SUM_TOLERANCE:g}",
            line=loaded.lines[row],
        )
    drifted = int((deviation > 0).sum())
    if drifted:
        logger.debug("Renormalizing %d %s rows within tolerance", drifted, label)
    return cast(Array, matrix / sums[:, None])


def load_wordmap(path: Path) -> WordMap:
    lines = read_text_lines(path)
    if not lines:
        raise DataFileError(path, "file is empty; expected a count line", line=1)
    try:
        declared = int(lines[0].strip())
    except ValueError:
        raise DataFileError(path, f"invalid count {lines[0].strip()!r}", line=1)

    ids: dict[str, int] = {}
    seen_ids: set[int] = set()
    for number, line in enumerate(lines[1:], start=2):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 2:
            raise DataFileError(path, "expected 'term id'", line=number)
        term, raw_id = fields
        try:
            word_id = int(raw_id)
        except ValueError:
            raise DataFileError(path, f"invalid word id {raw_id!r}", line=number)
        if word_id < 0 or word_id in seen_ids:
            raise DataFileError(path, f"word id {word_id} is negative or repeated", line=number)
        if term in ids:
            raise DataFileError(path, f"term {term!r} listed twice", line=number)
        seen_ids.add(word_id)
        ids[term] = word_id

    if declared != len(ids):
        raise DataFileError(path, f"count header says {declared}, found {len(ids)} pairs", line=1)
    return WordMap(ids=ids)


def save_wordmap(wordmap: WordMap, path: Path) -> Path:
    pairs = sorted(wordmap.ids.items(), key=lambda item: item[1])
    return write_text_lines([str(len(pairs)), *(f"{term} {wid}" for term, wid in pairs)], path)


def identity_wordmap(vocab: Vocabulary) -> WordMap:
    return WordMap(ids={term: index for index, term in enumerate(vocab.terms)})


def load_model_summary(path: Path) -> LdaRunSummary:
    values: dict[str, str] = {}
    for number, line in enumerate(read_text_lines(path), start=1):
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise DataFileError(path, "expected 'key=value'", line=number)
        values[key.strip()] = value.strip()
    try:
        return LdaRunSummary.model_validate(values)
    except ValueError as exc:
        raise DataFileError(path, f"invalid model summary: {exc}")


def align_phi(
    phi: Array,
    wordmap: WordMap,
    vocab: Vocabulary,
    path: Path,
    lines: Sequence[int],
) -> Array:
    """
    Reorder φ columns from sampler word ids to corpus vocabulary indices.

    `lines` holds the source line of each φ row.
    """
    if len(wordmap) != phi.shape[1]:
        raise DataFileError(
            path, f"phi has {phi.shape[1]} columns but the wordmap lists {len(wordmap)} terms"
        )
    missing = [term for term in vocab.terms if term not in wordmap.ids]
    if missing:
        preview = ", ".join(repr(term) for term in missing[:5])
        raise DataFileError(
            path, f"{len(missing)} corpus terms missing from the wordmap: {preview}"
        )
    columns = np.array([wordmap.ids[term] for term in vocab.terms], dtype=np.int64)
    if columns.size and columns.max() >= phi.shape[1]:
        raise DataFileError(path, f"wordmap id {int(columns.max())} exceeds phi width")
    aligned = phi[:, columns]

    if len(wordmap) > len(vocab):
        logger.warning(
            "Wordmap has %d terms outside the corpus vocabulary; renormalizing phi rows",
            len(wordmap) - len(vocab),
        )
        mass = aligned.sum(axis=1)
        if (mass <= 0).any():
            topic = int(np.flatnonzero(mass <= 0)[0])
            raise DataFileError(
                path,
                f"topic {topic} has no mass on the corpus vocabulary",
                line=lines[topic],
            )
        aligned = aligned / mass[:, None]
    return cast(Array, aligned)


def load_topic_params(
    theta_path: Path,
    phi_path: Path,
    wordmap_path: Path,
    corpus: Corpus,
    others_path: Path | None = None,
) -> TopicParams:
    theta = validate_stochastic_rows(load_matrix(theta_path), theta_path, "theta")
    phi_rows = load_matrix(phi_path)
    phi = validate_stochastic_rows(phi_rows, phi_path, "phi")
    wordmap = load_wordmap(wordmap_path)

    if theta.shape[0] != corpus.num_documents:
        raise DataFileError(
            theta_path,
            f"theta has {theta.shape[0]} rows, corpus has {corpus.num_documents} documents",
        )
    if theta.shape[1] != phi.shape[0]:
        raise DataFileError(
            phi_path, f"phi has {phi.shape[0]} topics, theta has {theta.shape[1]} columns"
        )

    if others_path is not None:
        summary = load_model_summary(others_path)
        if summary.ntopics != phi.shape[0]:
            raise DataFileError(
                others_path, f"ntopics={summary.ntopics} but phi has {phi.shape[0]} topics"
            )
        if summary.ndocs is not None and summary.ndocs != theta.shape[0]:
            raise DataFileError(
                others_path, f"ndocs={summary.ndocs} but theta has {theta.shape[0]} rows"
            )

    aligned = align_phi(phi, wordmap, corpus.vocab, phi_path, lines=phi_rows.lines)
    params = TopicParams(theta=readonly(theta), phi=readonly(aligned))
    logger.info("Topic parameters loaded: k=%d", params.k)
    return params


def _format_row(values: Array) -> str:
    return " ".join(repr(float(value)) for value in values)


def save_topic_params(
    params: TopicParams,
    vocab: Vocabulary,
    theta_path: Path,
    phi_path: Path,
    wordmap_path: Path,
) -> tuple[Path, Path, Path]:
    write_text_lines((_format_row(row) for row in params.theta), theta_path)
    write_text_lines((_format_row(row) for row in params.phi), phi_path)
    save_wordmap(identity_wordmap(vocab), wordmap_path)
    return Path(theta_path), Path(phi_path), Path(wordmap_path)


def synthesize_topic_params(seed: int, m: int, n: int, k: int) -> TopicParams:
    """
    Flat-Dirichlet θ and φ for fixtures; deterministic per seed.
    """
    if min(m, n, k) < 1:
        raise DomainError("m, n and k must be at least 1.")
    rng = np.random.default_rng(seed)
    theta = rng.dirichlet(np.ones(k), size=m)
    phi = rng.dirichlet(np.ones(n), size=k)
    return TopicParams(
        theta=readonly(cast(Array, theta)),
        phi=readonly(cast(Array, phi)),
    )
