from __future__ import annotations

import sys
from pathlib import Path
from typing import Callable

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from matlm.corpus import Corpus, build_corpus  # noqa: E402
from matlm.topics import TopicParams, synthesize_topic_params  # noqa: E402

GOLDEN_DOCUMENTS = [["a", "a", "b"], ["b", "c"]]


@pytest.fixture
def golden_corpus() -> Corpus:
    return build_corpus(GOLDEN_DOCUMENTS)


@pytest.fixture
def golden_params() -> TopicParams:
    return TopicParams(
        theta=np.array([[0.6, 0.4], [0.5, 0.5]]),
        phi=np.array([[0.5, 0.3, 0.2], [0.1, 0.2, 0.7]]),
    )


@pytest.fixture
def ldi_params() -> TopicParams:
    # p(z|a) = [1, 0], p(z|b) = [0.5, 0.5], p(z|c) = [0, 1]
    return TopicParams(
        theta=np.array([[0.6, 0.4], [0.5, 0.5]]),
        phi=np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5]]),
    )


@pytest.fixture
def write_file(tmp_path: Path) -> Callable[[str, str], Path]:
    def _write(name: str, content: str) -> Path:
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")
        return path

    return _write


@pytest.fixture
def golden_files(write_file) -> dict[str, Path]:
    return {
        "corpus": write_file("corpus.dat", "2\na a b\nb c\n"),
        "queries": write_file("queries.txt", "q1 a b\n"),
        "theta": write_file("model.theta", "0.6 0.4\n0.5 0.5\n"),
        "phi": write_file("model.phi", "0.5 0.3 0.2\n0.1 0.2 0.7\n"),
        "wordmap": write_file("wordmap.txt", "3\na 0\nb 1\nc 2\n"),
    }


def _random_corpus(rng: np.random.Generator, max_docs: int, max_terms: int) -> Corpus:
    m = int(rng.integers(1, max_docs + 1))
    n = int(rng.integers(1, max_terms + 1))
    counts = rng.integers(0, 4, size=(m, n)) * (rng.random((m, n)) < 0.4)
    counts[0, int(rng.integers(0, n))] += 1
    return Corpus.from_frequencies(counts)


@pytest.fixture
def random_corpus() -> Callable[..., Corpus]:
    return _random_corpus


@pytest.fixture
def random_instance() -> Callable[..., tuple[Corpus, TopicParams]]:
    def _instance(
        rng: np.random.Generator, max_docs: int = 20, max_terms: int = 30, max_topics: int = 5
    ) -> tuple[Corpus, TopicParams]:
        corpus = _random_corpus(rng, max_docs, max_terms)
        k = int(rng.integers(1, max_topics + 1))
        params = synthesize_topic_params(
            int(rng.integers(0, 2**31)), corpus.num_documents, corpus.num_terms, k
        )
        return corpus, params

    return _instance
