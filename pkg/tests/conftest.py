import numpy as np
import pytest

from tailframe.demos import random_corpus
from tailframe.pipeline import run_pipeline
from tailframe.tower import TailSequence

CORPUS_SEED = 20250101


@pytest.fixture(scope="session")
def corpus():
    return random_corpus(50, CORPUS_SEED)


@pytest.fixture(scope="session")
def corpus_results(corpus):
    return [(name, run_pipeline(seq)) for name, seq in corpus]


def e(dim, i, dtype=float):
    v = np.zeros(dim, dtype=dtype)
    v[i] = 1
    return v


def seq_of(prefix, cycle=(), field="real", dim=None):
    return TailSequence.from_vectors(prefix, cycle, field, dim=dim)
