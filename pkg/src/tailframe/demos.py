"""Ready-to-run instances, plus the seeded random generator used by the test corpus."""

from __future__ import annotations

import numpy as np

from .io import SCHEMA_VERSION, encode_scalar
from .numeric import ToleranceConfig
from .tower import TailSequence

DEMO_NAMES = ("standard_basis", "redundant", "cyclic", "random")


def _basis(dim, i):
    e = [0.0] * dim
    e[i] = 1.0
    return e


def _instance(field, dim, prefix, cycle, seed=0):
    cx = field == "complex"
    return {
        "schema_version": SCHEMA_VERSION,
        "field": field,
        "dim": dim,
        "prefix": [[encode_scalar(x, cx) for x in v] for v in prefix],
        "cycle": [[encode_scalar(x, cx) for x in v] for v in cycle],
        "epsilon": {"kind": "geometric", "params": {"ratio": 0.5, "mass": 0.25}},
        "weights": {"kind": "dyadic"},
        "seed": seed,
    }


def random_vectors(dim: int, prefix_len: int, cycle_len: int, seed: int, field: str = "real"):
    """Seeded Gaussian prefix and cycle blocks, redrawn until their span is total."""
    if prefix_len < 0 or cycle_len < 0:
        raise ValueError("lengths must be nonnegative")
    if prefix_len + cycle_len < dim:
        raise ValueError(f"{prefix_len + cycle_len} vectors cannot span dimension {dim}")
    rng = np.random.default_rng(seed)
    tol = ToleranceConfig()
    for _ in range(100):
        shape = (prefix_len + cycle_len, dim)
        V = rng.standard_normal(shape)
        if field == "complex":
            V = V + 1j * rng.standard_normal(shape)
        seq = TailSequence.from_vectors(list(V[:prefix_len]), list(V[prefix_len:]), field, dim=dim)
        if seq.rank(tol) == dim:
            return seq
    raise RuntimeError("could not draw a total sequence")


def demo_instance(name: str, dim: int | None = None, prefix_len: int | None = None,
                  cycle_len: int | None = None, seed: int = 0, field: str = "real") -> dict:
    if name == "standard_basis":
        dim = dim or 3
        return _instance(field, dim, [_basis(dim, i) for i in range(dim)], [], seed)
    if name == "redundant":
        # v_1 = v_2, so v_1 already lies in the next tail
        dim = dim or 2
        prefix = [_basis(dim, 0)] + [_basis(dim, i) for i in range(dim)]
        return _instance(field, dim, prefix, [], seed)
    if name == "cyclic":
        dim = dim or 3
        if dim < 2:
            raise ValueError("cyclic demo needs dim >= 2")
        return _instance(field, dim, [_basis(dim, 0)], [_basis(dim, i) for i in range(1, dim)], seed)
    if name == "random":
        dim = dim or 4
        prefix_len = 2 * dim if prefix_len is None else prefix_len
        cycle_len = 0 if cycle_len is None else cycle_len
        seq = random_vectors(dim, prefix_len, cycle_len, seed, field)
        return _instance(field, dim, list(seq.prefix), list(seq.cycle), seed)
    raise ValueError(f"unknown demo {name!r}; choose from {', '.join(DEMO_NAMES)}")


def random_corpus(count: int = 50, seed: int = 20250101) -> list:
    """``(name, TailSequence)`` pairs: d in 2..8, real/complex alternating, cycle length cycling 0..3."""
    rng = np.random.default_rng(seed)
    corpus = []
    for i in range(count):
        dim = int(rng.integers(2, 9))
        field = "real" if i % 2 == 0 else "complex"
        cycle_len = i % 4
        prefix_len = int(rng.integers(max(dim - cycle_len, 0), 2 * dim + 1))
        inst_seed = int(rng.integers(0, 2**31))
        seq = random_vectors(dim, prefix_len, cycle_len, inst_seed, field)
        corpus.append((f"{field}-d{dim}-m{prefix_len}-p{cycle_len}-s{inst_seed}", seq))
    return corpus
