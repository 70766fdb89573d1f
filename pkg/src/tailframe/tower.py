"""Prefix-plus-cycle sequences and their tail towers ``H_1 >= H_2 >= ... >= H_inf``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numeric import SubspaceBasis, ToleranceConfig, orthonormalize

__all__ = [
    "TotalityError",
    "TailSequence",
    "TailTower",
    "vector_at",
    "build_tower",
    "succ_diff_dim",
]


class TotalityError(ValueError):
    """The vectors of a sequence do not span the ambient space."""

    def __init__(self, rank, dim):
        super().__init__(f"sequence is not total: span has rank {rank} < dimension {dim}")
        self.rank = rank
        self.dim = dim


def _as_block(vectors, dim, dtype):
    if len(vectors) == 0:
        return np.zeros((0, dim), dtype=dtype)
    block = np.array([np.asarray(v, dtype=dtype) for v in vectors])
    if block.ndim != 2 or block.shape[1] != dim:
        raise ValueError(f"every vector must have length {dim}")
    return block


@dataclass(frozen=True)
class TailSequence:
    """The sequence ``v_1, ..., v_m`` followed by ``cycle`` repeated forever.

    With an empty cycle the sequence continues with zero vectors.  Rows of
    ``prefix`` and ``cycle`` are the vectors.
    """

    dim: int
    prefix: np.ndarray
    cycle: np.ndarray
    field: str = "real"

    def __post_init__(self):
        if self.field not in ("real", "complex"):
            raise ValueError(f"field must be 'real' or 'complex', got {self.field!r}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        for name in ("prefix", "cycle"):
            block = getattr(self, name)
            if block.ndim != 2 or block.shape[1] != self.dim:
                raise ValueError(f"{name} must have shape (count, {self.dim})")
            if self.field == "real" and np.iscomplexobj(block):
                raise ValueError(f"{name} holds complex entries in a real-field instance")

    @classmethod
    def from_vectors(cls, prefix, cycle=(), field="real", dim=None):
        dtype = complex if field == "complex" else float
        vectors = list(prefix) + list(cycle)
        if dim is None:
            if not vectors:
                raise ValueError("cannot infer dimension from an empty sequence")
            dim = len(vectors[0])
        return cls(dim, _as_block(prefix, dim, dtype), _as_block(cycle, dim, dtype), field)

    @property
    def m(self) -> int:
        """Prefix length."""
        return self.prefix.shape[0]

    @property
    def p(self) -> int:
        """Cycle length."""
        return self.cycle.shape[0]

    @property
    def dtype(self):
        return complex if self.field == "complex" else float

    def vectors(self, start: int, stop: int) -> np.ndarray:
        """Rows ``v_start, ..., v_stop`` (inclusive, 1-based)."""
        if stop < start:
            return np.zeros((0, self.dim), dtype=self.dtype)
        return np.array([vector_at(self, k) for k in range(start, stop + 1)])

    def rank(self, tol: ToleranceConfig | None = None) -> int:
        return orthonormalize(list(self.prefix) + list(self.cycle), tol, ambient_dim=self.dim).rank

    def check_total(self, tol: ToleranceConfig | None = None):
        rank = self.rank(tol)
        if rank < self.dim:
            raise TotalityError(rank, self.dim)


def vector_at(seq: TailSequence, k: int) -> np.ndarray:
    """``v_k`` for ``k >= 1``."""
    if k < 1:
        raise IndexError(f"sequence indices start at 1, got {k}")
    if k <= seq.m:
        return seq.prefix[k - 1].copy()
    if seq.p == 0:
        return np.zeros(seq.dim, dtype=seq.dtype)
    return seq.cycle[(k - seq.m - 1) % seq.p].copy()


@dataclass(frozen=True)
class TailTower:
    """Bases of ``H_1, ..., H_{m+1}`` plus ``H_inf``.

    ``bases[n - 1]`` spans ``H_n``.  ``H_{m+1}`` equals ``H_inf`` because
    every later tail repeats the same cycle.
    """

    bases: tuple
    h_inf: SubspaceBasis
    stab_index: int

    @property
    def m(self) -> int:
        return len(self.bases) - 1

    @property
    def dims(self) -> list:
        return [b.rank for b in self.bases]

    def space(self, n: int) -> SubspaceBasis:
        """Basis of ``H_n``; indices past ``m + 1`` alias ``H_inf``."""
        if n < 1:
            raise IndexError(f"tail indices start at 1, got {n}")
        if n > len(self.bases):
            return self.h_inf
        return self.bases[n - 1]


def build_tower(seq: TailSequence, tol: ToleranceConfig | None = None) -> TailTower:
    """Build the tail tower, extending ``span(cycle)`` one prefix vector at a time.

    Raises
    ------
    TotalityError
        If ``H_1`` is not the whole space.
    """
    tol = tol or ToleranceConfig()
    h_inf = orthonormalize(list(seq.cycle), tol, ambient_dim=seq.dim)
    if h_inf.columns.dtype != seq.dtype:
        h_inf = SubspaceBasis(h_inf.columns.astype(seq.dtype), seq.dim, tol)
    bases = [h_inf]
    for n in range(seq.m, 0, -1):
        bases.append(orthonormalize([seq.prefix[n - 1]], tol, basis=bases[-1]))
    bases.reverse()
    if bases[0].rank < seq.dim:
        raise TotalityError(bases[0].rank, seq.dim)
    stab = next(n for n, b in enumerate(bases, start=1) if b.rank == h_inf.rank)
    return TailTower(tuple(bases), h_inf, stab)


def succ_diff_dim(tower: TailTower, n: int) -> int:
    """``dim(H_n ∩ H_{n+1}^⊥) = dim H_n - dim H_{n+1}`` for ``1 <= n <= m``."""
    if not 1 <= n <= tower.m:
        raise IndexError(f"n must lie in [1, {tower.m}], got {n}")
    return tower.bases[n - 1].rank - tower.bases[n].rank
