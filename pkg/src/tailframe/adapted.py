"""The orthonormal system adapted to a tail tower.

``x_n`` is the normalized part of ``v_n`` orthogonal to ``H_{n+1}``, ``y``
is an orthonormal basis of ``H_inf``, and ``u`` interleaves them as
``u_{2j-1} = x_j``, ``u_{2j} = y_j`` so that ``u_n`` lies in ``H_{ceil(n/2)}``.
Zero placeholders stay in place to keep that index map intact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numeric import SubspaceBasis, ToleranceConfig, project
from .tower import TailSequence, TailTower

__all__ = ["AdaptedSystem", "tail_start", "canonical_x", "interleave", "membership_residual"]


def tail_start(n: int) -> int:
    """``ceil(n / 2)``, the first tail index available to the ``n``-th term."""
    return (n + 1) // 2


@dataclass(frozen=True)
class AdaptedSystem:
    x: np.ndarray
    y: SubspaceBasis
    u: np.ndarray

    @property
    def length(self) -> int:
        return self.u.shape[0]

    @property
    def nonzero(self) -> np.ndarray:
        """Boolean mask of non-placeholder entries of ``u``."""
        return np.any(self.u != 0, axis=1)

    @property
    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.nonzero))

    def vector(self, n: int) -> np.ndarray:
        """``u_n`` (1-based)."""
        if not 1 <= n <= self.length:
            raise IndexError(f"u index must lie in [1, {self.length}], got {n}")
        return self.u[n - 1]

    @staticmethod
    def phi(n: int) -> int:
        return tail_start(n)


def canonical_x(seq: TailSequence, tower: TailTower, tol: ToleranceConfig | None = None) -> np.ndarray:
    """Rows ``x_1, ..., x_m``, each unit norm or exactly zero."""
    tol = tol or ToleranceConfig()
    x = np.zeros((seq.m, seq.dim), dtype=seq.dtype)
    for n in range(1, seq.m + 1):
        v = seq.prefix[n - 1]
        r = v - project(tower.space(n + 1), v)
        norm = float(np.linalg.norm(r))
        if norm > tol.rank_tol * max(1.0, float(np.linalg.norm(v))):
            x[n - 1] = r / norm
    return x


def interleave(x, y: SubspaceBasis) -> AdaptedSystem:
    x = np.asarray(x)
    m = x.shape[0]
    r = y.rank
    d = y.ambient_dim
    dtype = np.result_type(x, y.columns)
    u = np.zeros((2 * max(m, r), d), dtype=dtype)
    u[0:2 * m:2] = x
    if r:
        u[1:2 * r:2] = y.columns.T
    return AdaptedSystem(x.astype(dtype), y, u)


def membership_residual(sys: AdaptedSystem, tower: TailTower, n: int) -> float:
    """``|u_n - P_{H_ceil(n/2)} u_n|``."""
    u = sys.vector(n)
    return float(np.linalg.norm(u - project(tower.space(tail_start(n)), u)))
