"""Perturbation operator ``T``, its Neumann inverse, and the identity resolution ``sum_n w_n z_n^*``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .adapted import AdaptedSystem
from .numeric import NonContractionError, ToleranceConfig, operator_norm, rank_one, solve_identity_minus
from .parallel import pmap
from .tower import TailSequence

__all__ = [
    "NeumannDisagreement",
    "PerturbationOperator",
    "DualSystem",
    "approximant_vectors",
    "assemble_T",
    "mixed_series_check",
    "neumann_terms",
    "neumann_apply",
    "dual_vectors",
    "resolution_residual",
    "partial_projector",
    "parseval_sweep",
    "parseval_partial",
]


class NeumannDisagreement(ArithmeticError):
    """Truncated Neumann series and direct solve disagree."""

    def __init__(self, n, gap, limit):
        super().__init__(f"w_{n}: Neumann vs direct solve differ by {gap:.3e} > {limit:.3e}")
        self.n = n
        self.gap = gap
        self.limit = limit


@dataclass(frozen=True)
class PerturbationOperator:
    T: np.ndarray
    norm: float
    bound: float


@dataclass(frozen=True)
class DualSystem:
    """``w_n = (I - T)^{-1} u_n``; rows align with ``u`` and are zero at placeholders."""

    w: np.ndarray
    resolution_residual: float
    neumann_gap: float
    neumann_order: int


def approximant_vectors(zs, seq: TailSequence) -> np.ndarray:
    """Rows ``z_n`` rebuilt from the stored coefficients."""
    if not zs:
        return np.zeros((0, seq.dim), dtype=seq.dtype)
    return np.array([z.vector(seq) for z in zs])


def _sum_rank_one(left, right, dim, dtype) -> np.ndarray:
    total = np.zeros((dim, dim), dtype=dtype)
    for a, b in zip(left, right):
        if np.any(a != 0):
            total += rank_one(a, b)
    return total


def assemble_T(sys: AdaptedSystem, zs, seq: TailSequence) -> PerturbationOperator:
    """``T = sum_n u_n (u_n - z_n)^*`` over non-placeholder ``u_n``.

    Raises
    ------
    NonContractionError
        If ``|T| >= 1``.
    """
    if len(zs) != sys.length:
        raise ValueError(f"{len(zs)} approximants for {sys.length} adapted vectors")
    Z = approximant_vectors(zs, seq)
    T = _sum_rank_one(sys.u, sys.u - Z, seq.dim, np.result_type(sys.u, Z))
    norm = operator_norm(T)
    bound = math.sqrt(math.fsum(z.eps ** 2 for z in zs))
    if norm >= 1:
        raise NonContractionError(norm)
    return PerturbationOperator(T, norm, bound)


def mixed_series_check(sys: AdaptedSystem, zs, seq: TailSequence, T: PerturbationOperator) -> float:
    """``|sum_n u_n z_n^* - (I - T)|`` in operator norm."""
    Z = approximant_vectors(zs, seq)
    C = _sum_rank_one(sys.u, Z, seq.dim, np.result_type(sys.u, Z, T.T))
    return operator_norm(C - (np.eye(seq.dim) - T.T))


def neumann_terms(norm: float, scale: float, tol: float) -> int:
    """Smallest ``M`` with ``norm**(M+1) / (1 - norm) * scale <= tol``."""
    if norm >= 1:
        raise NonContractionError(norm)
    if norm == 0 or scale == 0:
        return 0
    M = 0
    while norm ** (M + 1) / (1 - norm) * scale > tol:
        M += 1
    return M


def neumann_apply(T, b, M: int) -> np.ndarray:
    """``sum_{j=0}^{M} T^j b``."""
    term = np.array(b, dtype=np.result_type(T, b))
    total = term.copy()
    for _ in range(M):
        term = T @ term
        total = total + term
    return total


def resolution_residual(w, Z, dim: int) -> float:
    """``|sum_n w_n z_n^* - I|`` in operator norm."""
    R = _sum_rank_one(w, Z, dim, np.result_type(w, Z))
    return operator_norm(R - np.eye(dim))


def dual_vectors(T: PerturbationOperator, sys: AdaptedSystem, zs, seq: TailSequence,
                 tol: ToleranceConfig | None = None, workers: int | None = None) -> DualSystem:
    """Direct-solve duals, cross-checked against truncated Neumann series.

    Raises
    ------
    NonContractionError
        If ``|T| >= 1``.
    NeumannDisagreement
        If the two evaluations of some ``w_n`` differ by more than
        ``10 * neumann_tol``.
    """
    tol = tol or ToleranceConfig()
    if T.norm >= 1:
        raise NonContractionError(T.norm)
    dtype = np.result_type(sys.u, T.T)

    def one(n):
        u = sys.vector(n)
        if not np.any(u != 0):
            return np.zeros(seq.dim, dtype=dtype), 0.0, 0
        direct = solve_identity_minus(T.T, u, tol, norm=T.norm)
        M = neumann_terms(T.norm, float(np.linalg.norm(u)), tol.neumann_tol)
        gap = float(np.linalg.norm(neumann_apply(T.T, u, M) - direct))
        if gap > 10 * tol.neumann_tol:
            raise NeumannDisagreement(n, gap, 10 * tol.neumann_tol)
        return direct, gap, M

    results = pmap(one, range(1, sys.length + 1), workers)
    w = np.array([r[0] for r in results]).reshape(sys.length, seq.dim)
    gap = max((r[1] for r in results), default=0.0)
    order = max((r[2] for r in results), default=0)
    Z = approximant_vectors(zs, seq)
    return DualSystem(w, resolution_residual(w, Z, seq.dim), gap, order)


def partial_projector(sys: AdaptedSystem, N: int) -> np.ndarray:
    """``S_N = sum_{n <= N} u_n u_n^*``."""
    d = sys.y.ambient_dim
    return _sum_rank_one(sys.u[:N], sys.u[:N], d, sys.u.dtype)


def parseval_sweep(sys: AdaptedSystem, x) -> tuple:
    """For ``N = 0..L`` return ``|x - S_N x|^2`` and the tail sums ``sum_{n>N} |<u_n, x>|^2``."""
    x = np.asarray(x)
    coeffs = sys.u.conj() @ x
    direct = np.empty(sys.length + 1)
    partial = np.zeros_like(x, dtype=np.result_type(sys.u, x))
    direct[0] = float(np.vdot(x, x).real)
    for N in range(1, sys.length + 1):
        partial = partial + sys.u[N - 1] * coeffs[N - 1]
        r = x - partial
        direct[N] = float(np.vdot(r, r).real)
    sq = np.abs(coeffs) ** 2
    tails = np.array([math.fsum(sq[N:]) for N in range(sys.length + 1)])
    return direct, tails


def parseval_partial(sys: AdaptedSystem, N: int, x, tol: ToleranceConfig | None = None) -> float:
    """``|x - S_N x|``, checked against the tail-sum formula.

    Raises
    ------
    ArithmeticError
        If ``|x - S_N x|^2`` and the tail sum differ by more than
        ``residual_tol * |x|^2``.
    """
    tol = tol or ToleranceConfig()
    if not 0 <= N <= sys.length:
        raise IndexError(f"N must lie in [0, {sys.length}], got {N}")
    direct, tails = parseval_sweep(sys, x)
    scale = float(np.vdot(x, x).real)
    if abs(direct[N] - tails[N]) > tol.residual_tol * scale:
        raise ArithmeticError(f"Parseval tail identity fails at N={N}: {direct[N]!r} vs {tails[N]!r}")
    return math.sqrt(max(direct[N], 0.0))
