"""Dense linear-algebra substrate.

Vectors are 1-D numpy arrays and operators are square 2-D arrays, either
``float64`` or ``complex128``.  The inner product is conjugate-linear in its
first argument, so ``inner(u, v) == np.vdot(u, v)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

__all__ = [
    "DimensionError",
    "NonContractionError",
    "ToleranceConfig",
    "SubspaceBasis",
    "inner",
    "rank_one",
    "rank_one_apply",
    "orthonormalize",
    "project",
    "operator_norm",
    "solve_identity_minus",
]


class DimensionError(ValueError):
    """Raised when operands do not share the ambient dimension."""


class NonContractionError(ArithmeticError):
    """Raised when an operator expected to be a strict contraction is not."""

    def __init__(self, norm):
        super().__init__(f"operator norm {norm!r} is not < 1")
        self.norm = norm


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical surrogates for the exact ``= 0`` tests.

    ``rank_tol`` decides when a residual is zero (relative to
    ``max(1, |candidate|)``), ``residual_tol`` bounds how far an identity may
    be off, and ``neumann_tol`` truncates Neumann series.
    """

    rank_tol: float = 1e-10
    residual_tol: float = 1e-8
    neumann_tol: float = 1e-12

    def __post_init__(self):
        for name in ("rank_tol", "residual_tol", "neumann_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if self.rank_tol > self.residual_tol:
            raise ValueError("rank_tol must not exceed residual_tol")

    def with_overrides(self, **kwargs) -> "ToleranceConfig":
        values = {k: v for k, v in kwargs.items() if v is not None}
        return ToleranceConfig(**{**self.as_dict(), **values})

    def as_dict(self) -> dict:
        return {
            "rank_tol": self.rank_tol,
            "residual_tol": self.residual_tol,
            "neumann_tol": self.neumann_tol,
        }


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal columns spanning a subspace of the ambient space.

    ``columns`` has shape ``(ambient_dim, rank)``.
    """

    columns: np.ndarray
    ambient_dim: int
    built_with: ToleranceConfig = field(default_factory=ToleranceConfig)

    @property
    def rank(self) -> int:
        return self.columns.shape[1]

    def __len__(self):
        return self.rank

    def column(self, j: int) -> np.ndarray:
        return self.columns[:, j]

    def gram_defect(self) -> float:
        """Largest entrywise deviation of the Gram matrix from the identity."""
        if self.rank == 0:
            return 0.0
        G = self.columns.conj().T @ self.columns
        return float(np.max(np.abs(G - np.eye(self.rank))))

    def projector(self) -> np.ndarray:
        return self.columns @ self.columns.conj().T

    @classmethod
    def empty(cls, ambient_dim: int, dtype=float, tol: ToleranceConfig | None = None):
        return cls(np.zeros((ambient_dim, 0), dtype=dtype), ambient_dim, tol or ToleranceConfig())


def _check_same_length(*vectors):
    lengths = {np.shape(v)[0] for v in vectors}
    if len(lengths) != 1:
        raise DimensionError(f"vector lengths differ: {sorted(lengths)}")


def inner(u, v):
    """``<u, v>``, conjugate-linear in ``u`` and linear in ``v``."""
    u = np.asarray(u)
    v = np.asarray(v)
    _check_same_length(u, v)
    return np.vdot(u, v)


def rank_one(a, b) -> np.ndarray:
    """Matrix of the rank-one operator ``a b^*``."""
    a = np.asarray(a)
    b = np.asarray(b)
    _check_same_length(a, b)
    return np.outer(a, b.conj())


def rank_one_apply(a, b, x) -> np.ndarray:
    """Apply ``a b^*`` to ``x``, i.e. return ``a <b, x>``."""
    a = np.asarray(a)
    _check_same_length(a, b, x)
    return a * inner(b, x)


def _result_dtype(vectors):
    if any(np.iscomplexobj(v) for v in vectors):
        return complex
    return float


def orthonormalize(vectors, tol: ToleranceConfig | None = None, basis: SubspaceBasis | None = None,
                   ambient_dim: int | None = None) -> SubspaceBasis:
    """Orthonormal basis for the span of ``vectors``.

    Classical Gram-Schmidt with an unconditional second pass ("twice is
    enough").  Vectors are processed in the given order; a candidate is kept
    when its residual exceeds ``rank_tol * max(1, |candidate|)``.  When
    ``basis`` is given the result extends it, and its columns come first.

    Parameters
    ----------
    vectors : sequence of array_like
        Candidate vectors, all of the same length.
    tol : ToleranceConfig, optional
        Rank tolerance; defaults to ``ToleranceConfig()``.
    basis : SubspaceBasis, optional
        An orthonormal basis to extend.
    ambient_dim : int, optional
        Needed only when both ``vectors`` and ``basis`` are empty.

    Returns
    -------
    SubspaceBasis
    """
    tol = tol or (basis.built_with if basis is not None else ToleranceConfig())
    vectors = [np.asarray(v) for v in vectors]
    if basis is not None:
        d = basis.ambient_dim
    elif vectors:
        d = vectors[0].shape[0]
    elif ambient_dim is not None:
        d = ambient_dim
    else:
        d = 0
    if vectors:
        _check_same_length(*vectors, np.empty(d))

    dtype = _result_dtype(vectors + ([basis.columns] if basis is not None else []))
    kept = [] if basis is None else [basis.columns[:, j].astype(dtype) for j in range(basis.rank)]
    for v in vectors:
        w = v.astype(dtype, copy=True)
        scale = max(1.0, float(np.linalg.norm(w)))
        if kept:
            Q = np.column_stack(kept)
            for _ in range(2):
                w = w - Q @ (Q.conj().T @ w)
        beta = float(np.linalg.norm(w))
        if beta > tol.rank_tol * scale:
            kept.append(w / beta)

    columns = np.column_stack(kept) if kept else np.zeros((d, 0), dtype=dtype)
    return SubspaceBasis(columns, d, tol)


def project(basis: SubspaceBasis, x) -> np.ndarray:
    """Orthogonal projection ``sum_j b_j <b_j, x>`` onto the span of ``basis``."""
    x = np.asarray(x)
    if x.shape[0] != basis.ambient_dim:
        raise DimensionError(f"vector of length {x.shape[0]} vs ambient dimension {basis.ambient_dim}")
    Q = basis.columns
    if Q.shape[1] == 0:
        return np.zeros_like(x)
    return Q @ (Q.conj().T @ x)


def operator_norm(M) -> float:
    """Spectral norm (largest singular value)."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def solve_identity_minus(T, b, tol: ToleranceConfig | None = None, norm: float | None = None) -> np.ndarray:
    """Solve ``(I - T) y = b`` directly for a strict contraction ``T``.

    Raises
    ------
    NonContractionError
        If ``|T| >= 1``.
    ArithmeticError
        If the achieved residual exceeds ``residual_tol * |b|``.
    """
    tol = tol or ToleranceConfig()
    T = np.asarray(T)
    b = np.asarray(b)
    if T.shape != (b.shape[0], b.shape[0]):
        raise DimensionError(f"operator shape {T.shape} vs vector length {b.shape[0]}")
    norm = operator_norm(T) if norm is None else norm
    if norm >= 1:
        raise NonContractionError(norm)
    A = np.eye(T.shape[0], dtype=np.result_type(T, b)) - T
    y = scipy.linalg.solve(A, b)
    residual = float(np.linalg.norm(A @ y - b))
    if residual > tol.residual_tol * float(np.linalg.norm(b)):
        raise ArithmeticError(f"direct solve residual {residual:.3e} exceeds tolerance")
    return y
