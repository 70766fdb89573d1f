"""Frame weights: the weighted constant ``C(a)``, dyadic ``lambda_k``, and their certification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .adapted import tail_start
from .tower import TailSequence

__all__ = [
    "WeightError",
    "WeightSequence",
    "FrameCertificate",
    "used_k_max",
    "constant_C",
    "explicit_lambda",
    "random_unit_vectors",
    "weighted_frame_check",
    "frame_operator",
    "frame_operator_eig_check",
    "inequality_chain",
    "fubini_sums",
]


class WeightError(ValueError):
    pass


@dataclass(frozen=True)
class WeightSequence:
    """Positive weights ``a_1, ..., a_kmax``."""

    kind: str
    values: tuple

    def __post_init__(self):
        if any(not (v > 0 and np.isfinite(v)) for v in self.values):
            raise WeightError("weights must be positive and finite")

    @classmethod
    def dyadic(cls, k_max: int) -> "WeightSequence":
        return cls("dyadic", tuple(2.0 ** k for k in range(1, k_max + 1)))

    @classmethod
    def explicit(cls, values) -> "WeightSequence":
        return cls("explicit", tuple(float(v) for v in values))

    @property
    def k_max(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> float:
        if not 1 <= k <= len(self.values):
            raise IndexError(f"weight index must lie in [1, {len(self.values)}], got {k}")
        return self.values[k - 1]


@dataclass(frozen=True)
class FrameCertificate:
    C_a: float
    weights: WeightSequence
    lam: tuple
    lam_bound: tuple
    contributing: tuple
    T_norm: float
    resolution_residual: float
    eig_slack: float
    eig_slack_weighted: float


def used_k_max(zs, seq: TailSequence) -> int:
    """Largest tail index touched by any approximant, and at least ``m + p``."""
    used = [k for z in zs for k, _ in z.coeffs]
    return max([seq.m + seq.p, *used])


def _w_sq(w) -> np.ndarray:
    return np.einsum("ij,ij->i", w.conj(), w).real


def constant_C(a: WeightSequence, w, zs) -> float:
    """``C(a) = sum_n 2^n |w_n|^2 sum_k |gamma_k^(n)|^2 / a_k``."""
    w_sq = _w_sq(np.asarray(w))
    total = 0.0
    for z in zs:
        if not z.coeffs:
            continue
        inner_sum = 0.0
        for k, g in z.coeffs:
            inner_sum += abs(g) ** 2 / a[k]
        total += 2.0 ** z.n * w_sq[z.n - 1] * inner_sum
    if not total > 0:
        raise WeightError("C(a) is not positive; no approximant carries coefficients")
    return total


def explicit_lambda(w, zs, k_max: int) -> tuple:
    """Dyadic-weight coefficients ``lambda_k`` for ``k = 1..k_max``.

    Returns ``(lam, bound, contributing)`` where ``bound`` uses the exponent
    ``k + n/2 + 1`` in place of ``n + k - ceil(n/2) + 1`` and
    ``contributing[k-1]`` is false when no approximant has a nonzero
    ``gamma_k``; such ``lambda_k`` are 0.
    """
    w_sq = _w_sq(np.asarray(w))
    lam = [0.0] * k_max
    bound = [0.0] * k_max
    contributing = [False] * k_max
    for z in zs:
        n = z.n
        s = tail_start(n)
        for k, g in z.coeffs:
            if k > k_max:
                raise IndexError(f"approximant z_{n} uses k={k} beyond k_max={k_max}")
            mass = w_sq[n - 1] * abs(g) ** 2
            lam[k - 1] += 2.0 ** (n + k - s + 1) * mass
            bound[k - 1] += 2.0 ** (k + n / 2 + 1) * mass
            if g != 0:
                contributing[k - 1] = True
    return tuple(lam), tuple(bound), tuple(contributing)


def random_unit_vectors(dim: int, samples: int, seed, complex_field: bool) -> np.ndarray:
    """Rows are seeded random unit vectors."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((samples, dim))
    if complex_field:
        X = X + 1j * rng.standard_normal((samples, dim))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def _analysis(seq: TailSequence, X, k_max: int) -> np.ndarray:
    # |<v_k, x>|^2, shape (samples, k_max)
    V = seq.vectors(1, k_max)
    return np.abs(X @ V.conj().T) ** 2


def weighted_frame_check(a: WeightSequence, C_a: float, seq: TailSequence, samples: int = 1000,
                         seed=0, k_max: int | None = None) -> float:
    """Worst sampled ``|x|^2 / (C(a) sum_k a_k |<v_k, x>|^2)`` over unit ``x``."""
    k_max = a.k_max if k_max is None else k_max
    X = random_unit_vectors(seq.dim, samples, seed, seq.field == "complex")
    rhs = C_a * (_analysis(seq, X, k_max) @ np.asarray(a.values[:k_max]))
    if np.any(rhs <= 0):
        raise ArithmeticError("weighted analysis sum vanishes; the sequence is not total")
    return float(np.max(1.0 / rhs))


def frame_operator(lam, seq: TailSequence) -> np.ndarray:
    """``sum_k lambda_k v_k v_k^*`` for ``k = 1..len(lam)``."""
    V = seq.vectors(1, len(lam))
    return (V.T * np.asarray(lam, dtype=float)) @ V.conj()


def frame_operator_eig_check(lam, seq: TailSequence) -> float:
    """``lambda_min(sum_k lambda_k v_k v_k^*) - 1``; nonnegative iff the lower frame inequality holds."""
    S = frame_operator(lam, seq)
    S = (S + S.conj().T) / 2
    return float(np.linalg.eigvalsh(S)[0] - 1.0)


def inequality_chain(w, zs, seq: TailSequence, X) -> tuple:
    """Per-sample terms of the dyadic chain ``|x|^2 <= middle <= right``.

    ``middle = sum_n 2^n |w_n|^2 |<z_n, x>|^2`` and
    ``right = sum_n 2^n |w_n|^2 2^(1 - ceil(n/2)) sum_k 2^k |gamma_k|^2 |<v_k, x>|^2``.
    """
    X = np.atleast_2d(X)
    w_sq = _w_sq(np.asarray(w))
    lhs = np.einsum("ij,ij->i", X.conj(), X).real
    middle = np.zeros(X.shape[0])
    right = np.zeros(X.shape[0])
    for z in zs:
        if not z.coeffs:
            continue
        n = z.n
        zx = X @ z.vector(seq).conj()
        middle += 2.0 ** n * w_sq[n - 1] * np.abs(zx) ** 2
        acc = np.zeros(X.shape[0])
        for k, g in z.coeffs:
            vk = seq.vectors(k, k)[0]
            acc += 2.0 ** k * abs(g) ** 2 * np.abs(X @ vk.conj()) ** 2
        right += 2.0 ** n * w_sq[n - 1] * 2.0 ** (1 - tail_start(n)) * acc
    return lhs, middle, right


def fubini_sums(w, zs, seq: TailSequence, X, k_max: int) -> tuple:
    """The final double sum evaluated n-then-k and k-then-n (via ``lambda_k``)."""
    _, _, by_n = inequality_chain(w, zs, seq, X)
    lam, _, _ = explicit_lambda(w, zs, k_max)
    by_k = _analysis(seq, np.atleast_2d(X), k_max) @ np.asarray(lam)
    return by_n, by_k
