"""Finite tail-supported approximants ``z_n`` of the adapted vectors ``u_n``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .adapted import AdaptedSystem, tail_start
from .numeric import ToleranceConfig
from .parallel import pmap
from .tower import TailSequence, vector_at

__all__ = [
    "SAFETY_FACTOR",
    "ScheduleError",
    "InfeasibleApproximation",
    "EpsilonSchedule",
    "Approximant",
    "make_schedule",
    "default_max_tail",
    "build_z",
    "build_all",
]

SAFETY_FACTOR = 0.9


class ScheduleError(ValueError):
    """An accuracy schedule that is not positive or violates ``sum(eps_n^2) < 1``."""


class InfeasibleApproximation(ArithmeticError):
    def __init__(self, n, err, target, max_tail):
        super().__init__(
            f"u_{n}: best residual {err:.3e} over tail window up to k={max_tail} "
            f"does not beat {target:.3e}"
        )
        self.n = n
        self.err = err
        self.target = target
        self.max_tail = max_tail


@dataclass(frozen=True)
class EpsilonSchedule:
    kind: str
    values: tuple
    sum_sq: float

    def __post_init__(self):
        if not self.values:
            raise ScheduleError("schedule must contain at least one value")
        if any(not (v > 0 and math.isfinite(v)) for v in self.values):
            raise ScheduleError("every eps_n must be positive and finite")
        if not self.sum_sq < 1:
            raise ScheduleError(
                f"accuracy schedule violates sum(eps_n^2) < 1: got {self.sum_sq!r}"
            )

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n: int) -> float:
        """``eps_n`` (1-based)."""
        if not 1 <= n <= len(self.values):
            raise IndexError(f"schedule index must lie in [1, {len(self.values)}], got {n}")
        return self.values[n - 1]


def make_schedule(count: int, kind: str = "geometric", ratio: float = 0.5, mass: float = 0.25,
                  values=None) -> EpsilonSchedule:
    """Build an accuracy schedule ``eps_1, ..., eps_count``.

    ``geometric`` gives ``eps_n = c * ratio**n`` with ``c`` fixed so the squares
    sum to ``mass``.  ``explicit`` takes ``values``; all of them must satisfy
    the mass constraint and the first ``count`` are used.
    """
    if count < 1:
        raise ScheduleError("count must be at least 1")
    if kind == "geometric":
        if not 0 < ratio < 1:
            raise ScheduleError(f"geometric ratio must lie in (0, 1), got {ratio!r}")
        if not 0 < mass < 1:
            raise ScheduleError(f"geometric mass must lie in (0, 1), got {mass!r}")
        powers = [ratio ** (2 * n) for n in range(1, count + 1)]
        c = math.sqrt(mass / math.fsum(powers))
        eps = tuple(c * ratio ** n for n in range(1, count + 1))
    elif kind == "explicit":
        if values is None:
            raise ScheduleError("explicit schedule needs values")
        given = [float(v) for v in values]
        if any(not (v > 0 and math.isfinite(v)) for v in given):
            raise ScheduleError("every eps_n must be positive and finite")
        total = math.fsum(v * v for v in given)
        if not total < 1:
            raise ScheduleError(f"accuracy schedule violates sum(eps_n^2) < 1: got {total!r}")
        if len(given) < count:
            raise ScheduleError(f"explicit schedule has {len(given)} values, {count} needed")
        eps = tuple(given[:count])
    else:
        raise ScheduleError(f"unknown schedule kind {kind!r}")
    return EpsilonSchedule(kind, eps, math.fsum(e * e for e in eps))


@dataclass(frozen=True)
class Approximant:
    """``z_n = sum_k gamma_k v_k`` over ``start <= k <= K``.

    ``K`` is ``None`` for the zero placeholder.
    """

    n: int
    start: int
    K: int | None
    coeffs: tuple
    err: float
    eps: float

    @property
    def indices(self) -> list:
        return [k for k, _ in self.coeffs]

    def gamma(self, k: int):
        for j, g in self.coeffs:
            if j == k:
                return g
        return 0.0

    def vector(self, seq: TailSequence) -> np.ndarray:
        z = np.zeros(seq.dim, dtype=seq.dtype)
        for k, g in self.coeffs:
            z = z + g * vector_at(seq, k)
        return z


def default_max_tail(seq: TailSequence, start: int) -> int:
    # one full period past whichever comes later, the prefix or ``start``
    return max(seq.m + seq.p, start + seq.p - 1, start)


def build_z(u_n, n: int, seq: TailSequence, eps_n: float, tol: ToleranceConfig | None = None,
            max_tail: int | None = None, theta: float = SAFETY_FACTOR) -> Approximant:
    """Shortest tail window ``start..K`` whose least-squares fit beats ``theta * eps_n``.

    Coefficients are the minimum-norm least-squares solution, so repeated
    cycle vectors get a unique ``gamma``.  ``err`` is the realized residual.
    """
    tol = tol or ToleranceConfig()
    u_n = np.asarray(u_n)
    start = tail_start(n)
    if not np.any(u_n != 0):
        return Approximant(n, start, None, (), 0.0, eps_n)
    if max_tail is None:
        max_tail = default_max_tail(seq, start)
    if max_tail < start:
        raise ValueError(f"max_tail {max_tail} precedes tail start {start}")

    target = theta * eps_n
    block = seq.vectors(start, max_tail)
    best = math.inf
    for K in range(start, max_tail + 1):
        A = block[: K - start + 1].T
        gamma, *_ = np.linalg.lstsq(A, u_n, rcond=tol.rank_tol)
        err = float(np.linalg.norm(u_n - A @ gamma))
        best = min(best, err)
        if err < target:
            coeffs = tuple((start + j, g.item()) for j, g in enumerate(gamma))
            return Approximant(n, start, K, coeffs, err, eps_n)
    raise InfeasibleApproximation(n, best, target, max_tail)


def build_all(sys: AdaptedSystem, seq: TailSequence, schedule: EpsilonSchedule,
              tol: ToleranceConfig | None = None, max_tail: int | None = None,
              workers: int | None = None) -> list:
    if len(schedule) < sys.length:
        raise ScheduleError(f"schedule has {len(schedule)} values for {sys.length} adapted vectors")

    def one(n):
        return build_z(sys.vector(n), n, seq, schedule[n], tol, max_tail)

    return pmap(one, range(1, sys.length + 1), workers)
