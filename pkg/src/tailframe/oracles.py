"""Brute-force reference computations.

Nothing here calls into the pipeline's own arithmetic: ranks come from
singular values, ``lambda_k`` from a full double loop, ``C(a)`` from a
reversed summation, and duals from an explicit inverse.  Agreement between
these and the pipeline is the evidence the certificate reports.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np
import scipy.linalg

__all__ = [
    "OracleResult",
    "compare",
    "oracle_rank",
    "oracle_norm",
    "oracle_lambda",
    "oracle_constant_C",
    "oracle_duals",
    "oracle_min_sampled_frame",
]


@dataclass(frozen=True)
class OracleResult:
    """One measured-vs-reference comparison.

    ``relation`` is ``"abs"`` (``|measured - reference| <= tolerance``),
    ``"le"`` (``measured <= reference + tolerance``), ``"lt"`` (strict) or
    ``"ge"`` (``measured >= reference - tolerance``).
    """

    name: str
    measured: float
    reference: float
    tolerance: float
    relation: str
    passed: bool

    def as_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        sym = {"abs": "~=", "le": "<=", "lt": "<", "ge": ">="}[self.relation]
        return (f"{status}  {self.name:<34s} measured={self.measured:.6e} "
                f"{sym} reference={self.reference:.6e} (tol {self.tolerance:.1e})")


def compare(name, measured, reference, tolerance, relation="abs") -> OracleResult:
    measured = float(measured)
    reference = float(reference)
    if relation == "abs":
        ok = abs(measured - reference) <= tolerance
    elif relation == "le":
        ok = measured <= reference + tolerance
    elif relation == "lt":
        ok = measured < reference
    elif relation == "ge":
        ok = measured >= reference - tolerance
    else:
        raise ValueError(f"unknown relation {relation!r}")
    ok = ok and np.isfinite(measured)
    return OracleResult(name, measured, reference, float(tolerance), relation, bool(ok))


def oracle_rank(vectors, rank_tol: float = 1e-10) -> int:
    """Rank by singular-value thresholding at ``rank_tol * sigma_max``."""
    vectors = [np.asarray(v) for v in vectors]
    if not vectors:
        return 0
    s = scipy.linalg.svdvals(np.vstack(vectors))
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rank_tol * s[0]))


def oracle_norm(M) -> float:
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(scipy.linalg.svdvals(M)[0])


def oracle_lambda(w, zs, k_max: int) -> list:
    """``lambda_k`` by looping over every ``(n, k)`` pair, zero terms included."""
    w = np.asarray(w)
    by_n = {z.n: z for z in zs}
    lam = []
    for k in range(1, k_max + 1):
        total = 0.0
        for n in range(1, w.shape[0] + 1):
            m = -(-n // 2)
            if m > k:
                continue
            gamma = by_n[n].gamma(k) if n in by_n else 0.0
            total += 2.0 ** (n + k - m + 1) * np.linalg.norm(w[n - 1]) ** 2 * abs(gamma) ** 2
        lam.append(float(total))
    return lam


def oracle_constant_C(a_values, w, zs) -> float:
    """``C(a)`` summed in reverse order over ``n`` and ``k``."""
    w = np.asarray(w)
    total = 0.0
    for z in reversed(list(zs)):
        inner_sum = 0.0
        for k, g in reversed(list(z.coeffs)):
            inner_sum += abs(g) ** 2 / a_values[k - 1]
        total += 2.0 ** z.n * np.linalg.norm(w[z.n - 1]) ** 2 * inner_sum
    return total


def oracle_duals(T, u) -> np.ndarray:
    """Rows ``(I - T)^{-1} u_n`` through an explicit inverse."""
    T = np.asarray(T)
    inv = scipy.linalg.inv(np.eye(T.shape[0]) - T)
    return np.asarray(u) @ inv.T


def oracle_min_sampled_frame(lam, V, X) -> float:
    """``min_x sum_k lambda_k |<v_k, x>|^2 - 1`` over unit rows of ``X``."""
    coeffs = np.abs(np.asarray(X) @ np.asarray(V).conj().T) ** 2
    return float(np.min(coeffs @ np.asarray(lam)) - 1.0)
