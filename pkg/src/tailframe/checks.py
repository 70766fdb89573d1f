"""Property suite over a finished pipeline run.

Each check recomputes its quantity from stored artefacts (``z_n`` is rebuilt
from the stored ``gamma``) and compares it to an oracle or a bound, yielding
an :class:`~tailframe.oracles.OracleResult`.
"""

from __future__ import annotations

import numpy as np

from . import oracles
from .adapted import membership_residual
from .approximants import SAFETY_FACTOR
from .numeric import project
from .oracles import compare
from .pipeline import PipelineResult
from .resolution import approximant_vectors, parseval_sweep, partial_projector, resolution_residual
from .weights import (
    WeightSequence,
    constant_C,
    fubini_sums,
    frame_operator_eig_check,
    inequality_chain,
    random_unit_vectors,
    weighted_frame_check,
)

__all__ = ["run_checks", "failures", "REL_EXACT", "SAMPLING_FRAME_TOL"]

# summation-order and formula agreement, relative to magnitude
REL_EXACT = 1e-12
# sampled frame minimum may undercut the eigenvalue by at most this (relative)
SAMPLING_FRAME_TOL = 1e-6


def _rel(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))


def _tower_checks(r: PipelineResult):
    tol = r.tol
    tower, seq = r.tower, r.seq
    dims = tower.dims
    drops = [dims[i] - dims[i + 1] for i in range(len(dims) - 1)]
    yield compare("tower.drops_in_0_1", sum(d not in (0, 1) for d in drops), 0, 0)

    mism = 0
    for n in range(1, seq.m + 2):
        ref = oracles.oracle_rank(list(seq.prefix[n - 1:]) + list(seq.cycle), tol.rank_tol)
        mism += int(ref != tower.space(n).rank)
    yield compare("tower.dims_vs_svd_rank", mism, 0, 0)

    nest = 0.0
    for n in range(1, len(tower.bases)):
        inner, outer = tower.bases[n], tower.bases[n - 1]
        for j in range(inner.rank):
            c = inner.column(j)
            nest = max(nest, float(np.linalg.norm(c - project(outer, c))))
    yield compare("tower.nesting_residual", nest, 0, tol.residual_tol, "le")

    incl = 0.0
    for b in tower.bases:
        for j in range(tower.h_inf.rank):
            c = tower.h_inf.column(j)
            incl = max(incl, float(np.linalg.norm(c - project(b, c))))
    yield compare("tower.h_inf_inclusion", incl, 0, tol.residual_tol, "le")

    decomposition = sum(
        int(dims[n - 1] != dims[n] + (1 if np.any(r.system.x[n - 1] != 0) else 0))
        for n in range(1, seq.m + 1)
    )
    yield compare("tower.orthogonal_decomposition", decomposition, 0, 0)

    stab = 0.0
    for n in range(tower.stab_index, len(tower.bases) + 1):
        a, b = tower.space(n), tower.h_inf
        if a.rank != b.rank:
            stab = np.inf
            break
        for src, dst in ((a, b), (b, a)):
            for j in range(src.rank):
                c = src.column(j)
                stab = max(stab, float(np.linalg.norm(c - project(dst, c))))
    yield compare("tower.stabilization", stab, 0, tol.residual_tol, "le")


def _adapted_checks(r: PipelineResult, X):
    tol = r.tol
    sys, seq, tower = r.system, r.seq, r.tower
    U = sys.u[sys.nonzero]
    G = U.conj() @ U.T
    yield compare("adapted.gram_defect", np.max(np.abs(G - np.eye(len(U)))) if len(U) else 0.0,
                  0, tol.residual_tol, "le")
    yield compare("adapted.nonzero_count", sys.nonzero_count, seq.dim, 0)
    yield compare("adapted.completeness_rank", oracles.oracle_rank(list(U), tol.rank_tol), seq.dim, 0)

    orth = 0.0
    for n in range(1, seq.m + 1):
        x = sys.x[n - 1]
        if np.any(x != 0):
            orth = max(orth, float(np.linalg.norm(project(tower.space(n + 1), x))))
    yield compare("adapted.x_orthogonal_to_next_tail", orth, 0, tol.residual_tol, "le")

    member = max(membership_residual(sys, tower, n) for n in range(1, sys.length + 1))
    yield compare("adapted.membership_residual", member, 0, tol.residual_tol, "le")

    coeffs = np.abs(X @ sys.u.conj().T) ** 2
    norms = np.einsum("ij,ij->i", X.conj(), X).real
    yield compare("adapted.parseval_identity",
                  np.max(np.abs(norms - coeffs.sum(axis=1)) / norms), 0, tol.residual_tol, "le")


def _approximant_checks(r: PipelineResult):
    tol = r.tol
    seq, sys, zs = r.seq, r.system, r.approximants
    yield compare("approx.strict_accuracy", max(z.err - z.eps for z in zs), 0, 0, "lt")

    recompute = 0.0
    for z in zs:
        direct = float(np.linalg.norm(sys.vector(z.n) - z.vector(seq)))
        recompute = max(recompute, abs(direct - z.err))
    yield compare("approx.err_recomputed", recompute, 0, REL_EXACT, "le")

    tail = min((k - z.start for z in zs for k in z.indices), default=0)
    yield compare("approx.tail_constraint", tail, 0, 0, "ge")

    minimal = 0
    for z in zs:
        if z.K is None or z.K == z.start:
            continue
        A = seq.vectors(z.start, z.K - 1).T
        u = sys.vector(z.n)
        g, *_ = np.linalg.lstsq(A, u, rcond=tol.rank_tol)
        if float(np.linalg.norm(u - A @ g)) < SAFETY_FACTOR * z.eps:
            minimal += 1
    yield compare("approx.window_minimality", minimal, 0, 0)


def _resolution_checks(r: PipelineResult, X, x_parseval):
    tol = r.tol
    seq, sys, zs = r.seq, r.system, r.approximants
    d = seq.dim
    I = np.eye(d)
    Z = approximant_vectors(zs, seq)
    Tm = r.perturbation.T

    live = sys.nonzero
    T_fresh = (sys.u[live].T @ (sys.u[live] - Z[live]).conj())
    yield compare("T.norm_vs_svd", r.perturbation.norm, oracles.oracle_norm(T_fresh), tol.residual_tol)
    yield compare("T.norm_le_eps_mass", r.perturbation.norm, r.perturbation.bound, tol.residual_tol, "le")
    yield compare("T.contraction", r.perturbation.norm, 1.0, 0, "lt")

    A = sys.u[live].T @ sys.u[live].conj()
    yield compare("series.parseval_sum", oracles.oracle_norm(A - I), 0, tol.residual_tol, "le")
    C = sys.u[live].T @ Z[live].conj()
    yield compare("series.mixed_identity", oracles.oracle_norm(C - (I - Tm)), 0, tol.residual_tol, "le")

    res = resolution_residual(r.duals.w, Z, d)
    yield compare("resolution.residual", res, 0, tol.residual_tol, "le")
    R = r.duals.w.T @ Z.conj()
    vec = np.max(np.linalg.norm((X @ R.T - X) @ (I - Tm).T, axis=1))
    yield compare("resolution.vector_level", vec, 0, tol.residual_tol, "le")

    yield compare("duals.neumann_vs_direct", r.duals.neumann_gap, 0, 10 * tol.neumann_tol, "le")
    ref = oracles.oracle_duals(Tm, sys.u)
    yield compare("duals.direct_vs_inverse", np.max(np.linalg.norm(ref - r.duals.w, axis=1)),
                  0, tol.residual_tol, "le")

    proj = 0.0
    for N in range(sys.length + 1):
        S = partial_projector(sys, N)
        proj = max(proj, oracles.oracle_norm(S @ S - S), oracles.oracle_norm(S - S.conj().T))
    yield compare("series.partial_projectors", proj, 0, tol.residual_tol, "le")

    gap = 0.0
    rises = 0.0
    for x in x_parseval:
        direct, tails = parseval_sweep(sys, x)
        nx = float(np.vdot(x, x).real)
        gap = max(gap, float(np.max(np.abs(direct - tails))) / nx)
        rises = max(rises, float(np.max(np.diff(direct), initial=0.0)) / nx)
    yield compare("parseval.tail_identity", gap, 0, tol.residual_tol, "le")
    yield compare("parseval.nonincreasing", rises, 0, tol.residual_tol, "le")


def _weight_checks(r: PipelineResult, X, samples, seed):
    tol = r.tol
    seq, zs, w = r.seq, r.approximants, r.duals.w
    cert = r.certificate
    k_max = r.k_max

    C_now = constant_C(cert.weights, w, zs)
    C_rev = oracles.oracle_constant_C(cert.weights.values, w, zs)
    yield compare("weights.C_reverse_order", _rel(C_now, C_rev), 0, REL_EXACT, "le")
    yield compare("weights.C_matches_certificate", _rel(cert.C_a, C_now), 0, REL_EXACT, "le")

    ratio = weighted_frame_check(cert.weights, C_now, seq, samples, seed)
    yield compare("weights.sampled_ratio", ratio, 1.0, tol.residual_tol, "le")
    eig_w = frame_operator_eig_check([C_now * a for a in cert.weights.values], seq)
    yield compare("weights.eig_slack_C", eig_w, 0, tol.residual_tol, "ge")

    lam_ref = oracles.oracle_lambda(w, zs, k_max)
    yield compare("lambda.vs_double_loop", _rel(cert.lam, lam_ref), 0, REL_EXACT, "le")
    over = max((lam - b) / max(1.0, b) for lam, b in zip(cert.lam, cert.lam_bound))
    yield compare("lambda.le_half_exponent_bound", over, 0, tol.residual_tol, "le")
    nonpos = sum(1 for lam, c in zip(cert.lam, cert.contributing) if c and not lam > 0)
    yield compare("lambda.positive_where_contributing", nonpos, 0, 0)
    eig = frame_operator_eig_check(lam_ref, seq)
    yield compare("lambda.eig_slack", eig, 0, tol.residual_tol, "ge")

    V = seq.vectors(1, k_max)
    sampled = oracles.oracle_min_sampled_frame(lam_ref, V, X)
    yield compare("lambda.sampled_vs_eig", sampled, eig, SAMPLING_FRAME_TOL * max(1.0, abs(eig) + 1), "ge")

    lhs, middle, right = inequality_chain(w, zs, seq, X)
    first = float(np.max((lhs - middle) / np.maximum(1.0, middle)))
    second = float(np.max((middle - right) / np.maximum(1.0, right)))
    yield compare("chain.norm_le_dyadic_sum", first, 0, tol.residual_tol, "le")
    yield compare("chain.dyadic_sum_le_tail_sum", second, 0, tol.residual_tol, "le")
    by_n, by_k = fubini_sums(w, zs, seq, X, k_max)
    yield compare("chain.fubini_reorder", _rel(by_n, by_k), 0, REL_EXACT, "le")

    # dyadic C(a) certificate, and its truncation monotonicity
    dy = WeightSequence.dyadic(k_max + seq.p + 1)
    C_dy = constant_C(dy, w, zs)
    base = frame_operator_eig_check([C_dy * a for a in dy.values[:k_max]], seq)
    longer = frame_operator_eig_check([C_dy * a for a in dy.values], seq)
    yield compare("weights.dyadic_C_eig_slack", base, 0, tol.residual_tol, "ge")
    yield compare("weights.truncation_monotone", longer, base, tol.residual_tol * max(1.0, abs(base)), "ge")


def run_checks(result: PipelineResult, samples: int = 1000, seed=0, parseval_samples: int = 100) -> list:
    """Evaluate the full property suite; returns a list of ``OracleResult``."""
    seq = result.seq
    complex_field = seq.field == "complex"
    rng = np.random.default_rng(seed)
    seeds = rng.integers(0, 2**63 - 1, size=3)
    X = random_unit_vectors(seq.dim, samples, seeds[0], complex_field)
    x_parseval = random_unit_vectors(seq.dim, parseval_samples, seeds[1], complex_field)
    x_parseval = x_parseval * np.random.default_rng(seeds[2]).uniform(0.5, 2.0, size=(parseval_samples, 1))
    out = []
    out.extend(_tower_checks(result))
    out.extend(_adapted_checks(result, X))
    out.extend(_approximant_checks(result))
    out.extend(_resolution_checks(result, X, x_parseval))
    out.extend(_weight_checks(result, X, samples, int(seeds[0])))
    return out


def failures(results) -> list:
    return [c for c in results if not c.passed]
