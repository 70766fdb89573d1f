"""Acceptance gate: one PASS/FAIL line per criterion, at the pinned tolerances.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""

import math
import time
from pathlib import Path

import numpy as np

from tailframe import cli, oracles
from tailframe.adapted import membership_residual, tail_start
from tailframe.demos import _instance, random_corpus
from tailframe.io import dumps
from tailframe.pipeline import inject_gamma_fault
from tailframe.resolution import (
    approximant_vectors,
    neumann_apply,
    neumann_terms,
    parseval_sweep,
    resolution_residual,
)
from tailframe.tower import build_tower
from tailframe.weights import (
    WeightSequence,
    constant_C,
    explicit_lambda,
    frame_operator_eig_check,
    fubini_sums,
    random_unit_vectors,
    weighted_frame_check,
)

from conftest import CORPUS_SEED

SHIPPED = Path(__file__).parent.parent / "instances"


def report(number, ok, detail):
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {number:2d}: {detail}")
    assert ok, detail


def rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


def test_criterion_01_tower_laws():
    t0 = time.perf_counter()
    corpus = random_corpus(50, CORPUS_SEED)
    bad_drops, nest = 0, 0.0
    for _, seq in corpus:
        tower = build_tower(seq)
        dims = tower.dims
        bad_drops += sum(a - b not in (0, 1) for a, b in zip(dims, dims[1:]))
        for n in range(1, tower.m + 1):
            big, small = tower.space(n), tower.space(n + 1)
            if small.rank:
                Q = small.columns
                nest = max(nest, np.linalg.norm(Q - big.projector() @ Q, 2))
    elapsed = time.perf_counter() - t0
    fields = {seq.field for _, seq in corpus}
    report(1, bad_drops == 0 and nest <= 1e-8 and elapsed < 10 and fields == {"real", "complex"},
           f"{len(corpus)} instances, bad drops {bad_drops}, max nesting residual {nest:.2e}, "
           f"{elapsed:.2f} s")


def test_criterion_02_adapted_basis(corpus_results):
    gram, count_bad, member = 0.0, 0, 0.0
    for _, r in corpus_results:
        U = r.system.u[r.system.nonzero]
        gram = max(gram, np.max(np.abs(U.conj() @ U.T - np.eye(len(U)))))
        count_bad += len(U) != r.seq.dim
        for n in range(1, r.system.length + 1):
            member = max(member, membership_residual(r.system, r.tower, n))
    report(2, gram <= 1e-8 and count_bad == 0 and member <= 1e-8,
           f"max Gram defect {gram:.2e}, count mismatches {count_bad}, max membership residual {member:.2e}")


def test_criterion_03_approximant_accuracy(corpus_results):
    violations, tail_bad, nondegenerate = 0, 0, 0
    for _, r in corpus_results:
        Z = approximant_vectors(r.approximants, r.seq)
        for z in r.approximants:
            err = np.linalg.norm(r.system.u[z.n - 1] - Z[z.n - 1])
            violations += not err < r.schedule[z.n]
            tail_bad += any(k < tail_start(z.n) for k in z.indices)
        nondegenerate += any(z.err > 0 for z in r.approximants)
    report(3, violations == 0 and tail_bad == 0 and nondegenerate > 0,
           f"err >= eps in {violations} cases, tail violations {tail_bad}, "
           f"{nondegenerate} instances with some err > 0")


def test_criterion_04_perturbation_bound(corpus_results):
    worst_mass, worst_half = -math.inf, -math.inf
    for _, r in corpus_results:
        T = r.perturbation.T
        norm = oracles.oracle_norm(T)
        worst_mass = max(worst_mass, norm - math.sqrt(r.schedule.sum_sq))
        worst_half = max(worst_half, norm - 0.5)
    report(4, worst_mass <= 1e-10 and worst_half <= 1e-10,
           f"max |T| - sqrt(sum eps^2) = {worst_mass:.3e}, max |T| - 0.5 = {worst_half:.3e}")


def test_criterion_05_mixed_series(corpus_results):
    mixed, pars = 0.0, 0.0
    for _, r in corpus_results:
        d = r.seq.dim
        U = r.system.u
        Z = approximant_vectors(r.approximants, r.seq)
        C = sum(np.outer(U[i], Z[i].conj()) for i in range(len(U)))
        A = sum(np.outer(U[i], U[i].conj()) for i in range(len(U)))
        mixed = max(mixed, oracles.oracle_norm(C - (np.eye(d) - r.perturbation.T)))
        pars = max(pars, oracles.oracle_norm(A - np.eye(d)))
    report(5, mixed <= 1e-8 and pars <= 1e-8,
           f"max |sum u z* - (I - T)| = {mixed:.2e}, max |sum u u* - I| = {pars:.2e}")


def test_criterion_06_resolution(corpus_results):
    res, gap = 0.0, 0.0
    for _, r in corpus_results:
        Z = approximant_vectors(r.approximants, r.seq)
        res = max(res, resolution_residual(r.duals.w, Z, r.seq.dim))
        T = r.perturbation.T
        M = neumann_terms(r.perturbation.norm, 1.0, 1e-12)
        for u, w in zip(r.system.u, r.duals.w):
            gap = max(gap, np.linalg.norm(neumann_apply(T, u, M) - w))
    report(6, res <= 1e-8 and gap <= 1e-10,
           f"max |sum w z* - I| = {res:.2e}, max |Neumann - direct| = {gap:.2e}")


def _weight_families(k_max):
    yield "dyadic", WeightSequence.dyadic(k_max)
    for s in (1, 2, 3):
        rng = np.random.default_rng(1000 + s)
        yield f"explicit{s}", WeightSequence.explicit(rng.uniform(0.1, 10.0, size=k_max))


def test_criterion_07_weighted_lower_frame(corpus_results):
    worst_ratio, worst_eig, runs = -math.inf, math.inf, 0
    for i, (_, r) in enumerate(corpus_results):
        for _, a in _weight_families(r.k_max):
            C = constant_C(a, r.duals.w, r.approximants)
            worst_ratio = max(worst_ratio, weighted_frame_check(a, C, r.seq, 1000, seed=i))
            worst_eig = min(worst_eig, 1.0 + frame_operator_eig_check([C * x for x in a.values], r.seq))
            runs += 1
    report(7, worst_ratio <= 1 + 1e-8 and worst_eig >= 1 - 1e-8,
           f"{runs} (instance, weights) runs, worst sampled ratio {worst_ratio:.6f}, "
           f"min lambda_min {worst_eig:.6f}")


def test_criterion_08_explicit_lambda(corpus_results):
    match, over, slack, fubini = 0.0, 0, math.inf, 0.0
    for i, (_, r) in enumerate(corpus_results):
        lam, bound, _ = explicit_lambda(r.duals.w, r.approximants, r.k_max)
        ref = oracles.oracle_lambda(r.duals.w, r.approximants, r.k_max)
        match = max(match, max(rel(a, b) for a, b in zip(lam, ref)))
        over += sum(a > b * (1 + 1e-12) for a, b in zip(lam, bound))
        slack = min(slack, frame_operator_eig_check(lam, r.seq))
        X = random_unit_vectors(r.seq.dim, 100, i, r.seq.field == "complex")
        by_n, by_k = fubini_sums(r.duals.w, r.approximants, r.seq, X, r.k_max)
        fubini = max(fubini, max(rel(a, b) for a, b in zip(by_n, by_k)))
    report(8, match <= 1e-12 and over == 0 and slack >= -1e-8 and fubini <= 1e-12,
           f"max rel gap to double loop {match:.1e}, bound violations {over}, "
           f"min eig slack {slack:.3e}, max Fubini gap {fubini:.1e}")


def test_criterion_09_parseval_sweep(corpus_results):
    gap, rise = 0.0, 0.0
    for i, (_, r) in enumerate(corpus_results):
        rng = np.random.default_rng(i)
        for _ in range(100):
            x = rng.standard_normal(r.seq.dim)
            if r.seq.field == "complex":
                x = x + 1j * rng.standard_normal(r.seq.dim)
            nx = float(np.vdot(x, x).real)
            direct, tails = parseval_sweep(r.system, x)
            gap = max(gap, np.max(np.abs(direct - tails)) / nx)
            rise = max(rise, np.max(np.diff(direct), initial=0.0) / nx)
    report(9, gap <= 1e-8 and rise <= 1e-8,
           f"max |x - S_N x|^2 vs tail gap {gap:.2e}, max increase {rise:.2e} (relative to |x|^2)")


def test_criterion_10_determinism(tmp_path, corpus, capsys):
    paths = sorted(SHIPPED.glob("*.json"))
    name, seq = corpus[1]
    extra = tmp_path / "corpus.json"
    extra.write_text(dumps(_instance(seq.field, seq.dim, list(seq.prefix), list(seq.cycle), seed=5)))
    paths.append(extra)
    same = 0
    for p in paths:
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        codes = [cli.main(["build", str(p), "-o", str(out)]) for out in (a, b)]
        same += codes == [0, 0] and a.read_bytes() == b.read_bytes()
    capsys.readouterr()
    report(10, same == len(paths), f"{same}/{len(paths)} instances built twice with byte-identical reports")


def test_criterion_11_fault_injection(corpus_results, capsys):
    caught = 0
    for _, r in corpus_results:
        bad = inject_gamma_fault(r, delta=0.5)
        Z = approximant_vectors(bad.approximants, bad.seq)
        caught += resolution_residual(bad.duals.w, Z, bad.seq.dim) > 1e-8
    codes = {p.stem: cli.main(["verify", str(p), "--perturb-gamma", "0.5"]) for p in sorted(SHIPPED.glob("*.json"))}
    out = capsys.readouterr().out
    flagged = out.count("FAIL  resolution.residual") + out.count("FAIL resolution.residual")
    ok = caught == len(corpus_results) and all(c != 0 for c in codes.values()) and flagged == len(codes)
    report(11, ok, f"resolution residual broken on {caught}/{len(corpus_results)} instances; "
                   f"verify exit codes {sorted(set(codes.values()))} on {len(codes)} shipped instances")
