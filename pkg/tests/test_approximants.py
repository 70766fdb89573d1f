import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tailframe.adapted import canonical_x, interleave
from tailframe.approximants import (
    SAFETY_FACTOR,
    InfeasibleApproximation,
    ScheduleError,
    build_all,
    build_z,
    default_max_tail,
    make_schedule,
)
from tailframe.demos import random_vectors
from tailframe.numeric import ToleranceConfig
from tailframe.tower import build_tower, vector_at

from conftest import e, seq_of

TOL = ToleranceConfig()


def system_for(seq):
    tower = build_tower(seq, TOL)
    return interleave(canonical_x(seq, tower, TOL), tower.h_inf)


def test_geometric_schedule():
    s = make_schedule(4, ratio=0.5, mass=0.25)
    assert math.isclose(sum(v * v for v in s.values), 0.25, rel_tol=1e-14)
    for a, b in zip(s.values, s.values[1:]):
        assert math.isclose(b / a, 0.5, rel_tol=1e-14)


def test_geometric_schedule_mass_recomputed():
    s = make_schedule(10, ratio=0.7, mass=0.5)
    total = 0.0
    for v in reversed(s.values):
        total += v ** 2
    assert abs(total - 0.5) <= 1e-12


def test_explicit_schedule_rejected():
    with pytest.raises(ScheduleError, match=r"sum\(eps_n\^2\) < 1"):
        make_schedule(2, "explicit", values=[0.9, 0.5])
    with pytest.raises(ScheduleError):
        make_schedule(2, "explicit", values=[0.1, -0.1])
    with pytest.raises(ScheduleError):
        make_schedule(3, ratio=1.2)
    with pytest.raises(ScheduleError):
        make_schedule(3, "explicit", values=[0.1, 0.1])


def test_zero_placeholder():
    s = seq_of([e(2, 0), e(2, 1)])
    z = build_z(np.zeros(2), 2, s, 0.1, TOL)
    assert z.coeffs == () and z.err == 0 and z.K is None


def test_tail_vector_exact():
    s = seq_of([e(3, 0), e(3, 1), e(3, 2)])
    z = build_z(e(3, 0), 1, s, 0.1, TOL)
    assert z.coeffs == ((1, 1.0),)
    assert z.err == 0


def test_small_eps_forces_longer_window():
    s = random_vectors(4, 8, 0, seed=3)
    sys = system_for(s)
    n = int(np.flatnonzero(sys.nonzero)[0]) + 1
    u = sys.vector(n)
    z = build_z(u, n, s, 1e-3, TOL)
    assert z.K > z.start
    assert 0 <= z.err < 1e-3
    direct = np.linalg.norm(u - sum(g * vector_at(s, k) for k, g in z.coeffs))
    assert abs(direct - z.err) <= 1e-12
    # the next shorter window fails the safety target
    A = s.vectors(z.start, z.K - 1).T
    g, *_ = np.linalg.lstsq(A, u, rcond=None)
    assert np.linalg.norm(u - A @ g) >= SAFETY_FACTOR * 1e-3


def test_infeasible_when_window_too_short():
    s = seq_of([e(2, 0), e(2, 1)])
    sys = system_for(s)
    sys_u = sys.vector(1)  # x_1 = e1, but force the window to forbid v_1
    with pytest.raises(InfeasibleApproximation):
        build_z(sys_u + e(2, 1) * 0, 3, s, 0.1, TOL, max_tail=2)


def test_window_covers_cycle_past_prefix():
    # H_inf has dim 3 > m = 0, so u_6 = y_3 starts at k = 3; the cycle
    # position 3 alone (e1 + e3) cannot reach y_3 = e3
    s = seq_of([], [e(3, 0), e(3, 1), e(3, 0) + e(3, 2)], dim=3)
    sys = system_for(s)
    np.testing.assert_allclose(np.abs(sys.vector(6)), e(3, 2), atol=1e-14)
    assert default_max_tail(s, 3) == 5
    with pytest.raises(InfeasibleApproximation):
        build_z(sys.vector(6), 6, s, 0.1, TOL, max_tail=s.m + s.p)
    z = build_z(sys.vector(6), 6, s, 0.1, TOL)
    assert z.err < 0.1 and min(z.indices) >= 3


def test_min_norm_for_repeated_cycle():
    s = seq_of([], [e(2, 0), e(2, 1)], dim=2)
    z = build_z(e(2, 0), 3, s, 0.01, TOL, max_tail=4)
    # window k=2..3 is (e2, e1): exact with gamma (0, 1)
    assert z.K == 3
    np.testing.assert_allclose([g for _, g in z.coeffs], [0.0, 1.0], atol=1e-14)
    z = build_z(e(2, 0) + e(2, 1), 1, seq_of([], [e(2, 0), e(2, 0) * 1.0, e(2, 1)]), 0.01, TOL)
    # e1 appears twice: minimum norm splits its coefficient evenly
    np.testing.assert_allclose([g for _, g in z.coeffs], [0.5, 0.5, 1.0], atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10), st.integers(0, 3), st.integers(0, 2**20),
       st.sampled_from(["real", "complex"]))
def test_approximant_invariants(dim, m, p, seed, field):
    if m + p < dim:
        m = dim - p
    s = random_vectors(dim, m, p, seed, field)
    sys = system_for(s)
    sched = make_schedule(sys.length)
    zs = build_all(sys, s, sched, TOL, workers=2)
    for z in zs:
        assert z.err < z.eps
        assert all(k >= z.start for k in z.indices)
        if z.K is not None:
            errs = []
            for K in range(z.start, z.K + 1):
                A = s.vectors(z.start, K).T
                g, *_ = np.linalg.lstsq(A, sys.vector(z.n), rcond=TOL.rank_tol)
                errs.append(np.linalg.norm(sys.vector(z.n) - A @ g))
            assert all(b <= a + TOL.residual_tol for a, b in zip(errs, errs[1:]))
