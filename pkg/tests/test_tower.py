import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tailframe import oracles
from tailframe.demos import random_vectors
from tailframe.numeric import ToleranceConfig, project
from tailframe.tower import TailSequence, TotalityError, build_tower, succ_diff_dim, vector_at

from conftest import e, seq_of

TOL = ToleranceConfig()


def labeled(m, p, dim=1):
    prefix = [np.full(dim, float(k)) for k in range(1, m + 1)]
    cycle = [np.full(dim, 100.0 + j) for j in range(1, p + 1)]
    return seq_of(prefix, cycle, dim=dim)


def test_vector_at_indexing():
    s = labeled(2, 2)
    assert vector_at(s, 3)[0] == 101  # first cycle slot
    assert vector_at(s, 6)[0] == 102  # (6 - 3) mod 2 = 1
    assert vector_at(s, 1)[0] == 1
    assert np.all(vector_at(labeled(3, 0), 9) == 0)
    with pytest.raises(IndexError):
        vector_at(s, 0)


def test_standard_basis_tower():
    t = build_tower(seq_of([e(3, 0), e(3, 1), e(3, 2)]), TOL)
    assert t.dims == [3, 2, 1, 0]
    assert t.h_inf.rank == 0
    assert t.stab_index == 4
    assert [succ_diff_dim(t, n) for n in (1, 2, 3)] == [1, 1, 1]


def test_cyclic_tower():
    t = build_tower(seq_of([e(3, 0)], [e(3, 1), e(3, 2)]), TOL)
    assert t.dims == [3, 2]
    assert t.h_inf.rank == 2
    assert t.stab_index == 2
    assert t.space(17) is t.h_inf


def test_redundant_vector_drop_zero():
    # v_2 = e1 is spanned by v_3, v_4
    t = build_tower(seq_of([e(2, 0), e(2, 0), e(2, 0), e(2, 1)]), TOL)
    assert succ_diff_dim(t, 2) == 0
    with pytest.raises(IndexError):
        succ_diff_dim(t, 5)


def test_totality_rejected():
    with pytest.raises(TotalityError):
        build_tower(seq_of([e(3, 0), e(3, 1)]), TOL)
    with pytest.raises(TotalityError):
        seq_of([e(3, 0)], [e(3, 0)]).check_total(TOL)


def test_real_field_rejects_complex_entries():
    with pytest.raises(ValueError):
        TailSequence(2, np.array([[1j, 0]]), np.zeros((0, 2)), "real")


def test_random_prefix_dims_match_svd_oracle():
    s = random_vectors(4, 5, 0, seed=11)
    t = build_tower(s, TOL)
    ref = [oracles.oracle_rank(list(s.prefix[n - 1:]), TOL.rank_tol) for n in range(1, 7)]
    assert t.dims == ref == [4, 4, 3, 2, 1, 0]
    drops = np.diff(t.dims)
    assert set(drops) <= {0, -1}


def test_succ_diff_matches_residual_rule():
    for seed in range(20):
        s = random_vectors(3, 6, seed % 3, seed=seed)
        t = build_tower(s, TOL)
        for n in range(1, s.m + 1):
            tail_rank = oracles.oracle_rank(list(s.prefix[n - 1:]) + list(s.cycle), TOL.rank_tol)
            next_rank = oracles.oracle_rank(list(s.prefix[n:]) + list(s.cycle), TOL.rank_tol)
            assert succ_diff_dim(t, n) == tail_rank - next_rank
            v = s.prefix[n - 1]
            residual = np.linalg.norm(v - project(t.space(n + 1), v))
            assert (succ_diff_dim(t, n) == 1) == (residual > TOL.rank_tol * max(1, np.linalg.norm(v)))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 8), st.integers(0, 3), st.integers(0, 2**20),
       st.sampled_from(["real", "complex"]))
def test_tower_laws(dim, m, p, seed, field):
    if m + p < dim:
        m = dim - p if dim > p else m
    s = random_vectors(dim, m, p, seed, field)
    t = build_tower(s, TOL)
    dims = t.dims
    assert all(a - b in (0, 1) for a, b in zip(dims, dims[1:]))
    for n in range(1, len(t.bases)):
        for j in range(t.bases[n].rank):
            c = t.bases[n].column(j)
            assert np.linalg.norm(c - project(t.bases[n - 1], c)) <= TOL.residual_tol
    for b in t.bases:
        assert b.gram_defect() <= TOL.residual_tol
        for j in range(t.h_inf.rank):
            c = t.h_inf.column(j)
            assert np.linalg.norm(c - project(b, c)) <= TOL.residual_tol
    assert dims[t.stab_index - 1] == t.h_inf.rank
