import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rittl1.fractional import trajectory
from rittl1.functionals import (
    abel_check,
    abel_constant,
    block_functional,
    dyadic_blocks,
    gap_subsequence,
    local_extrema,
    lp_square_function,
    maximal_function,
    oscillation_columns,
    oscillation_norm,
    square_function,
    variation_columns,
    variation_functional,
    variation_norm,
)
from rittl1.measure import SpatialSequence, dirac, indicator, lazy_walk

seqs = st.lists(st.floats(-10, 10, allow_nan=False), min_size=2, max_size=10)


def brute_variation(x, s):
    best = 0.0
    for r in range(2, len(x) + 1):
        for idx in itertools.combinations(range(len(x)), r):
            best = max(best, sum(abs(x[b] - x[a]) ** s for a, b in zip(idx, idx[1:])))
    return best ** (1.0 / s)


@pytest.fixture(scope="module")
def lazy_traj():
    f = SpatialSequence(-2, np.array([1.0, -0.5, 2.0, 0.0, 1.5]))
    return trajectory(lazy_walk(), 1, f, 64)


def test_variation_examples():
    assert variation_norm([0, 1, 0], 1) == pytest.approx(2.0)
    assert variation_norm([0, 1, 0], 2) == pytest.approx(np.sqrt(2.0))
    for s in (1.0, 1.5, 2.0, 4.0):
        assert variation_norm([0, 1, 2, 3], s) == pytest.approx(3.0)
    # the optimal subsequence skips an inner pair of extrema
    assert variation_norm([0, 1, 0.9, 2], 2) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        variation_norm([0, 1], 0.5)


def test_local_extrema_collapses_plateaus():
    np.testing.assert_array_equal(local_extrema([0, 1, 1, 2, 2, 1, 3]), [0, 2, 1, 3])


@settings(max_examples=80, deadline=None)
@given(seqs, st.sampled_from([1.0, 1.3, 2.0, 3.5]))
def test_variation_against_brute_force(x, s):
    assert variation_norm(x, s) == pytest.approx(brute_variation(x, s), rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(seqs.filter(lambda v: len(v) == 8), min_size=1, max_size=6),
       st.sampled_from([1.0, 2.0, 3.0]))
def test_variation_columns_agree_with_rows(cols, s):
    mat = np.array(cols).T
    expect = [variation_norm(c, s) for c in cols]
    np.testing.assert_allclose(variation_columns(mat, s), expect, rtol=1e-12, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(seqs)
def test_variation_decreases_in_s_and_dominates_oscillation(x):
    v = [variation_norm(x, s) for s in (1.0, 1.5, 2.0, 3.0)]
    assert all(a >= b - 1e-12 for a, b in zip(v, v[1:]))
    blocks = dyadic_blocks(len(x))
    for s in (1.0, 2.0, 3.0):
        assert oscillation_norm(x, blocks, s) <= variation_norm(x, s) + 1e-12


def test_oscillation_examples():
    x = [3.0, -1.0, 4.0, 1.0, 5.0]
    assert oscillation_norm(x, [1], 1) == pytest.approx(6.0)
    assert oscillation_norm([2.0] * 6, [1, 2, 4], 2) == 0.0
    assert oscillation_norm([0, 1, 0, 2], [1, 3], 2) == pytest.approx(np.sqrt(5.0))
    mat = np.array([[0, 1, 0, 2], [1, 1, 1, 1]], dtype=float).T
    np.testing.assert_allclose(oscillation_columns(mat, [1, 3], 2), [np.sqrt(5.0), 0.0])
    with pytest.raises(ValueError):
        oscillation_norm(x, [2, 1], 2)


def test_square_function_trivial_cases(lazy_traj):
    f = SpatialSequence(0, np.array([1.0, 2.0]))
    assert square_function(trajectory(dirac(0), 1, f, 8), 1.0, 3.0).l1_norm == 0.0
    q = square_function(lazy_traj, 1.7, 2.5, N=1)
    np.testing.assert_allclose(q.values, np.abs(lazy_traj.values[1]), rtol=1e-14)


def test_square_function_by_hand(lazy_traj):
    alpha, s, N = 1.0, 3.0, 20
    V = lazy_traj.values[1:N + 1]
    n = np.arange(1, N + 1)[:, None]
    ref = (np.sum(n ** alpha * np.abs(V) ** s, axis=0)) ** (1 / s)
    got = square_function(lazy_traj, alpha, s, N=[5, N])
    np.testing.assert_allclose(got[1].values, ref, rtol=1e-13)
    assert got[0].l1_norm <= got[1].l1_norm


def test_maximal_below_square(lazy_traj):
    for alpha in (0.3, 0.5, 1.0):
        M = maximal_function(lazy_traj, alpha, N=64).values
        for s in (1.0, 2.0, 3.0):
            Q = square_function(lazy_traj, alpha * s, s, N=64).values
            assert np.all(M <= Q * (1 + 1e-12) + 1e-300)
    assert maximal_function(trajectory(dirac(0), 1, indicator(0), 4), 0.5).l1_norm == 0.0


def test_lp_square_weight_by_hand(lazy_traj):
    N = 30
    V = lazy_traj.values[1:N + 1]
    n = np.arange(1, N + 1)[:, None]
    q = np.sqrt(np.sum((n + 1.0) * V ** 2, axis=0))
    res = lp_square_function(lazy_traj, 2.0, N=N)
    np.testing.assert_allclose(res.values, q, rtol=1e-13)
    assert res.l1_norm == pytest.approx(np.sqrt(np.sum(q ** 2)), rel=1e-13)
    with pytest.raises(ValueError):
        lp_square_function(trajectory(lazy_walk(), 0, indicator(0), 4))


def test_variation_functional_shapes(lazy_traj):
    v, o = variation_functional(lazy_traj, 0.0, 2.0, N=32)
    assert v.values.shape == o.values.shape == lazy_traj.sites.shape
    assert np.all(o.values <= v.values + 1e-14)
    assert o.params["blocks"] == [1, 2, 4, 8, 16, 32]


def test_gap_sequence_examples():
    np.testing.assert_array_equal(gap_subsequence(0.0, 6).indices, [1, 2, 3, 4, 5, 6])
    np.testing.assert_array_equal(gap_subsequence(0.5, 20, n1=4).indices, [4, 6, 8, 11, 14, 18])
    for alpha in (0.1, 0.5, 0.9):
        idx = gap_subsequence(alpha, 10 ** 6).indices
        keep = idx[:-1] >= 4
        r = np.diff(idx)[keep] / idx[:-1][keep] ** alpha
        assert r.min() >= 0.5 and r.max() <= 2.0


def test_block_functional_constant_and_single_block(lazy_traj):
    flat = trajectory(dirac(0), 0, SpatialSequence(0, np.array([1.0, -2.0])), 40)
    gaps = gap_subsequence(0.5, 40)
    for mode in ("endpoint-diff", "block-max", "block-variation"):
        assert block_functional(flat, gaps, 0.0, 2.0, mode).l1_norm == 0.0
    one = gap_subsequence(0.5, 5, n1=3)        # blocks [3, 5)
    np.testing.assert_array_equal(one.indices, [3, 5])
    res = block_functional(lazy_traj, one, 0.0, 2.0, "endpoint-diff", N=5)
    np.testing.assert_allclose(res.values, np.abs(lazy_traj.values[3] - lazy_traj.values[5]),
                               rtol=1e-14)


def test_abel_constant_and_check(lazy_traj):
    for alpha in (0.1, 0.5, 0.99):
        assert abel_constant(alpha, 1000) == pytest.approx(1.0)
    assert abel_constant(1.5, 100) > 1.0
    f = lazy_traj.f0
    a = trajectory(lazy_walk(), 1, f, 64)
    b = trajectory(lazy_walk(), 2, f, 64)
    b = type(b)(b.mu, b.m, b.f0, a.sites, a.weights,
                np.array([[t.at(x) for x in a.sites] for t in [b.term(n) for n in range(65)]]),
                b.error_budget)
    chk = abel_check(a, b, 0.5)
    assert chk.violations == 0 and chk.checked == 64 * a.sites.size
