import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rittl1.fractional import (
    cutoff_for_tail,
    difference_measure,
    frac_coeff,
    nu_alpha_measure,
    series_tail,
    trajectory,
)
from rittl1.measure import (
    SpatialSequence,
    apply_to_sequence,
    convolution_power,
    dirac,
    indicator,
    lazy_walk,
    total_variation,
)
from rittl1.symbols import half_step_grid, symbol_from_measure


def test_small_coefficients():
    np.testing.assert_allclose(frac_coeff(0.5, 3).values, [0.5, 0.125, 0.0625], rtol=1e-15)
    with pytest.raises(IndexError):
        frac_coeff(0.5, 3)[4]
    with pytest.raises(ValueError):
        frac_coeff(1.0, 3)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 0.99), st.integers(1, 3000))
def test_tail_is_complement_of_partial_sum(alpha, K):
    c = frac_coeff(alpha, K)
    assert c.tail > 0
    assert c.values.sum() + c.tail == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(c.values) < 0)


def test_cutoff_for_tail_is_minimal():
    K = cutoff_for_tail(0.5, 1e-2)
    assert series_tail(0.5, K) <= 1e-2 < series_tail(0.5, K - 1)


def test_nu_alpha_measure_mass():
    mu = nu_alpha_measure(0.5, 500)
    assert total_variation(mu) == pytest.approx(1.0 - mu.tail_bound, abs=1e-14)
    assert mu.support == (1, 500)


def test_difference_measure_integer_cases():
    mu = lazy_walk()
    d1 = difference_measure(mu, 1)
    assert d1.as_dict() == {-1: -0.25, 0: 0.5, 1: -0.25}
    d2 = difference_measure(dirac(1), 2)
    assert d2.as_dict() == {0: 1.0, 1: -2.0, 2: 1.0}
    assert difference_measure(mu, 0).as_dict() == {0: 1.0}


def test_difference_measure_half_power_of_shift():
    K = 4000
    d = difference_measure(dirac(1), 0.5, K=K)
    g = frac_coeff(0.5, K)
    assert d.weight(0) == 1.0
    np.testing.assert_allclose(d.weights[1:], -g.values, rtol=1e-13)
    t = half_step_grid(512)
    closed = (1 - np.exp(-2j * np.pi * t)) ** 0.5
    assert np.max(np.abs(symbol_from_measure(d).value(t) - closed)) <= g.tail + 1e-12


def test_difference_measure_fractional_composes():
    # (I - T)^{1/2} applied twice is I - T, up to the two series tails
    mu = lazy_walk()
    h = difference_measure(mu, 0.5, K=400)
    from rittl1.measure import convolve
    sq = convolve(h, h)
    ref = difference_measure(mu, 1)
    t = half_step_grid(256)
    gap = np.abs(symbol_from_measure(sq).value(t) - symbol_from_measure(ref).value(t))
    assert gap.max() <= sq.tail_bound + 2 * h.tail_bound + 1e-12


def test_trajectory_trivial_cases():
    f = SpatialSequence(-2, np.array([1.0, 3.0, -1.0]))
    tr = trajectory(dirac(0), 1, f, 5)
    assert np.all(tr.values == 0)
    sh = trajectory(dirac(1), 0, indicator(0), 6)
    for n in range(7):
        assert sh.term(n).as_dict() == {-n: 1.0}


def test_lazy_walk_norms_decrease():
    tr = trajectory(lazy_walk(), 1, indicator(0), 200)
    norms = tr.norms()
    assert np.all(np.diff(norms[2:]) < 0)


def test_trajectory_matches_convolution_powers():
    mu = nu_alpha_measure(0.5, 64)
    f = SpatialSequence(-1, np.array([0.5, -1.0, 2.0]))
    tr = trajectory(mu, 1, f, 32)
    start = apply_to_sequence(difference_measure(mu, 1), f)
    for n in (1, 2, 7, 32):
        ref = apply_to_sequence(convolution_power(mu, n), start)
        got = tr.term(n)
        for x, v in ref.as_dict().items():
            assert got.at(x) == pytest.approx(v, abs=1e-12)


def test_trajectory_csv(tmp_path):
    tr = trajectory(dirac(1), 0, indicator(0), 3)
    path = tmp_path / "t.csv"
    tr.to_csv(path)
    rows = path.read_text().splitlines()
    assert rows[0] == "n,site,value" and rows[1:] == ["0,0,1.0", "1,-1,1.0", "2,-2,1.0",
                                                      "3,-3,1.0"]


@pytest.mark.parametrize("key_m", [0.5, 1.0, 1.5, 2.0])
def test_trajectory_norm_bound(key_m):
    mu = nu_alpha_measure(0.3, 512)
    f = SpatialSequence(-2, np.array([0.4, -0.1, 0.3, -0.2]))
    tr = trajectory(mu, key_m, f, 40, w_max=256, K=512)
    start = tr.norms()[0]
    assert np.all(tr.norms()[1:] <= start + tr.error_budget[1:] + 1e-12)
