import mpmath as mp
import numpy as np
import pytest
from scipy.stats import binom

from rittl1.fractional import nu_alpha_measure, trajectory
from rittl1.kernels import (
    LazyWalkKernel,
    NuHalfKernel,
    kernel_for,
    kernel_trajectory,
    log_dbinom_half,
    multiscale_grid,
)
from rittl1.measure import convolution_power, indicator, lazy_walk


def test_log_dbinom_half_matches_mpmath():
    mp.mp.dps = 40
    for n in (1, 2, 10, 101, 5000, 10 ** 7):
        k = np.unique(np.linspace(0, n, 41).round())
        ref = [float(mp.log(mp.binomial(n, int(j))) - n * mp.log(2)) for j in k]
        np.testing.assert_allclose(log_dbinom_half(k, float(n)), ref, rtol=1e-14, atol=1e-12)


def test_log_dbinom_half_moderate_sizes_match_scipy():
    k = np.arange(0, 301, dtype=float)
    np.testing.assert_allclose(np.exp(log_dbinom_half(k, 300.0)), binom.pmf(k, 300, 0.5),
                               rtol=1e-12, atol=1e-300)
    assert log_dbinom_half(-1, 4) == -np.inf and log_dbinom_half(5, 4) == -np.inf


@pytest.mark.parametrize("n", [1, 2, 5, 17, 64])
def test_nu_half_power_matches_convolution(n):
    K = 400
    ref = convolution_power(nu_alpha_measure(0.5, K), n)
    k = np.arange(1, K + 1)
    got = NuHalfKernel().power(n, k)
    exact = np.array([ref.weight(int(x)) for x in k])
    # the FFT oracle carries absolute roundoff near 1e-16 of the total mass
    np.testing.assert_allclose(got, exact, rtol=1e-11, atol=1e-15)


@pytest.mark.parametrize("n", [1, 3, 40])
def test_lazy_power_matches_convolution(n):
    ref = convolution_power(lazy_walk(), n)
    x = np.arange(-n - 2, n + 3)
    np.testing.assert_allclose(LazyWalkKernel().power(n, x), [ref.weight(int(v)) for v in x],
                               rtol=1e-12, atol=1e-300)


@pytest.mark.parametrize("kernel", [NuHalfKernel(), LazyWalkKernel()])
def test_diff_equals_difference_of_powers(kernel):
    k = np.arange(-30, 60, dtype=float)
    for n in (1, 4, 25):
        direct = kernel.power(n, k) - 2 * kernel.power(n + 1, k) + kernel.power(n + 2, k)
        np.testing.assert_allclose(kernel.diff(n, k, 2), direct, atol=1e-14)
        block = kernel.diff_block(n, n + 3, k, 1)
        np.testing.assert_allclose(block[0], kernel.power(n, k) - kernel.power(n + 1, k),
                                   atol=1e-15)


def test_kernel_for_registry():
    assert isinstance(kernel_for("nu_alpha:0.5"), NuHalfKernel)
    assert kernel_for("nu_alpha:0.3") is None


def test_multiscale_grid_sums_power_law():
    for X0 in (256, 2048):
        g = multiscale_grid(X0=X0, jmax=30, P=64)
        assert np.all(g.d == np.round(g.d))
        # sum_{d <= 2^30} d^{-3/2} = zeta(3/2) - sum_{d > 2^30} d^{-3/2}
        exact = float(mp.zeta(1.5) - mp.zeta(1.5, 2 ** 30 + 1))
        # leading error of the join at X0 is the Euler-Maclaurin term |f'(X0)| / 12
        bound = 1.5 * X0 ** -2.5 / 12
        assert abs(float(g.w @ g.d ** -1.5) - exact) <= 1.1 * bound


def test_kernel_trajectory_lazy_matches_iteration():
    N = 60
    tk = kernel_trajectory(LazyWalkKernel(), 1, indicator(0), N)
    ti = trajectory(lazy_walk(), 1, indicator(0), N)
    for n in (0, 1, 10, 60):
        a, b = tk.term(n), ti.term(n)
        for x in range(-n - 2, n + 3):
            assert a.at(x) == pytest.approx(b.at(x), abs=1e-13)


def test_kernel_trajectory_nu_half_matches_iteration():
    N = 40
    tk = kernel_trajectory(NuHalfKernel(), 1, indicator(0), N)
    ti = trajectory(nu_alpha_measure(0.5, 4096), 1, indicator(0, 8192), N, w_max=8192)
    # multiscale grid is exact for distances up to X0
    near = (tk.sites >= -2048) & (tk.sites <= 0)
    for n in (1, 5, 40):
        ref = np.array([ti.values[n][ti.sites == x][0] if np.any(ti.sites == x) else 0.0
                        for x in tk.sites[near][-1000:]])
        np.testing.assert_allclose(tk.values[n][near][-1000:], ref, atol=1e-12)
