import numpy as np
import pytest

from rittl1.quadrature import adaptive_gk, gk15, integrate_log, log_panels


@pytest.mark.parametrize("deg", range(0, 22))
def test_gk15_exact_for_polynomials(deg):
    k, _ = gk15(lambda x: x ** deg, np.array([-1.0, 0.0]), np.array([2.0, 1.0]))
    exact = np.array([(2.0 ** (deg + 1) - (-1.0) ** (deg + 1)) / (deg + 1), 1.0 / (deg + 1)])
    np.testing.assert_allclose(k, exact, rtol=1e-13)


def test_adaptive_handles_endpoint_singularity():
    res = adaptive_gk(lambda x: 1 / np.sqrt(x), log_panels(1e-12, 1.0), rtol=1e-10)
    assert res.converged
    assert res.value == pytest.approx(2.0 - 2e-6, rel=1e-9)


def test_integrate_log_and_partial():
    res = integrate_log(lambda t: t ** -0.5, 1e-8, 0.5, rtol=1e-11)
    exact = 2 * (np.sqrt(0.5) - np.sqrt(1e-8))
    assert res.value == pytest.approx(exact, rel=1e-10)
    assert res.partial(1e-8, 0.5) == pytest.approx(res.value)


def test_log_panels_cover_range():
    p = log_panels(1e-3, 0.5)
    assert p[0] == 1e-3 and p[-1] == 0.5 and np.all(np.diff(p) > 0)
