import numpy as np
import pytest
from sklearn.base import clone

from rittl1.estimators import MaximalFunction, SquareFunction, VariationNorm
from rittl1.fractional import trajectory
from rittl1.functionals import square_function
from rittl1.measure import SpatialSequence, lazy_walk


def test_square_function_matches_functional():
    X = np.array([[1.0, 0.0, 0.0], [0.5, -1.0, 2.0]])
    est = SquareFunction(measure="lazy_walk", N_levels=(8, 16), method="iterate", w_max=None)
    R = est.fit_transform(X)
    assert R.shape == (2, 2)
    f = SpatialSequence(0, X[1])
    ref = square_function(trajectory(lazy_walk(), 1, f, 16), 1.0, 3.0, N=16).l1_norm / f.l1()
    assert R[1, 1] == pytest.approx(ref, rel=1e-13)
    assert list(est.get_feature_names_out()) == ["R_8", "R_16"]


def test_kernel_and_iterate_agree():
    X = np.array([[1.0]])
    a = SquareFunction(N_levels=(32,), method="kernel").fit_transform(X)
    b = SquareFunction(N_levels=(32,), method="iterate", w_max=None).fit_transform(X)
    assert a[0, 0] == pytest.approx(b[0, 0], rel=1e-12)


def test_maximal_and_clone():
    est = MaximalFunction(N_levels=(4, 8), method="iterate", w_max=None)
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    out = twin.fit(np.ones((1, 2))).transform(np.ones((1, 2)))
    assert out.shape == (1, 2) and np.all(out > 0)


def test_parameter_validation():
    with pytest.raises(ValueError):
        SquareFunction(s=0.5).fit()
    with pytest.raises(ValueError):
        SquareFunction(N_levels=(8, 4)).fit()
    with pytest.raises(ValueError):
        SquareFunction(measure="nu_alpha:0.3", method="kernel").fit()


def test_variation_norm_estimator():
    X = np.array([[0.0, 1.0, 0.0, 2.0], [1.0, 1.0, 1.0, 1.0]])
    out = VariationNorm(s=2.0, blocks=[1, 3]).fit_transform(X)
    np.testing.assert_allclose(out, [[np.sqrt(6.0), np.sqrt(5.0)], [0.0, 0.0]])
    with pytest.raises(ValueError):
        VariationNorm().fit(X).transform(np.ones((1, 3)))
