"""scikit-learn style wrappers.

Rows of ``X`` are test functions ``f`` sampled on the window ``lo, lo+1, ...``.
The trajectory transformers return, for each row, the ratio
``||functional(f)||_1 / ||f||_1`` at every level in ``N_levels`` (one column per
level).  :class:`VariationNorm` treats each row as a sequence indexed by ``n``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .fractional import trajectory
from .functionals import (
    dyadic_blocks,
    maximal_function,
    oscillation_norm,
    square_function,
    variation_norm,
)
from .kernels import kernel_for, kernel_trajectory
from .measure import SpatialSequence
from .registry import canonical, resolve_measure


class _TrajectoryTransformer(TransformerMixin, BaseEstimator):

    def _common_fit(self):
        levels = [int(n) for n in np.atleast_1d(self.N_levels)]
        if not levels or levels != sorted(set(levels)) or levels[0] < 1:
            raise ValueError("N_levels must be strictly increasing positive integers")
        if self.m < 0:
            raise ValueError("m must be >= 0")
        key = canonical(self.measure)
        kernel = kernel_for(key)
        integer_m = float(self.m) == int(self.m)
        if self.method == "kernel" and (kernel is None or not integer_m):
            raise ValueError("kernel method needs a closed-form kernel and integer m")
        if self.method not in ("auto", "kernel", "iterate"):
            raise ValueError("method must be one of ('auto', 'kernel', 'iterate')")
        use_kernel = self.method == "kernel" or (self.method == "auto" and kernel is not None
                                                 and integer_m)
        self.levels_ = levels
        self.kernel_ = kernel if use_kernel else None
        self.measure_ = None if use_kernel else resolve_measure(self.measure, self.K)
        return self

    def fit(self, X=None, y=None):
        if X is not None:
            check_array(X)
        return self._common_fit()

    def _trajectories(self, X):
        check_is_fitted(self, "levels_")
        X = check_array(X)
        N = self.levels_[-1]
        for row in X:
            f = SpatialSequence(self.lo, row, 0.0, None if self.kernel_ else self.w_max)
            if self.kernel_ is not None:
                traj = kernel_trajectory(self.kernel_, int(self.m), f, N)
            else:
                traj = trajectory(self.measure_, self.m, f, N, w_max=self.w_max, K=self.K)
            yield f, traj

    def transform(self, X):
        out = []
        for f, traj in self._trajectories(X):
            norm = f.l1()
            res = self._functional(traj)
            out.append([r.l1_norm / norm if norm > 0 else 0.0 for r in res])
        return np.asarray(out)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "levels_")
        return np.array([f"R_{n}" for n in self.levels_], dtype=object)


class SquareFunction(_TrajectoryTransformer):
    """Ratio ``||Q_{alpha,s,m} f||_1 / ||f||_1`` per row of ``X``."""

    def __init__(self, measure: str = "lazy_walk", m: float = 1.0, alpha: float = 1.0,
                 s: float = 3.0, N_levels: Sequence[int] = (256,), method: str = "auto",
                 lo: int = 0, w_max: int | None = 8192, K: int = 1 << 14):
        self.measure = measure
        self.m = m
        self.alpha = alpha
        self.s = s
        self.N_levels = N_levels
        self.method = method
        self.lo = lo
        self.w_max = w_max
        self.K = K

    def fit(self, X=None, y=None):
        if self.s < 1:
            raise ValueError("s must be >= 1")
        return super().fit(X, y)

    def _functional(self, traj):
        return square_function(traj, self.alpha, self.s, N=self.levels_)


class MaximalFunction(_TrajectoryTransformer):
    """Ratio ``||sup_n n^alpha |T^n (I-T)^m f| ||_1 / ||f||_1`` per row of ``X``."""

    def __init__(self, measure: str = "lazy_walk", m: float = 1.0, alpha: float = 0.5,
                 N_levels: Sequence[int] = (256,), method: str = "auto", lo: int = 0,
                 w_max: int | None = 8192, K: int = 1 << 14):
        self.measure = measure
        self.m = m
        self.alpha = alpha
        self.N_levels = N_levels
        self.method = method
        self.lo = lo
        self.w_max = w_max
        self.K = K

    def _functional(self, traj):
        return maximal_function(traj, self.alpha, N=self.levels_)


class VariationNorm(TransformerMixin, BaseEstimator):
    """Columns ``[v(s), o(s)]`` for each row of ``X`` read as a sequence in ``n``.

    ``blocks=None`` uses dyadic blocks ``1, 2, 4, ...`` (1-based).
    """

    def __init__(self, s: float = 2.0, blocks: Sequence[int] | None = None):
        self.s = s
        self.blocks = blocks

    def fit(self, X, y=None):
        X = check_array(X)
        if self.s < 1:
            raise ValueError("s must be >= 1")
        self.n_features_in_ = X.shape[1]
        self.blocks_ = list(self.blocks) if self.blocks is not None else dyadic_blocks(X.shape[1])
        return self

    def transform(self, X):
        check_is_fitted(self, "blocks_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError("X has a different number of columns than during fit")
        return np.array([[variation_norm(r, self.s), oscillation_norm(r, self.blocks_, self.s)]
                         for r in X])

    def get_feature_names_out(self, input_features=None):
        return np.array(["variation", "oscillation"], dtype=object)
