"""Closed-form convolution powers and kernel-based trajectories.

Two measures have convolution powers in closed form:

* ``nu_{1/2}``: with ``j = k - n >= 0``,
  ``nu^{*n}(k) = n/(2j+n) * binom(2j+n, j) 2^{-(2j+n)}`` (a Catalan-type law).
* the lazy walk: ``lazy^{*n}(x) = binom(2n, n+x) 4^{-n}``.

Binomial probabilities are evaluated in log space with Loader's saddle-point
algorithm (``stirlerr`` + ``bd0``), which stays accurate to about 1e-14 relative
even at ``j ~ 1e17``, where generic binomial pmf routines lose digits.

For the heavy-tailed ``nu_{1/2}`` the bulk of ``nu^{*n}`` sits at distance
``~ n^2``, so dense windows are useless at large ``n``.  Kernel trajectories
sample sites on a multiscale grid instead: all integers up to ``X0``, then
octaves ``[2^j, 2^{j+1}]`` with composite Simpson weights.  Every l1-type norm
of a site-wise functional becomes a weighted sum over the grid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.special import gammaln

from .fractional import Trajectory
from .measure import SpatialSequence

logger = logging.getLogger(__name__)

_LN_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)
_LN2 = np.log(2.0)


def stirlerr(n: np.ndarray) -> np.ndarray:
    """``log(n!) - log(sqrt(2 pi n) (n/e)^n)``."""
    n = np.asarray(n, dtype=float)
    out = np.empty_like(n)
    big = n > 15
    nb = n[big]
    nn = nb * nb
    out[big] = (1 / 12 - (1 / 360 - (1 / 1260 - (1 / 1680 - 1 / 1188 / nn) / nn) / nn) / nn) / nb
    ns = n[~big]
    with np.errstate(divide="ignore", invalid="ignore"):
        out[~big] = gammaln(ns + 1) - (ns + 0.5) * np.log(ns) + ns - _LN_SQRT_2PI
    return out


def bd0(x: np.ndarray, mean: np.ndarray) -> np.ndarray:
    """Deviance term ``x log(x/mean) + mean - x`` with a series near ``x = mean``."""
    x, mean = np.broadcast_arrays(np.asarray(x, float), np.asarray(mean, float))
    out = np.empty(x.shape)
    close = np.abs(x - mean) < 0.1 * (x + mean)
    xc, mc = x[close], mean[close]
    v = (xc - mc) / (xc + mc)
    s = (xc - mc) * v
    ej = 2.0 * xc * v
    v2 = v * v
    for j in range(1, 40):
        ej = ej * v2
        s = s + ej / (2 * j + 1)
    out[close] = s
    xf, mf = x[~close], mean[~close]
    with np.errstate(divide="ignore", invalid="ignore"):
        out[~close] = xf * np.log(xf / mf) + mf - xf
    return out


def log_dbinom_half(k, N) -> np.ndarray:
    """``log( binom(N, k) 2^{-N} )`` for real arrays; ``-inf`` outside ``0..N``."""
    k, N = np.broadcast_arrays(np.asarray(k, float), np.asarray(N, float))
    out = np.full(k.shape, -np.inf)
    edge = ((k == 0) | (k == N)) & (N >= 0)
    out[edge] = -N[edge] * _LN2
    inner = (k > 0) & (k < N)
    kk, NN = k[inner], N[inner]
    half = NN / 2.0
    out[inner] = (stirlerr(NN) - stirlerr(kk) - stirlerr(NN - kk) - bd0(kk, half)
                  - bd0(NN - kk, half) + 0.5 * np.log(NN / (2.0 * np.pi * kk * (NN - kk))))
    return out


class ClosedFormKernel:
    """Interface: ``power(n, k)`` and exact ``one_minus_ratio(n, k)``.

    ``one_minus_ratio`` equals ``1 - power(n+1, k)/power(n, k)`` written as one
    fraction, so ``power(n,k) - power(n+1,k)`` is formed without cancellation.
    """

    one_sided: bool = True
    key: str = ""

    def power(self, n, k) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def one_minus_ratio(self, n, k) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def diff(self, n, k, m: int) -> np.ndarray:
        """``nu_{n,m}(k) = (nu^n * (delta_0 - nu)^{*m})(k)`` for integer ``m >= 0``."""
        n = np.asarray(n, dtype=float)
        k = np.asarray(k, dtype=float)
        if m == 0:
            return self.power(n, k)
        if np.any(n == 0):
            # the n = 0 row: direct alternating sum (powers 0..m are tiny objects)
            return sum((-1) ** i * comb(m, i) * self.power(n + i, k) for i in range(m + 1))
        if m == 1:
            p = self.power(n, k)
            # where nu^n vanishes the ratio form is 0; nu^{n+1} may still have an atom
            edge = np.where(p == 0.0, self.power(n + 1, k), 0.0)
            return p * self.one_minus_ratio(n, k) - edge
        return self.diff(n, k, m - 1) - self.diff(n + 1, k, m - 1)

    def diff_block(self, n0: int, n1: int, k: np.ndarray, m: int) -> np.ndarray:
        """Rows ``n = n0..n1-1`` of ``nu_{n,m}(k)``; default is direct evaluation."""
        ns = np.arange(n0, n1, dtype=float)[:, None]
        return self.diff(ns, np.asarray(k, dtype=float)[None, :], m)


class NuHalfKernel(ClosedFormKernel):
    """Convolution powers of ``nu_{1/2}``, supported on ``k >= n``."""

    one_sided = True
    key = "nu_alpha:0.5"

    def power(self, n, k):
        n = np.asarray(n, dtype=float)
        k = np.asarray(k, dtype=float)
        n, k = np.broadcast_arrays(n, k)
        out = np.zeros(n.shape)
        zero = n == 0
        out[zero & (k == 0)] = 1.0
        j = k - n
        ok = (~zero) & (j >= 0)
        nn, jj = n[ok], j[ok]
        M = 2.0 * jj + nn
        out[ok] = np.exp(log_dbinom_half(jj, M)) * nn / M
        return out

    def one_minus_ratio(self, n, k):
        n = np.asarray(n, dtype=float)
        k = np.asarray(k, dtype=float)
        j = k - n
        with np.errstate(divide="ignore", invalid="ignore"):
            fac = (n * n - n - 2.0 * j) / (n * (2.0 * j + n - 1.0))
        fac = np.where((j == 0) & (n == 1), 1.0, fac)
        return np.where(j >= 0, fac, 0.0)

    def ratio(self, n, k):
        """``nu^{n+1}(k) / nu^n(k) = 2j(n+1) / (n(2j+n-1))`` with ``j = k - n``; 0 when j <= 0."""
        j = k - n
        with np.errstate(divide="ignore", invalid="ignore"):
            r = 2.0 * j * (n + 1.0) / (n * (2.0 * j + n - 1.0))
        return np.where(j > 0, r, 0.0)

    def diff_block(self, n0, n1, k, m):
        """Loader evaluation at ``n0`` then exact ratios along ``n``.

        For fixed ``k`` the support condition ``k >= n`` only fails as ``n`` grows,
        so a zero never needs to turn nonzero and the running product is exact up
        to rounding (about one ulp per step).
        """
        if n0 == 0:
            return super().diff_block(n0, n1, k, m)
        k = np.asarray(k, dtype=float)[None, :]
        ns = np.arange(n0, n1 + m, dtype=float)[:, None]
        P = np.empty((ns.shape[0], k.shape[1]))
        P[0] = self.power(ns[0], k)[0]
        if ns.shape[0] > 1:
            P[1:] = P[0] * np.cumprod(self.ratio(ns[:-1], k), axis=0)
        if m == 0:
            return P[: n1 - n0]
        D = P * self.one_minus_ratio(ns, k)
        for _ in range(m - 1):
            D = D[:-1] - D[1:]
        return D[: n1 - n0]


class LazyWalkKernel(ClosedFormKernel):
    """Convolution powers of the lazy walk, supported on ``|x| <= n``."""

    one_sided = False
    key = "lazy_walk"

    def power(self, n, x):
        n = np.asarray(n, dtype=float)
        x = np.asarray(x, dtype=float)
        n, x = np.broadcast_arrays(n, x)
        return np.exp(log_dbinom_half(n + x, 2.0 * n))

    def one_minus_ratio(self, n, x):
        n = np.asarray(n, dtype=float)
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            fac = (2.0 * n + 2.0 - 4.0 * x * x) / (4.0 * (n + 1.0 + x) * (n + 1.0 - x))
        return np.where(np.abs(x) <= n, fac, 0.0)


KERNELS: dict[str, type[ClosedFormKernel]] = {
    "nu_alpha:0.5": NuHalfKernel,
    "lazy_walk": LazyWalkKernel,
}


def kernel_for(key: str) -> ClosedFormKernel | None:
    cls = KERNELS.get(key)
    return cls() if cls else None


@dataclass(frozen=True)
class MultiscaleGrid:
    """Distances ``d`` with summation weights approximating ``sum_{d >= d_lo} F(d)``."""

    d: np.ndarray
    w: np.ndarray
    X0: int
    jmax: int
    P: int


def multiscale_grid(X0: int = 2048, jmax: int = 52, P: int = 64, d_lo: int = 1) -> MultiscaleGrid:
    """Exact integers ``d_lo..X0``, then Simpson on each octave ``[2^j, 2^{j+1}]``.

    ``X0`` must be a power of two and ``P`` even with ``2^j / P`` integral for every
    octave, so that all nodes are integer sites.  The Euler-Maclaurin join at ``X0``
    counts that site with weight 1/2 from the exact part.
    """
    if X0 & (X0 - 1) or X0 < P:
        raise ValueError("X0 must be a power of two, at least P")
    if P % 2:
        raise ValueError("P must be even")
    j0 = int(np.log2(X0))
    xs = [np.arange(d_lo, X0 + 1, dtype=float)]
    w0 = np.ones(xs[0].size)
    w0[-1] -= 0.5
    ws = [w0]
    for j in range(j0, jmax):
        a = 2.0 ** j
        h = a / P
        x = a + h * np.arange(P + 1)
        w = np.full(P + 1, 2.0 * h / 3.0)
        w[1::2] = 4.0 * h / 3.0
        w[0] = w[-1] = h / 3.0
        xs.append(x)
        ws.append(w)
    x = np.concatenate(xs)
    w = np.concatenate(ws)
    u, inv = np.unique(x, return_inverse=True)
    wu = np.zeros_like(u)
    np.add.at(wu, inv, w)
    return MultiscaleGrid(u, wu, X0, jmax, P)


def kernel_trajectory(kernel: ClosedFormKernel, m: int, f: SpatialSequence, N: int,
                      X0: int = 2048, jmax: int = 52, P: int = 64,
                      chunk: int = 256) -> Trajectory:
    """Trajectory ``T^n (I-T)^m f`` from closed-form kernels, ``n = 0..N``.

    ``terms[n](x) = sum_y f(y) nu_{n,m}(y - x)``.  For one-sided kernels the sites
    are ``x = -d`` on a multiscale grid (plus the few sites to the right of the origin
    reached by the support of ``f``).  Two-sided kernels use a dense window
    ``|x| <= N + m + r``.
    """
    if float(m) != int(m) or m < 0:
        raise ValueError("kernel trajectories need an integer m >= 0")
    m = int(m)
    ys = f.sites[f.values != 0]
    fy = f.values[f.values != 0]
    r_lo, r_hi = (int(ys.min()), int(ys.max())) if ys.size else (0, 0)
    if kernel.one_sided:
        grid = multiscale_grid(X0, jmax, P, d_lo=-r_hi)
        sites = (-grid.d).astype(np.int64)
        weights = grid.w.copy()
        # sites x > -d_lo are never reached; grid already starts at d = -r_hi
    else:
        R = N + m + max(abs(r_lo), abs(r_hi)) + 1
        sites = np.arange(-R, R + 1, dtype=np.int64)
        weights = np.ones(sites.size)
        grid = None
    order = np.argsort(sites)
    sites, weights = sites[order], weights[order]
    vals = np.zeros((N + 1, sites.size))
    xs = sites.astype(float)
    for n0 in range(0, N + 1, chunk):
        n1 = min(n0 + chunk, N + 1)
        block = np.zeros((n1 - n0, sites.size))
        for y, c in zip(ys, fy):
            block += c * kernel.diff_block(n0, n1, float(y) - xs, m)
        vals[n0:n1] = block
    budget = np.full(N + 1, 1e-13) * max(1.0, f.l1())
    meta = {"kernel": kernel.key, "X0": X0, "jmax": jmax, "P": P,
            "grid": "multiscale" if grid is not None else "dense"}
    return Trajectory(None, float(m), f, sites, weights, vals, budget, "kernel", meta)
