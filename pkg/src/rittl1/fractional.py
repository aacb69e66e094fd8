"""Binomial-series coefficients, the measures nu_alpha, fractional differences and
trajectories ``n -> T_mu^n (I - T_mu)^m f``.

The coefficients come from ``(1 - x)^alpha = 1 - sum_{k>=1} g(alpha, k) x^k`` and
are generated by the recursion ``g(alpha, k+1) = g(alpha, k) (k - alpha)/(k + 1)``.
The series tail has the exact product form

    1 - sum_{k<=K} g(alpha, k) = prod_{j=1}^{K} (1 - alpha/j) = g(alpha, K+1) (K+1)/alpha,

which is evaluated without cancellation.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .measure import (
    SignedMeasure,
    SpatialSequence,
    apply_to_sequence,
    convolution_power,
    convolve,
    dirac,
    total_variation,
    truncate,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FracCoefficients:
    alpha: float
    values: np.ndarray  # values[k-1] = g(alpha, k)
    K: int
    tail: float

    def __getitem__(self, k: int) -> float:
        if not 1 <= k <= self.K:
            raise IndexError(k)
        return float(self.values[k - 1])


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def _recursion(alpha: float, K: int) -> np.ndarray:
    k = np.arange(1, K, dtype=float)
    ratios = (k - alpha) / (k + 1.0)
    out = np.empty(K)
    out[0] = alpha
    # cumulative product of ratios is the recursion unrolled
    out[1:] = alpha * np.cumprod(ratios)
    return out


def series_tail(alpha: float, K: int) -> float:
    """``1 - sum_{k<=K} g(alpha, k)`` in product form (nonnegative by construction)."""
    _check_alpha(alpha)
    j = np.arange(1, K + 1, dtype=float)
    return float(np.exp(np.sum(np.log1p(-alpha / j))))


def frac_coeff(alpha: float, K: int) -> FracCoefficients:
    _check_alpha(alpha)
    if K < 1:
        raise ValueError("K must be >= 1")
    vals = _recursion(alpha, K)
    vals.setflags(write=False)
    return FracCoefficients(float(alpha), vals, int(K), series_tail(alpha, K))


def cutoff_for_tail(beta: float, budget: float, k_max: int = 1 << 24) -> int:
    """Smallest ``K`` whose series tail is at most ``budget`` (capped at ``k_max``)."""
    _check_alpha(beta)
    if budget <= 0:
        return k_max
    # tail(K) is decreasing; bisect on the product form
    lo, hi = 1, 1
    while series_tail(beta, hi) > budget:
        if hi >= k_max:
            return k_max
        lo, hi = hi, min(2 * hi, k_max)
    while lo < hi:
        mid = (lo + hi) // 2
        if series_tail(beta, mid) <= budget:
            hi = mid
        else:
            lo = mid + 1
    return lo


def nu_alpha_measure(alpha: float, K: int) -> SignedMeasure:
    """Probability measure ``nu_alpha`` truncated to ``{1..K}``; the lost mass is the tail."""
    c = frac_coeff(alpha, K)
    return SignedMeasure(np.arange(1, K + 1, dtype=np.int64), c.values, c.tail,
                         f"nu_alpha:{alpha:g}")


def difference_measure(mu: SignedMeasure, m: float, K: int | None = None,
                       eps: float = 0.0) -> SignedMeasure:
    """Measure of ``(I - T_mu)^m``.

    With ``p = floor(m)`` and ``beta = m - p`` this is
    ``(delta_0 - mu)^{*p} * (delta_0 - sum_{k<=K} g(beta, k) mu^{*k})``.
    The fractional series is summed by Horner's scheme, one convolution by ``mu``
    per coefficient.  If ``K`` is None it is chosen so that the series tail is at
    most ``eps/2``.  The remaining ``eps/2`` is a truncation budget for dropping
    tiny atoms.  The omitted series tail is charged to ``tail_bound``, weighted by
    ``||mu||^{K+1}`` when ``||mu|| <= 1``.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    p = int(math.floor(m))
    beta = m - p
    one = dirac(0)
    result = one
    if p > 0:
        result = convolution_power(one - mu, p, eps / 4.0 if beta else eps / 2.0)
    if beta > 1e-15:
        if K is None:
            K = cutoff_for_tail(beta, eps / 2.0 if eps > 0 else 1e-12)
        coeffs = frac_coeff(beta, K)
        step_budget = (eps / 4.0) / K if eps > 0 else 0.0
        acc = SignedMeasure(np.zeros(1, np.int64), np.array([coeffs.values[-1]]))
        acc = convolve(acc, mu)
        for k in range(K - 1, 0, -1):
            acc = truncate(convolve(acc + dirac(0).scaled(coeffs.values[k - 1]), mu), step_budget)
        norm = total_variation(mu) + mu.tail_bound
        series_tail_mass = coeffs.tail * (norm ** (K + 1) if norm <= 1.0 else float("inf"))
        frac = one - acc
        frac = SignedMeasure(frac.offsets, frac.weights, frac.tail_bound + series_tail_mass)
        result = convolve(result, frac)
    return SignedMeasure(result.offsets, result.weights, result.tail_bound,
                         f"(d0-{mu.label or 'mu'})^{m:g}")


# ---------------------------------------------------------------------------
# trajectories


@dataclass
class Trajectory:
    """Values of ``T_mu^n (I - T_mu)^m f`` for ``n = 0..N`` on a set of sites.

    ``values[n, i]`` is the term at ``sites[i]``.  ``weights[i]`` is the summation
    weight of that site when forming l1-type norms.  For dense windows all weights
    are 1.  For multiscale kernel grids they are quadrature weights.
    ``error_budget[n]`` bounds the l1 distance between the stored term and the exact one.
    """

    mu: SignedMeasure | None
    m: float
    f0: SpatialSequence
    sites: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    error_budget: np.ndarray
    method: str = "iterate"
    meta: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.values.shape[0] - 1

    @property
    def dense(self) -> bool:
        return bool(self.sites.size <= 1 or (np.all(np.diff(self.sites) == 1)
                                             and np.all(self.weights == 1.0)))

    def term(self, n: int) -> SpatialSequence:
        if not self.dense:
            raise ValueError("term() needs a contiguous unit-weight site set")
        return SpatialSequence(int(self.sites[0]), self.values[n], float(self.error_budget[n]))

    @property
    def terms(self) -> list[SpatialSequence]:
        """``terms[n-1]`` is the n-th term, ``n = 1..N``."""
        return [self.term(n) for n in range(1, self.N + 1)]

    @property
    def start(self) -> SpatialSequence:
        return self.term(0)

    def norms(self) -> np.ndarray:
        return np.abs(self.values) @ self.weights

    def truncated(self, N: int) -> "Trajectory":
        return Trajectory(self.mu, self.m, self.f0, self.sites, self.weights,
                          self.values[:N + 1], self.error_budget[:N + 1], self.method, self.meta)

    def to_csv(self, path, n_values: Sequence[int] | None = None) -> None:
        """Write rows ``n, site, value`` (zero entries skipped)."""
        ns = range(self.N + 1) if n_values is None else n_values
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "site", "value"])
            for n in ns:
                row = self.values[n]
                for x, v in zip(self.sites[row != 0], row[row != 0]):
                    w.writerow([n, int(x), repr(float(v))])


def _stack(seqs: list[SpatialSequence]) -> tuple[np.ndarray, np.ndarray]:
    lo = min(s.lo for s in seqs)
    hi = max(s.hi for s in seqs)
    mat = np.zeros((len(seqs), hi - lo + 1))
    for i, s in enumerate(seqs):
        mat[i, s.lo - lo: s.hi - lo + 1] = s.values
    return np.arange(lo, hi + 1, dtype=np.int64), mat


def iterate_terms(mu: SignedMeasure, start: SpatialSequence, N: int,
                  w_max: int | None = None) -> Iterator[SpatialSequence]:
    """Yield ``start, T_mu start, T_mu^2 start, ...`` (``N + 1`` items)."""
    cur = start
    yield cur
    for _ in range(N):
        cur = apply_to_sequence(mu, cur, w_max)
        yield cur


def trajectory(mu: SignedMeasure, m: float, f: SpatialSequence, N: int, eps: float = 0.0,
               w_max: int | None = None, K: int | None = None) -> Trajectory:
    """Iterated trajectory starting from ``(I - T_mu)^m f``.

    One application of ``T_mu`` per step.  The error budget of term ``n`` is the
    accumulated window/truncation tail of that term, which already includes the
    difference measure's own tail bound times ``||f||_1``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    w_max = f.w_max if w_max is None else w_max
    if m > 0:
        d = difference_measure(mu, m, K=K, eps=eps)
        start = apply_to_sequence(d, f, w_max)
    else:
        start = SpatialSequence(f.lo, f.values, f.window_tail, w_max)
    seqs = list(iterate_terms(mu, start, N, w_max))
    sites, mat = _stack(seqs)
    budget = np.array([s.window_tail for s in seqs])
    if w_max is not None and budget[-1] > 0:
        logger.info("trajectory window overflow: final window_tail=%.3g", budget[-1])
    return Trajectory(mu, float(m), f, sites, np.ones(sites.size), mat, budget, "iterate",
                      {"w_max": w_max, "eps": eps})
