"""Square, maximal, variation, oscillation and block functionals of trajectories.

All functionals act site by site on a :class:`~rittl1.fractional.Trajectory`.  The
l1 norm of the pointwise result is the weighted sum over the trajectory's sites
(unit weights for dense windows, quadrature weights for multiscale grids).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fractional import Trajectory
from .measure import SpatialSequence


@dataclass
class FunctionalResult:
    sites: np.ndarray
    values: np.ndarray          # pointwise functional, >= 0
    weights: np.ndarray
    l1_norm: float
    truncation_N: int
    tail_estimate: float | None = None   # contribution of n > N; None when unavailable
    params: dict = field(default_factory=dict)

    @property
    def pointwise(self) -> SpatialSequence:
        if self.sites.size > 1 and np.any(np.diff(self.sites) != 1):
            raise ValueError("pointwise SpatialSequence needs contiguous sites")
        return SpatialSequence(int(self.sites[0]), self.values)

    def summary(self) -> dict:
        return {"l1_norm": self.l1_norm, "N": self.truncation_N,
                "tail_estimate": self.tail_estimate, "parameters": self.params}

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["site", "value"])
            for x, v in zip(self.sites, self.values):
                w.writerow([int(x), repr(float(v))])

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)


def _check_s(s: float) -> None:
    if not s >= 1.0:
        raise ValueError(f"s must be >= 1, got {s}")


def _levels(traj: Trajectory, N) -> list[int]:
    if N is None:
        return [traj.N]
    levels = [int(N)] if np.isscalar(N) else [int(x) for x in N]
    if min(levels) < 1 or max(levels) > traj.N:
        raise ValueError("requested N outside trajectory range")
    return levels


def _result(traj, vals, N, params) -> FunctionalResult:
    return FunctionalResult(traj.sites, vals, traj.weights, float(vals @ traj.weights), N,
                            None, params)


def _accumulate(traj: Trajectory, levels: list[int], per_row, reduce: str, chunk: int = 256):
    """Run ``per_row(n, block)`` over ``n = 1..max(levels)`` in chunks, reducing by sum or max.

    Returns the running reduction snapshot at each requested level.
    """
    acc = np.zeros(traj.sites.size)
    snaps = {}
    top = max(levels)
    for n0 in range(1, top + 1, chunk):
        n1 = min(n0 + chunk, top + 1)
        ns = np.arange(n0, n1, dtype=float)
        contrib = per_row(ns, traj.values[n0:n1])
        if reduce == "sum":
            run = np.cumsum(contrib, axis=0) + acc
        else:
            run = np.maximum.accumulate(contrib, axis=0)
            run = np.maximum(run, acc)
        for L in levels:
            if n0 <= L < n1:
                snaps[L] = run[L - n0].copy()
        acc = run[-1]
    return [snaps[L] for L in levels]


def square_function(traj: Trajectory, alpha: float, s: float, N=None):
    """``Q(x) = (sum_{n<=N} n^alpha |terms[n](x)|^s)^{1/s}``.

    ``N`` may be an int (returns one result) or a sequence of levels (returns a list).
    """
    _check_s(s)
    levels = _levels(traj, N)
    snaps = _accumulate(traj, levels, lambda ns, b: ns[:, None] ** alpha * np.abs(b) ** s, "sum")
    out = [_result(traj, sn ** (1.0 / s), L, {"functional": "square", "alpha": alpha, "s": s})
           for sn, L in zip(snaps, levels)]
    return out if (N is not None and not np.isscalar(N)) else out[0]


def lp_square_function(traj: Trajectory, p: float = 2.0, N=None):
    """``(sum_n (n+1)^{2m-1} |terms[n]|^2)^{1/2}`` measured in l^p over sites.

    ``m = traj.m >= 1`` is the difference order of the trajectory, so ``m = 1``
    gives the classical ``sum_n (n+1) |T^n f - T^{n+1} f|^2``.
    """
    if traj.m < 1:
        raise ValueError("lp_square_function needs a trajectory with m >= 1")
    levels = _levels(traj, N)
    w = 2.0 * traj.m - 1.0
    snaps = _accumulate(traj, levels, lambda ns, b: (ns[:, None] + 1.0) ** w * b * b, "sum")
    out = []
    for sn, L in zip(snaps, levels):
        q = np.sqrt(sn)
        norm = float((q ** p) @ traj.weights) ** (1.0 / p)
        out.append(FunctionalResult(traj.sites, q, traj.weights, norm, L, None,
                                    {"functional": "lp_square", "p": p}))
    return out if (N is not None and not np.isscalar(N)) else out[0]


def maximal_function(traj: Trajectory, alpha: float, N=None):
    """``M(x) = max_{1<=n<=N} n^alpha |terms[n](x)|``."""
    levels = _levels(traj, N)
    snaps = _accumulate(traj, levels, lambda ns, b: ns[:, None] ** alpha * np.abs(b), "max")
    out = [_result(traj, sn, L, {"functional": "maximal", "alpha": alpha})
           for sn, L in zip(snaps, levels)]
    return out if (N is not None and not np.isscalar(N)) else out[0]


# ---------------------------------------------------------------------------
# variation and oscillation


def local_extrema(x: np.ndarray) -> np.ndarray:
    """Endpoints and turning points after collapsing runs of equal values."""
    x = np.asarray(x, dtype=float)
    if x.size <= 2:
        return x
    keep = np.concatenate([[True], np.diff(x) != 0])
    y = x[keep]
    if y.size <= 2:
        return y
    d = np.sign(np.diff(y))
    turn = d[1:] != d[:-1]
    mask = np.concatenate([[True], turn, [True]])
    return y[mask]


def _dp_best(y: np.ndarray, s: float) -> float:
    best = np.zeros(y.size)
    for j in range(1, y.size):
        best[j] = np.max(best[:j] + np.abs(y[j] - y[:j]) ** s)
    return float(best.max())


def variation_norm(values: Sequence[float], s: float) -> float:
    """``sup over increasing subsequences of (sum |x_{n_{k+1}} - x_{n_k}|^s)^{1/s}``.

    An optimal subsequence can be taken among local extrema.  Adjacent extrema are
    not always optimal when ``s > 1``: for ``[0, 1, 0.9, 2]`` and ``s = 2`` the best
    choice skips the inner pair.  So a dynamic program over the extrema is used.
    """
    _check_s(s)
    y = local_extrema(np.asarray(values, dtype=float))
    if y.size < 2:
        return 0.0
    if s == 1.0:
        return float(np.abs(np.diff(y)).sum())
    return _dp_best(y, s) ** (1.0 / s)


def variation_columns(mat: np.ndarray, s: float) -> np.ndarray:
    """``variation_norm`` of every column of ``mat``.

    Each column is first reduced to its local extrema.  Columns are grouped by
    extrema count rounded up to a power of two and padded by repeating the last
    extremum (a repeated point cannot change the optimum).  The DP then runs
    vectorized over each group.
    """
    _check_s(s)
    mat = np.asarray(mat, dtype=float)
    L = mat.shape[0]
    if L < 2:
        return np.zeros(mat.shape[1:])
    if s == 1.0:
        return np.abs(np.diff(mat, axis=0)).sum(axis=0)
    cols = [local_extrema(mat[:, j]) for j in range(mat.shape[1])]
    sizes = np.array([c.size for c in cols])
    width = np.maximum(2, 2 ** np.ceil(np.log2(np.maximum(sizes, 1))).astype(int))
    out = np.zeros(mat.shape[1])
    for w in np.unique(width):
        idx = np.flatnonzero((width == w) & (sizes >= 2))
        if idx.size == 0:
            continue
        Y = np.empty((int(w), idx.size))
        for c, j in enumerate(idx):
            y = cols[j]
            Y[:y.size, c] = y
            Y[y.size:, c] = y[-1]
        best = np.zeros_like(Y)
        for k in range(1, Y.shape[0]):
            best[k] = np.max(best[:k] + np.abs(Y[k] - Y[:k]) ** s, axis=0)
        out[idx] = best.max(axis=0) ** (1.0 / s)
    return out


def _segments(blocks: Sequence[int], L: int) -> list[tuple[int, int]]:
    b = [int(x) for x in blocks]
    if any(y <= x for x, y in zip(b, b[1:])):
        raise ValueError("blocks must be strictly increasing")
    if not b or b[0] < 1 or b[-1] > L:
        raise ValueError("blocks must lie in 1..len(values)")
    segs = list(zip(b, b[1:]))
    if b[-1] < L or len(b) == 1:
        segs.append((b[-1], L))
    return segs


def oscillation_norm(values: Sequence[float], blocks: Sequence[int], s: float) -> float:
    """``(sum_k (max - min over [m_k, m_{k+1}])^s)^{1/s}``, 1-based inclusive indices.

    The last block runs from ``m_last`` to the end of the sequence.
    """
    _check_s(s)
    x = np.asarray(values, dtype=float)
    osc = np.array([np.ptp(x[a - 1:b]) for a, b in _segments(blocks, x.size)])
    return float((osc ** s).sum() ** (1.0 / s))


def oscillation_columns(mat: np.ndarray, blocks: Sequence[int], s: float) -> np.ndarray:
    _check_s(s)
    mat = np.asarray(mat, dtype=float)
    acc = np.zeros(mat.shape[1:])
    for a, b in _segments(blocks, mat.shape[0]):
        acc += np.ptp(mat[a - 1:b], axis=0) ** s
    return acc ** (1.0 / s)


def dyadic_blocks(N: int) -> list[int]:
    return [2 ** j for j in range(int(np.log2(N)) + 1) if 2 ** j <= N]


def variation_functional(traj: Trajectory, beta: float, s: float, N=None,
                         blocks: Sequence[int] | None = None):
    """Site-wise ``v(s)`` (and ``o(s)`` over ``blocks``) of ``n -> n^beta terms[n]``, n = 1..N."""
    levels = _levels(traj, N)
    out = []
    for L in levels:
        ns = np.arange(1, L + 1, dtype=float)
        seq = ns[:, None] ** beta * traj.values[1:L + 1]
        v = variation_columns(seq, s)
        res_v = _result(traj, v, L, {"functional": "variation", "beta": beta, "s": s})
        b = dyadic_blocks(L) if blocks is None else [x for x in blocks if x <= L]
        o = oscillation_columns(seq, b, s)
        res_o = _result(traj, o, L, {"functional": "oscillation", "beta": beta, "s": s,
                                     "blocks": list(map(int, b))})
        out.append((res_v, res_o))
    return out if (N is not None and not np.isscalar(N)) else out[0]


# ---------------------------------------------------------------------------
# gap sequences and block functionals


@dataclass(frozen=True)
class GapSequence:
    alpha: float
    indices: np.ndarray
    rule: str = "n_{k+1} = n_k + max(1, round(n_k^alpha))"

    def upto(self, N: int) -> np.ndarray:
        return self.indices[self.indices <= N]


def gap_subsequence(alpha: float, N: int, n1: int = 1) -> GapSequence:
    """Indices ``n_1 < n_2 < ... <= N`` with ``n_{k+1} = n_k + max(1, round(n_k^alpha))``.

    Rounding is half-up.
    """
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    if n1 < 1:
        raise ValueError("n1 must be >= 1")
    idx = [n1]
    while True:
        step = max(1, int(np.floor(idx[-1] ** alpha + 0.5)))
        nxt = idx[-1] + step
        if nxt > N:
            break
        idx.append(nxt)
    return GapSequence(float(alpha), np.array(idx, dtype=np.int64))


BLOCK_MODES = ("endpoint-diff", "block-max", "block-variation")


def block_functional(traj: Trajectory, gaps: GapSequence, beta: float, s: float,
                     mode: str = "endpoint-diff", N=None):
    """Block functionals over ``I_k = [n_k, n_{k+1})``, weights ``n_k^{beta s}``.

    ``endpoint-diff``: ``|terms[n_k] - terms[n_{k+1}]|``;
    ``block-max``: ``max_{n in I_k} |terms[n] - terms[n_k]|``;
    ``block-variation``: ``v(s)`` of ``terms`` restricted to ``I_k``.
    Only blocks with ``n_{k+1} <= N`` are used.
    """
    _check_s(s)
    if mode not in BLOCK_MODES:
        raise ValueError(f"mode must be one of {BLOCK_MODES}")
    levels = _levels(traj, N)
    idx = gaps.upto(max(levels))
    acc = np.zeros(traj.sites.size)
    snaps: dict[int, np.ndarray] = {}
    lv = sorted(levels)
    li = 0
    V = traj.values
    for a, b in zip(idx, idx[1:]):
        while li < len(lv) and b > lv[li]:
            snaps[lv[li]] = acc.copy()
            li += 1
        if mode == "endpoint-diff":
            piece = np.abs(V[a] - V[b]) ** s
        elif mode == "block-max":
            piece = np.max(np.abs(V[a:b] - V[a]), axis=0) ** s
        else:
            piece = variation_columns(V[a:b], s) ** s
        acc = acc + float(a) ** (beta * s) * piece
    while li < len(lv):
        snaps[lv[li]] = acc.copy()
        li += 1
    out = [_result(traj, snaps[L] ** (1.0 / s), L,
                   {"functional": "block", "mode": mode, "beta": beta, "s": s,
                    "gaps_alpha": gaps.alpha}) for L in levels]
    return out if (N is not None and not np.isscalar(N)) else out[0]


# ---------------------------------------------------------------------------
# Abel summation bound


def abel_constant(alpha: float, N: int) -> float:
    """``max_{0<=k<=N} ((k+1)^alpha - k^alpha) / (k+1)^{alpha-1}``."""
    k = np.arange(0, N + 1, dtype=float)
    return float(np.max(((k + 1) ** alpha - k ** alpha) / (k + 1) ** (alpha - 1)))


@dataclass
class AbelCheck:
    C: float
    max_ratio: float           # max over (n, x) of lhs / rhs where rhs > 0
    violations: int
    checked: int


def abel_check(traj_m: Trajectory, traj_m1: Trajectory, alpha: float, N: int | None = None,
               rtol: float = 1e-12, atol_rel: float = 1e-13) -> AbelCheck:
    """Pointwise check of

        n^alpha |a_n| <= sum_{k<n} C (k+1)^{alpha-1} |a_k| + sum_{1<=k<=n} k^alpha |b_{k-1}|,

    where ``a_k`` are the terms of ``traj_m`` and ``b_k`` those of ``traj_m1``
    (so ``b_{k-1} = a_{k-1} - a_k``).  Both trajectories must share sites.
    A violation needs ``lhs > rhs (1 + rtol) + atol``, with ``atol`` scaled
    by the largest |a|.
    """
    if not np.array_equal(traj_m.sites, traj_m1.sites):
        raise ValueError("trajectories must share sites")
    N = min(traj_m.N, traj_m1.N) if N is None else N
    C = abel_constant(alpha, N)
    A = np.abs(traj_m.values[:N + 1])
    B = np.abs(traj_m1.values[:N + 1])
    atol = atol_rel * float(A.max()) if A.size else 0.0
    k = np.arange(N + 1, dtype=float)
    s1 = np.zeros(A.shape[1])
    s2 = np.zeros(A.shape[1])
    worst, bad, checked = 0.0, 0, 0
    for n in range(1, N + 1):
        s1 += C * (k[n - 1] + 1.0) ** (alpha - 1.0) * A[n - 1]
        s2 += k[n] ** alpha * B[n - 1]
        lhs = k[n] ** alpha * A[n]
        rhs = s1 + s2
        bad += int(np.count_nonzero(lhs > rhs * (1 + rtol) + atol))
        pos = rhs > 0
        if np.any(pos):
            worst = max(worst, float(np.max(lhs[pos] / rhs[pos])))
        checked += lhs.size
    return AbelCheck(C, worst, bad, checked)
