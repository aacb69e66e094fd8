"""Signed measures on the integers and their action on finitely supported sequences.

Orientation convention: the basic shift is the left shift ``(T f)(x) = f(x + 1)``,
so the operator induced by a measure acts by correlation,

    (T_mu f)(x) = sum_k mu(k) f(x + k).

With this convention ``T_{delta_1} delta_0 = delta_{-1}``.  Composition of induced
operators corresponds to convolution of measures.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.signal import fftconvolve

logger = logging.getLogger(__name__)

# Below this product of support lengths direct convolution beats FFT and is exact
# up to rounding of individual products.
_DIRECT_CONV_LIMIT = 1 << 16


class MeasureError(ValueError):
    """Raised on malformed measure input."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SignedMeasure:
    """Finitely supported signed measure with an l1 truncation-tail bound.

    ``offsets`` is sorted and strictly increasing, ``weights`` holds nonzero reals.
    ``tail_bound`` bounds the l1 mass lost by truncations that produced this object.
    """

    offsets: np.ndarray
    weights: np.ndarray
    tail_bound: float = 0.0
    label: str = ""

    def __post_init__(self) -> None:
        off = np.asarray(self.offsets, dtype=np.int64).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if off.shape != w.shape:
            raise MeasureError("offsets and weights differ in length")
        if off.size > 1 and np.any(np.diff(off) <= 0):
            order = np.argsort(off, kind="stable")
            off, w = off[order], w[order]
            if np.any(np.diff(off) == 0):
                raise MeasureError("duplicate offsets")
        keep = w != 0.0
        if not np.all(np.isfinite(w)):
            raise MeasureError("non-finite weight")
        if self.tail_bound < 0 or not np.isfinite(self.tail_bound):
            raise MeasureError("tail_bound must be finite and >= 0")
        object.__setattr__(self, "offsets", _freeze(off[keep].copy()))
        object.__setattr__(self, "weights", _freeze(w[keep].copy()))
        object.__setattr__(self, "tail_bound", float(self.tail_bound))

    # -- basic accessors -------------------------------------------------
    def __len__(self) -> int:
        return int(self.offsets.size)

    @property
    def support(self) -> tuple[int, int]:
        """Smallest and largest offset (``(0, -1)`` for the zero measure)."""
        if self.offsets.size == 0:
            return (0, -1)
        return int(self.offsets[0]), int(self.offsets[-1])

    def weight(self, k: int) -> float:
        i = np.searchsorted(self.offsets, k)
        if i < self.offsets.size and self.offsets[i] == k:
            return float(self.weights[i])
        return 0.0

    def as_dict(self) -> dict[int, float]:
        return {int(k): float(w) for k, w in zip(self.offsets, self.weights)}

    def dense(self) -> tuple[int, np.ndarray]:
        """Return ``(lo, arr)`` with ``arr[i] = mu(lo + i)`` on the support hull."""
        if self.offsets.size == 0:
            return 0, np.zeros(0)
        lo, hi = self.support
        arr = np.zeros(hi - lo + 1)
        arr[self.offsets - lo] = self.weights
        return lo, arr

    @classmethod
    def from_dense(cls, lo: int, arr: np.ndarray, tail_bound: float = 0.0,
                   label: str = "") -> "SignedMeasure":
        arr = np.asarray(arr, dtype=float)
        nz = np.flatnonzero(arr)
        return cls(nz.astype(np.int64) + int(lo), arr[nz], tail_bound, label)

    # -- arithmetic -----------------------------------------------------
    def scaled(self, c: float) -> "SignedMeasure":
        return SignedMeasure(self.offsets, c * self.weights, abs(c) * self.tail_bound, self.label)

    def __add__(self, other: "SignedMeasure") -> "SignedMeasure":
        return combine([(1.0, self), (1.0, other)])

    def __sub__(self, other: "SignedMeasure") -> "SignedMeasure":
        return combine([(1.0, self), (-1.0, other)])

    def __neg__(self) -> "SignedMeasure":
        return self.scaled(-1.0)

    # -- text format ----------------------------------------------------
    def to_text(self) -> str:
        buf = io.StringIO()
        buf.write(f"# tail_bound {self.tail_bound!r}\n")
        if self.label:
            buf.write(f"# label {self.label}\n")
        for k, w in zip(self.offsets, self.weights):
            buf.write(f"{int(k)} {float(w)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "SignedMeasure":
        tail = 0.0
        label = ""
        entries: list[tuple[int, float]] = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split(None, 1)
                if parts and parts[0] == "tail_bound":
                    tail = float(parts[1])
                elif parts and parts[0] == "label" and len(parts) > 1:
                    label = parts[1].strip()
                continue
            fields_ = line.split()
            if len(fields_) != 2:
                raise MeasureError(f"line {lineno}: expected 'offset weight'")
            entries.append((int(fields_[0]), float(fields_[1])))
        mu = make_measure(entries, label=label)
        return SignedMeasure(mu.offsets, mu.weights, tail, label)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "SignedMeasure":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())


def make_measure(entries: Iterable[tuple[int, float]], label: str = "") -> SignedMeasure:
    """Build an exact measure from ``(offset, weight)`` pairs; zeros are dropped."""
    entries = list(entries)
    offs = [int(k) for k, _ in entries]
    if len(set(offs)) != len(offs):
        raise MeasureError("duplicate offsets")
    ws = [float(w) for _, w in entries]
    return SignedMeasure(np.array(offs, dtype=np.int64), np.array(ws, dtype=float), 0.0, label)


def dirac(k: int = 0) -> SignedMeasure:
    return make_measure([(k, 1.0)], label=f"delta:{k}")


def lazy_walk() -> SignedMeasure:
    return make_measure([(-1, 0.25), (0, 0.5), (1, 0.25)], label="lazy_walk")


def total_variation(mu: SignedMeasure) -> float:
    """l1 norm of the stored weights (the tail bound is reported separately)."""
    return float(np.abs(mu.weights).sum())


def combine(terms: Sequence[tuple[float, SignedMeasure]], label: str = "") -> SignedMeasure:
    """Linear combination ``sum c_i mu_i``; tail bounds add with weights ``|c_i|``."""
    terms = [(c, m) for c, m in terms if len(m) or m.tail_bound]
    if not terms:
        return SignedMeasure(np.zeros(0, np.int64), np.zeros(0))
    offs = np.concatenate([m.offsets for _, m in terms])
    ws = np.concatenate([c * m.weights for c, m in terms])
    uniq, inv = np.unique(offs, return_inverse=True)
    acc = np.zeros(uniq.size)
    np.add.at(acc, inv, ws)
    tail = sum(abs(c) * m.tail_bound for c, m in terms)
    return SignedMeasure(uniq, acc, tail, label)


def _conv_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.size * b.size <= _DIRECT_CONV_LIMIT or min(a.size, b.size) <= 32:
        return np.convolve(a, b)
    return fftconvolve(a, b)


def convolve(mu: SignedMeasure, nu: SignedMeasure) -> SignedMeasure:
    """Convolution ``(mu * nu)(k) = sum_j mu(j) nu(k - j)`` with tail propagation."""
    tail = (mu.tail_bound * total_variation(nu) + nu.tail_bound * total_variation(mu)
            + mu.tail_bound * nu.tail_bound)
    if len(mu) == 0 or len(nu) == 0:
        return SignedMeasure(np.zeros(0, np.int64), np.zeros(0), tail)
    if len(mu) == 1:
        return SignedMeasure(nu.offsets + mu.offsets[0], mu.weights[0] * nu.weights, tail)
    if len(nu) == 1:
        return SignedMeasure(mu.offsets + nu.offsets[0], nu.weights[0] * mu.weights, tail)
    lo1, a = mu.dense()
    lo2, b = nu.dense()
    return SignedMeasure.from_dense(lo1 + lo2, _conv_arrays(a, b), tail)


def truncate(mu: SignedMeasure, eps: float) -> SignedMeasure:
    """Drop the smallest atoms whose cumulative |weight| stays within ``eps``.

    Ties in |weight| are broken by dropping the atom with larger |offset| first.
    The tail bound grows by exactly the dropped mass.
    """
    if eps < 0:
        raise MeasureError("eps must be >= 0")
    if eps == 0 or len(mu) == 0:
        return mu
    a = np.abs(mu.weights)
    # lexsort: last key is primary.  Ascending |w|, then descending |offset|.
    order = np.lexsort((-np.abs(mu.offsets), a))
    csum = np.cumsum(a[order])
    ndrop = int(np.searchsorted(csum, eps, side="right"))
    if ndrop == 0:
        return mu
    dropped = float(csum[ndrop - 1])
    keep = np.ones(len(mu), dtype=bool)
    keep[order[:ndrop]] = False
    return SignedMeasure(mu.offsets[keep], mu.weights[keep], mu.tail_bound + dropped, mu.label)


def convolution_power(mu: SignedMeasure, n: int, trunc: float = 0.0) -> SignedMeasure:
    """``mu^{*n}`` by repeated squaring.

    The truncation budget ``trunc`` is split geometrically over the convolution
    steps: the last step gets share ``trunc/2``, the one before ``trunc/4`` and so
    on.  Mass dropped while the partial power is ``mu^{*p}`` is amplified by the
    remaining steps by at most ``(n/p) M^{n-p} e^{n trunc}`` with
    ``M = max(1, ||mu|| + tail)``, so each step drops only its share divided by
    that factor.  The truncation part of ``tail_bound`` then stays below ``trunc``.
    """
    if n < 1:
        raise MeasureError("n must be >= 1")
    if trunc < 0:
        raise MeasureError("trunc must be >= 0")
    bits = bin(n)[3:]  # leading bit consumed by the initial copy
    steps = sum(2 if b == "1" else 1 for b in bits)
    M = max(1.0, total_variation(mu) + mu.tail_bound)
    result = mu
    step = 0
    p = 1

    def _budget() -> float:
        if trunc == 0:
            return 0.0
        amp = (n / p) * math.exp((n - p) * math.log(M) + n * trunc)
        return trunc / 2.0 ** (steps - step + 1) / amp

    for b in bits:
        step += 1
        p *= 2
        result = truncate(convolve(result, result), _budget())
        if b == "1":
            step += 1
            p += 1
            result = truncate(convolve(result, mu), _budget())
    return SignedMeasure(result.offsets, result.weights, result.tail_bound,
                         f"{mu.label}^{n}" if mu.label else "")


# ---------------------------------------------------------------------------
# sequences


@dataclass(frozen=True)
class SpatialSequence:
    """Finitely supported real sequence on a window of integer sites.

    ``values[i]`` is the value at site ``lo + i``.  ``window_tail`` bounds the l1
    mass that was pushed outside the admissible window ``[-w_max, w_max]``.
    """

    lo: int
    values: np.ndarray
    window_tail: float = 0.0
    w_max: int | None = None

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float).ravel().copy()
        object.__setattr__(self, "values", _freeze(v))
        object.__setattr__(self, "lo", int(self.lo))
        if self.window_tail < 0:
            raise MeasureError("window_tail must be >= 0")

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.lo, self.lo + self.values.size, dtype=np.int64)

    @property
    def hi(self) -> int:
        return self.lo + self.values.size - 1

    def l1(self) -> float:
        return float(np.abs(self.values).sum())

    def at(self, x: int) -> float:
        i = x - self.lo
        return float(self.values[i]) if 0 <= i < self.values.size else 0.0

    def as_dict(self) -> dict[int, float]:
        return {int(x): float(v) for x, v in zip(self.sites, self.values) if v != 0.0}

    @classmethod
    def from_dict(cls, d: dict[int, float], w_max: int | None = None) -> "SpatialSequence":
        if not d:
            return cls(0, np.zeros(1), 0.0, w_max)
        lo, hi = min(d), max(d)
        arr = np.zeros(hi - lo + 1)
        for x, v in d.items():
            arr[x - lo] = v
        return cls(lo, arr, 0.0, w_max)


def indicator(x: int = 0, w_max: int | None = None) -> SpatialSequence:
    return SpatialSequence(x, np.ones(1), 0.0, w_max)


def apply_to_sequence(mu: SignedMeasure, f: SpatialSequence,
                      w_max: int | None = None) -> SpatialSequence:
    """``(T_mu f)(x) = sum_k mu(k) f(x + k)``, clipped to ``[-w_max, w_max]``.

    Mass falling outside the window is added to ``window_tail``; the measure's own
    tail bound contributes ``tail_bound * ||f||_1``.
    """
    w_max = f.w_max if w_max is None else w_max
    extra = mu.tail_bound * (f.l1() + f.window_tail)
    tail = f.window_tail * total_variation(mu) + extra
    if len(mu) == 0:
        return SpatialSequence(0, np.zeros(1), tail, w_max)
    klo, karr = mu.dense()
    # g(x) = sum_k mu(k) f(x+k): correlation, i.e. convolution with reversed mu.
    out = _conv_arrays(f.values, karr[::-1])
    lo = f.lo - (klo + karr.size - 1)
    if w_max is not None:
        a, b = max(lo, -w_max), min(lo + out.size - 1, w_max)
        if a > b:
            tail += float(np.abs(out).sum())
            return SpatialSequence(0, np.zeros(1), tail, w_max)
        i0, i1 = a - lo, b - lo + 1
        outside = float(np.abs(out[:i0]).sum() + np.abs(out[i1:]).sum())
        tail += outside
        out, lo = out[i0:i1], a
    return SpatialSequence(lo, out, tail, w_max)
