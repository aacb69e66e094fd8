"""Fourier symbols of measures on the integers.

Convention: ``mu_hat(t) = sum_k mu(k) e(-k t)`` with ``e(x) = exp(2 pi i x)``, and
the d-th derivative in ``t`` is ``sum_k (-2 pi i k)^d mu(k) e(-k t)``.  Symbols are
evaluated on the fundamental domain ``(-1/2, 1/2]``.

Every symbol also exposes ``one_minus(t)``, the quantity ``1 - mu_hat(t)`` computed
without cancellation.  Near ``t = 0`` this is what all certificate integrands need.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .measure import SignedMeasure

TWO_PI = 2.0 * np.pi
DEFAULT_T_MIN = 2.0 ** -20


class SingularPointError(ValueError):
    """Raised when derivatives are requested at a point where they do not exist."""


def _as_t(t) -> np.ndarray:
    return np.asarray(t, dtype=float)


def one_minus_expm(k, t) -> np.ndarray:
    """``1 - e(-k t)`` via half-angle forms; accurate for small ``k t``."""
    x = np.pi * np.multiply(k, t)
    return 2.0 * np.sin(x) ** 2 + 1j * np.sin(2.0 * x)


def abs_from_v(v: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Given ``v = 1 - u`` return ``(|u|, 1 - |u|, log|u|)`` without cancellation."""
    v = np.asarray(v, dtype=complex)
    x = np.abs(v) ** 2 - 2.0 * v.real
    with np.errstate(divide="ignore"):
        log_abs = 0.5 * np.log1p(np.maximum(x, -1.0))
    absu = np.exp(log_abs)
    gap = -x / (1.0 + absu)
    return absu, gap, log_abs


class FourierSymbol:
    """Base class.  Subclasses implement ``_eval`` and ``_one_minus``."""

    model: str = "abstract"
    smooth_at_zero: bool = True
    #: exponent ``a`` in ``1 - |mu_hat(t)| ~ c |t|^a`` when known in closed form
    m1_exponent: float | None = None
    real_measure: bool = True

    def __init__(self, t_min: float = DEFAULT_T_MIN, label: str = "") -> None:
        self.t_min = float(t_min)
        self.label = label

    # public API -----------------------------------------------------
    def eval(self, t, derivatives: bool = True):
        """Return ``(value, d1, d2)`` (complex arrays) at ``t``.

        For symbols that are not smooth at 0, requesting derivatives at
        ``|t| < t_min`` raises :class:`SingularPointError`.
        """
        t = _as_t(t)
        if derivatives and not self.smooth_at_zero and np.any(np.abs(t) < self.t_min):
            raise SingularPointError(
                f"derivatives of {self.model} refused below t_min={self.t_min:g}")
        return self._eval(t, derivatives)

    def value(self, t) -> np.ndarray:
        return self._eval(_as_t(t), False)[0]

    def one_minus(self, t) -> np.ndarray:
        return self._one_minus(_as_t(t))

    def __call__(self, t):
        return self.value(t)

    # subclass hooks ---------------------------------------------------
    def _eval(self, t: np.ndarray, derivatives: bool):  # pragma: no cover - abstract
        raise NotImplementedError

    def _one_minus(self, t: np.ndarray) -> np.ndarray:
        return 1.0 - self._eval(t, False)[0]

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.label or self.model})"


class FiniteSumSymbol(FourierSymbol):
    """Exact finite sum over the atoms of a measure."""

    model = "finite-sum"

    def __init__(self, mu: SignedMeasure, t_min: float = DEFAULT_T_MIN, chunk: int = 1 << 22):
        super().__init__(t_min, mu.label)
        self.mu = mu
        self._k = mu.offsets.astype(float)
        self._w = mu.weights
        self._chunk = chunk
        self._mass = float(mu.weights.sum())

    def _blocks(self, t: np.ndarray):
        flat = t.ravel()
        step = max(1, self._chunk // max(1, self._k.size))
        for i in range(0, flat.size, step):
            yield i, flat[i:i + step]

    def _eval(self, t, derivatives):
        shape = t.shape
        out = [np.empty(t.size, complex) for _ in range(3 if derivatives else 1)]
        for i, tb in self._blocks(t):
            ph = np.exp(-1j * TWO_PI * np.outer(tb, self._k))
            out[0][i:i + tb.size] = ph @ self._w
            if derivatives:
                c1 = -1j * TWO_PI * self._k * self._w
                out[1][i:i + tb.size] = ph @ c1
                out[2][i:i + tb.size] = ph @ (-1j * TWO_PI * self._k * c1)
        res = [o.reshape(shape) for o in out]
        if not derivatives:
            res += [None, None]
        return tuple(res)

    def _one_minus(self, t):
        shape = t.shape
        out = np.empty(t.size, complex)
        for i, tb in self._blocks(t):
            out[i:i + tb.size] = one_minus_expm(self._k[None, :], tb[:, None]) @ self._w
        return out.reshape(shape) + (1.0 - self._mass)


class LazyWalkSymbol(FourierSymbol):
    """``1/2 + cos(2 pi t)/2``, the symbol of ``(delta_{-1} + 2 delta_0 + delta_1)/4``."""

    model = "closed-form lazy-walk"
    m1_exponent = 2.0

    def __init__(self, t_min: float = DEFAULT_T_MIN):
        super().__init__(t_min, "lazy_walk")

    def _eval(self, t, derivatives):
        val = (0.5 + 0.5 * np.cos(TWO_PI * t)).astype(complex)
        if not derivatives:
            return val, None, None
        d1 = (-np.pi * np.sin(TWO_PI * t)).astype(complex)
        d2 = (-2.0 * np.pi ** 2 * np.cos(TWO_PI * t)).astype(complex)
        return val, d1, d2

    def _one_minus(self, t):
        return (np.sin(np.pi * t) ** 2).astype(complex)


class NuAlphaSymbol(FourierSymbol):
    """Closed form ``1 - (1 - e(-t))^alpha`` (principal branch) of ``nu_alpha``.

    ``1 - e(-t)`` has nonnegative real part on the fundamental domain, so the
    principal branch is continuous there.
    """

    model = "closed-form nu_alpha"
    smooth_at_zero = False

    def __init__(self, alpha: float, t_min: float = DEFAULT_T_MIN):
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        super().__init__(t_min, f"nu_alpha:{alpha:g}")
        self.alpha = float(alpha)
        self.m1_exponent = float(alpha)

    def _w(self, t):
        return one_minus_expm(1.0, t)

    def _one_minus(self, t):
        w = self._w(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(w == 0, 0.0, w ** self.alpha)
        return out.astype(complex)

    def _eval(self, t, derivatives):
        a = self.alpha
        w = self._w(t)
        v = self._one_minus(t)
        val = 1.0 - v
        if not derivatives:
            return val, None, None
        e = np.exp(-1j * TWO_PI * t)
        w1 = 1j * TWO_PI * e
        w2 = (TWO_PI ** 2) * e
        wa1 = w ** (a - 1.0)
        wa2 = w ** (a - 2.0)
        d1 = -a * wa1 * w1
        d2 = -a * (a - 1.0) * wa2 * w1 ** 2 - a * wa1 * w2
        return val, d1, d2


class DeltaSymbol(FourierSymbol):
    """``P * u^n * v^m`` where ``u`` is a base symbol and ``v = 1 - u``.

    Derivatives use the factored product rule:

        F'  = P u^{n-1} v^{m-1} u' (n v - m u)
        F'' = P u^{n-2} v^{m-2} (a n^2 + b n + c)

    with ``a = u'^2 v^2``, ``b = -u'^2 v^2 + u u'' v^2 - 2 m u u'^2 v`` and
    ``c = m(m-1) u^2 u'^2 - m u^2 v u''``.  ``n = 1`` is handled separately so that
    a zero of ``u`` never meets a negative power.
    """

    model = "composite"

    def __init__(self, base: FourierSymbol, n: int, m: float, prefactor: float = 1.0):
        if n < 0:
            raise ValueError("n must be >= 0")
        if m < 0:
            raise ValueError("m must be >= 0")
        super().__init__(base.t_min, f"delta({base.label},n={n},m={m:g})")
        self.base, self.n, self.m, self.prefactor = base, int(n), float(m), float(prefactor)
        integer_m = float(m).is_integer()
        self.smooth_at_zero = base.smooth_at_zero and integer_m
        self.real_measure = base.real_measure

    def _one_minus(self, t):
        return 1.0 - self._eval(t, False)[0]

    def _eval(self, t, derivatives):
        n, m, P = self.n, self.m, self.prefactor
        if derivatives:
            u, u1, u2 = self.base.eval(t, True)
        else:
            u = self.base.value(t)
        v = self.base.one_minus(t)
        integer_m = m.is_integer()
        if not integer_m and np.any((v == 0) & (t != 0)):
            raise SingularPointError("1 - mu_hat vanishes at an interior point")
        vm = v ** m if m else np.ones_like(v)
        val = P * u ** n * vm
        if not derivatives:
            return val, None, None
        # powers of v with possibly negative exponents (m < 2): guarded by v != 0
        with np.errstate(divide="ignore", invalid="ignore"):
            vm1 = v ** (m - 1.0) if m else np.zeros_like(v)
            vm2 = v ** (m - 2.0) if m else np.zeros_like(v)
        if n == 0:
            d1 = -P * m * vm1 * u1 if m else np.zeros_like(u)
            d2 = (P * (m * (m - 1.0) * vm2 * u1 ** 2 - m * vm1 * u2)) if m else np.zeros_like(u)
            return val, d1, d2
        if m == 0:
            d1 = P * n * u ** (n - 1) * u1
            if n == 1:
                d2 = P * u2
            else:
                d2 = P * (n * (n - 1) * u ** (n - 2) * u1 ** 2 + n * u ** (n - 1) * u2)
            return val, d1, d2
        d1 = P * u ** (n - 1) * u1 * (n * vm - m * u * vm1)
        if n == 1:
            d2 = P * (u2 * vm - 2.0 * m * u1 ** 2 * vm1
                      + m * (m - 1.0) * u * vm2 * u1 ** 2 - m * u * vm1 * u2)
        else:
            a = u1 ** 2 * v ** 2
            b = -u1 ** 2 * v ** 2 + u * u2 * v ** 2 - 2.0 * m * u * u1 ** 2 * v
            c = m * (m - 1.0) * u ** 2 * u1 ** 2 - m * u ** 2 * v * u2
            d2 = P * u ** (n - 2) * vm2 * (a * n * n + b * n + c)
        return val, d1, d2


def symbol_from_measure(mu: SignedMeasure, t_min: float = DEFAULT_T_MIN) -> FiniteSumSymbol:
    return FiniteSumSymbol(mu, t_min)


def closed_form_nu_alpha(alpha: float, t_min: float = DEFAULT_T_MIN) -> NuAlphaSymbol:
    return NuAlphaSymbol(alpha, t_min)


def delta_symbol(base: FourierSymbol, n: int, m: float, prefactor: float = 1.0) -> DeltaSymbol:
    return DeltaSymbol(base, n, m, prefactor)


@dataclass(frozen=True)
class MajorantFunction:
    """Even majorant ``h`` with ``h(0) = 0``, stored on ``[0, 1/2]``."""

    h: Callable[[np.ndarray], np.ndarray]
    h_prime: Callable[[np.ndarray], np.ndarray]
    kind: str = "user"
    params: dict = field(default_factory=dict)

    def __call__(self, t):
        return self.h(np.abs(_as_t(t)))


def power_majorant(a: float, c: float = 1.0) -> MajorantFunction:
    """``h(t) = c |t|^a`` with derivative ``c a |t|^{a-1}``."""
    if not 0.0 < a <= 2.0:
        raise ValueError("a must lie in (0, 2]")
    if c <= 0:
        raise ValueError("c must be positive")

    def h(t):
        return c * np.abs(_as_t(t)) ** a

    def hp(t):
        return c * a * np.abs(_as_t(t)) ** (a - 1.0)

    return MajorantFunction(h, hp, "power", {"a": float(a), "c": float(c)})


def half_step_grid(size: int, symmetric: bool = True) -> np.ndarray:
    """Uniform grid avoiding ``t = 0``: midpoints of ``size`` cells.

    Symmetric grids cover ``(-1/2, 1/2)``; otherwise ``(0, 1/2)``.
    """
    if symmetric:
        return -0.5 + (np.arange(size) + 0.5) / size
    return (np.arange(size) + 0.5) / (2.0 * size)
