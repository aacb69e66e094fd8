"""String keys for measures and symbols.

Keys:

``nu_alpha:<a>``
    the binomial-series measure with parameter ``a`` in (0, 1); closed-form symbol,
    measure truncated to ``K`` atoms
``lazy_walk``
    ``(delta_{-1} + 2 delta_0 + delta_1)/4``
``delta:<k>``
    point mass at ``k`` (``delta:0`` is the identity, ``delta:1`` the shift)
``from_file:<path>``
    measure in the ``offset weight`` text format
"""

from __future__ import annotations

from .fractional import nu_alpha_measure
from .measure import SignedMeasure, dirac, lazy_walk
from .symbols import (
    DEFAULT_T_MIN,
    FourierSymbol,
    LazyWalkSymbol,
    NuAlphaSymbol,
    symbol_from_measure,
)


class UnknownKey(KeyError):
    pass


def _split(key: str) -> tuple[str, str]:
    head, _, arg = key.partition(":")
    return head.strip(), arg.strip()


def resolve_measure(key: str, K: int = 1 << 14) -> SignedMeasure:
    head, arg = _split(key)
    if head == "nu_alpha":
        return nu_alpha_measure(float(arg), K)
    if head == "lazy_walk":
        return lazy_walk()
    if head == "delta":
        return dirac(int(arg or 0))
    if head == "from_file":
        mu = SignedMeasure.load(arg)
        return SignedMeasure(mu.offsets, mu.weights, mu.tail_bound, mu.label or key)
    raise UnknownKey(key)


def resolve_symbol(key: str, K: int = 1 << 14, t_min: float = DEFAULT_T_MIN) -> FourierSymbol:
    head, arg = _split(key)
    if head == "nu_alpha":
        return NuAlphaSymbol(float(arg), t_min)
    if head == "lazy_walk":
        return LazyWalkSymbol(t_min)
    if head in ("delta", "from_file"):
        return symbol_from_measure(resolve_measure(key, K), t_min)
    raise UnknownKey(key)


def canonical(key: str) -> str:
    head, arg = _split(key)
    if head == "nu_alpha":
        return f"nu_alpha:{float(arg):g}"
    return key.strip()
