import numpy as np
import pytest

from rittl1.certificates import (
    angular_ratio,
    check_m1,
    check_m2,
    lemma2_quantities,
    lemma_quantities,
    ritt_constant,
)
from rittl1.functionals import gap_subsequence
from rittl1.measure import dirac, lazy_walk
from rittl1.symbols import LazyWalkSymbol, NuAlphaSymbol, power_majorant, symbol_from_measure

QUANTITIES = ("A", "B", "B_tilde", "C", "D", "E")


def test_zero_family_gives_zero_quantities():
    rep = lemma_quantities(symbol_from_measure(dirac(0)), alpha=1.0, s=2.0, m=1.0,
                           check_stability=False)
    for name in QUANTITIES:
        assert rep.value(name) == 0.0


def test_divergent_regime_reports_growth():
    rep = lemma_quantities(NuAlphaSymbol(0.5), alpha=1.0, s=1.0, m=1.0, check_stability=False)
    assert rep.A == "diverged"
    parts = rep.growth["A"]
    assert all(b > a for a, b in zip(parts, parts[1:]))
    assert rep.certificate_scale()["A+B_tilde+C+E"] is None


def test_lemma2_regimes():
    sym = NuAlphaSymbol(0.5)
    gaps = gap_subsequence(0.5, 1 << 16)
    ok = lemma2_quantities(sym, gaps, beta=0.0, s=2.0, check_stability=False)
    assert all(ok.finite(n) for n in ("A", "B_tilde", "C", "E"))
    bad = lemma2_quantities(sym, gaps, beta=0.6, s=2.0, check_stability=False)
    assert bad.A == "diverged"


def test_angular_ratio_verdicts():
    assert angular_ratio(symbol_from_measure(dirac(1)), 512).verdict == "fails"
    rep = angular_ratio(NuAlphaSymbol(0.5), 1024)
    assert rep.verdict == "holds-empirically" and np.isfinite(rep.sup_estimate)
    assert np.isfinite(angular_ratio(LazyWalkSymbol(), 1024).sup_estimate)


def test_m1_examples():
    lazy = check_m1(symbol_from_measure(lazy_walk()), 2.0, 1024)
    # 1 - cos^2(pi t) = sin^2(pi t) >= 4 t^2 on |t| <= 1/2
    assert lazy.best_constants["c1"] >= 4.0 * (1 - 1e-12)
    assert lazy.verdict == "holds-empirically"
    assert check_m1(NuAlphaSymbol(0.5), 0.5, 1024).verdict == "holds-empirically"
    shift = check_m1(symbol_from_measure(dirac(1)), 1.0, 512)
    assert shift.verdict == "fails" and abs(shift.best_constants["c1"]) <= 1e-14


def test_m2_examples():
    for a in (0.5, 1.0, 2.0):
        rep = check_m2(LazyWalkSymbol(), power_majorant(a), 512)
        assert rep["M2-v"].sup_estimate == pytest.approx(1.0 / a, rel=1e-12)
    nu = check_m2(NuAlphaSymbol(0.5), power_majorant(0.5), 1024)
    assert all(nu[k].verdict == "holds-empirically" for k in nu)
    shift = check_m2(symbol_from_measure(dirac(1)), power_majorant(1.0), 512)
    assert shift["M2-i"].verdict == "fails" and shift["M2"].verdict == "fails"


def test_ritt_trend_examples():
    assert np.all(ritt_constant(dirac(0), 16).trend == 0.0)
    shift = ritt_constant(dirac(1), 64)
    assert shift.sup == 128.0
    lazy = ritt_constant(lazy_walk(), 256)
    assert np.all(lazy.error >= 0) and lazy.sup < 1.0
    with pytest.raises(ValueError):
        ritt_constant(lazy_walk(), 1)
