import pytest

from rittl1.registry import UnknownKey, canonical, resolve_measure, resolve_symbol
from rittl1.symbols import LazyWalkSymbol, NuAlphaSymbol


def test_resolve_measures(tmp_path):
    assert resolve_measure("delta:3").as_dict() == {3: 1.0}
    assert resolve_measure("lazy_walk").support == (-1, 1)
    assert resolve_measure("nu_alpha:0.5", K=10).support == (1, 10)
    path = tmp_path / "m.txt"
    path.write_text("0 0.5\n2 0.5\n")
    assert resolve_measure(f"from_file:{path}").as_dict() == {0: 0.5, 2: 0.5}


def test_resolve_symbols_and_canonical():
    assert isinstance(resolve_symbol("lazy_walk"), LazyWalkSymbol)
    assert isinstance(resolve_symbol("nu_alpha:0.50"), NuAlphaSymbol)
    assert canonical("nu_alpha:0.50") == "nu_alpha:0.5"
    with pytest.raises(UnknownKey):
        resolve_measure("poisson:1")
