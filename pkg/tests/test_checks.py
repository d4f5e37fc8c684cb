import math

import pytest

from lattice_dilation import algebra
from lattice_dilation.algebra import ChannelKind
from lattice_dilation.checks import (
    CheckResult,
    VerifyRegime,
    check_engine_vs_closedform,
    check_oracle_vs_engine,
    corrupted_rule,
    relative_error,
)
from lattice_dilation.units import DomainError

SMALL = VerifyRegime(T_values=(20.0,), alphas=(0.3,), thetas=(math.pi / 4,), phis=(math.pi,), dim=20)


def test_relative_error_floor():
    assert relative_error(1.0, 1.0) == 0.0
    assert relative_error(0.0, 0.0) == 0.0
    assert relative_error(1e-20, 0.0) == math.inf
    assert relative_error(1e-20, 0.0, floor=1e-10) == pytest.approx(1e-10)
    assert relative_error(1.1, 1.0, floor=1e-3) == pytest.approx(0.1)


def test_check_result_lines():
    ok = CheckResult("a", 1e-13, 1e-12)
    bad = CheckResult("b", 1e-3, 1e-4, "T=20")
    info = CheckResult("c", 0.7, math.inf, informational=True)
    assert ok.passed and ok.line().startswith("PASS")
    assert not bad.passed and bad.line().startswith("FAIL") and "(T=20)" in bad.line()
    assert info.passed and info.line().startswith("INFO")
    assert not CheckResult("nan", math.nan, 1.0).passed


@pytest.mark.parametrize(
    "kwargs",
    [dict(T_values=(2000.0,)), dict(T_values=(0.0,)), dict(gamma=0.5), dict(gamma=-0.1)],
)
def test_regime_bounds(kwargs):
    with pytest.raises(DomainError):
        VerifyRegime(**kwargs)


def test_regime_grid_sizes():
    regime = VerifyRegime()
    assert len(regime.channels()) == 4
    assert len(regime.states()) == 2 * 2 * 2 * 2  # alphas x thetas x phis x kinds


def test_small_grid_passes():
    results = check_engine_vs_closedform(SMALL) + check_oracle_vs_engine(SMALL)
    assert all(r.passed for r in results), [r.line() for r in results]


@pytest.mark.parametrize("kind", [ChannelKind.AMPLITUDE, ChannelKind.DIFFUSION])
def test_corrupted_rule_is_caught(kind):
    with corrupted_rule(kind):
        results = check_engine_vs_closedform(SMALL)
    failed = {r.name for r in results if not r.passed}
    assert failed == {f"engine_vs_closedform[{kind.value}]"}


def test_corrupted_rule_is_restored():
    original = algebra.CHANNEL_RULES[ChannelKind.PHASE]
    with pytest.raises(RuntimeError):
        with corrupted_rule("phase"):
            assert algebra.CHANNEL_RULES[ChannelKind.PHASE] is not original
            raise RuntimeError
    assert algebra.CHANNEL_RULES[ChannelKind.PHASE] is original
