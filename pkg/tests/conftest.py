import math
import sys
import warnings

import pytest

from lattice_dilation import MG24, SR87, DimensionlessRegime, derive_lattice
from lattice_dilation.closedform import RegimeWarning


@pytest.fixture(scope="session")
def mg():
    return derive_lattice(MG24)


@pytest.fixture(scope="session")
def sr():
    return derive_lattice(SR87)


@pytest.fixture(scope="session")
def regime():
    return DimensionlessRegime()


@pytest.fixture
def quiet_regime():
    """Silence the ω_z ≫ Γ warning for tests that deliberately sit at ω_z/Γ = 50."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        yield


BASELINE = dict(theta=math.pi / 4, phi=math.pi)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("tests.test_acceptance")
    if acceptance is None or not acceptance.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(acceptance.LINES):
        terminalreporter.write_line(acceptance.LINES[number])
