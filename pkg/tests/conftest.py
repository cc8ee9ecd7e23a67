import numpy as np
import pytest

import heatbv as hb


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance verdict lines after capture is released."""
    try:
        from tests.test_acceptance import VERDICTS
    except ImportError:
        try:
            from test_acceptance import VERDICTS
        except ImportError:
            return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def two_point():
    return hb.build_lattice(1, 2, h=1.0)


@pytest.fixture(scope="session")
def two_point_spec(two_point):
    return hb.spectral_decompose(two_point)


@pytest.fixture(scope="session")
def four_cycle():
    return hb.build_torus(1, 4, h=1.0)


@pytest.fixture(scope="session")
def four_cycle_spec(four_cycle):
    return hb.spectral_decompose(four_cycle)


@pytest.fixture(scope="session")
def torus16():
    return hb.build_torus(2, 16, h=1.0 / 16.0)


@pytest.fixture(scope="session")
def torus16_spec(torus16):
    return hb.spectral_decompose(torus16)


@pytest.fixture(scope="session")
def lattice9():
    return hb.build_lattice(2, 9, h=1.0 / 8.0)


@pytest.fixture(scope="session")
def lattice9_spec(lattice9):
    return hb.spectral_decompose(lattice9)
