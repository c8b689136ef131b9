import numpy as np
import pytest

from cauchys3.frame import random_points

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def pts200():
    return random_points(200, seed=42)


@pytest.fixture(scope="session")
def pts50():
    return random_points(50, seed=7)


@pytest.fixture()
def rng():
    return np.random.default_rng(2024)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
