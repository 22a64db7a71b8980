import os

import numpy as np
import pytest

from spectral_ggm import imageio

DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(scope="session")
def camera_path():
    return os.path.join(DATA, "camera128.pgm")


@pytest.fixture(scope="session")
def astronaut_path():
    return os.path.join(DATA, "astronaut128.png")


@pytest.fixture(scope="session")
def camera(camera_path):
    return imageio.read_image(camera_path).data


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    """Record the one-line verdict of an acceptance criterion."""

    def record(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
