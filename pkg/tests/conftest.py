import os
import random

import pytest

from knightmark.io import load


@pytest.fixture(scope="session")
def seed():
    return int(os.environ.get("KNIGHTMARK_SEED", "20240601"))


@pytest.fixture
def rng(seed):
    return random.Random(seed)


@pytest.fixture(scope="session")
def binomial():
    return load("binomial")


@pytest.fixture(scope="session")
def kreps():
    return load("kreps")


@pytest.fixture(scope="session")
def ex45():
    return load("example45")


@pytest.fixture(scope="session")
def ex34():
    return load("example34")


@pytest.fixture(scope="session")
def onetwo():
    return load("onetwo")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
