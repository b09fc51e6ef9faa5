import random

import pytest

from nestedbethe.field import QQ, QParam


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def q3():
    return QParam.of(3)


def Q(x):
    return QQ(x)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
