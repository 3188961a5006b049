import pytest

from hdsched.netmodel import Network


@pytest.fixture
def triangle():
    # source 0, relay 1, destination 2, direct link included
    return Network(1, {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0})


@pytest.fixture
def line():
    return Network(1, {(0, 1): 1.0, (1, 2): 1.0})


@pytest.fixture
def single():
    return Network(0, {(0, 1): 7.0})


def pytest_terminal_summary(terminalreporter):
    from _report import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES):
            terminalreporter.write_line(line)
