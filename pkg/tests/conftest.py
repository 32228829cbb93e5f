import pytest

from metricgames.structures import Vocabulary, metric_space


def two_point(d, names=("x", "y"), vocabulary=Vocabulary.LM_CORR):
    return metric_space(list(names), [[0, d], [d, 0]], vocabulary)


def one_point(name="x", vocabulary=Vocabulary.LM_CORR):
    return metric_space([name], [[0]], vocabulary)


@pytest.fixture
def x1():
    return two_point(1)


@pytest.fixture
def x2():
    return two_point(2, ("u", "v"))


@pytest.fixture
def iso1():
    return two_point(1, vocabulary=Vocabulary.LM_ISO)


@pytest.fixture
def iso2():
    return two_point(2, ("u", "v"), vocabulary=Vocabulary.LM_ISO)


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
