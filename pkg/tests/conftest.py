import pytest
from hypothesis import HealthCheck, settings

from enrint.cli import load

settings.register_profile("default", deadline=None, derandomize=True, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow,
                                                 HealthCheck.data_too_large])
settings.load_profile("default")


@pytest.fixture(scope="session")
def P1():
    return load("fixtures/P1")


@pytest.fixture(scope="session")
def P2():
    return load("fixtures/P2")


@pytest.fixture(scope="session")
def P3():
    return load("fixtures/P3")


CRITERIA = {}


@pytest.fixture
def criterion():
    """Record one acceptance line; the summary prints them in order."""
    def record(number, name, passed, detail):
        line = f"criterion {number} {name}: {'PASS' if passed else 'FAIL'} ({detail})"
        CRITERIA[number] = line
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance")
        for number in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[number])
