import time

import pytest

from phonon_dephasing.compare import run_compare

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


@pytest.fixture(scope="session")
def default_compare():
    """The default comparison grid, run once per session, with its wall time."""
    start = time.perf_counter()
    report = run_compare()
    return report, time.perf_counter() - start


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
