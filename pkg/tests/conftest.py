import os

import pytest

from hodge_laguerre.verify import TestConfig, run_suite

# every suite is run once per session and shared by the per-module tests and
# the acceptance file
_REPORTS: dict = {}


def suite_report(name: str):
    if name not in _REPORTS:
        _REPORTS[name] = run_suite(name, TestConfig(seed=0))
    return _REPORTS[name]


@pytest.fixture(scope="session")
def reports():
    return suite_report


def pytest_configure(config):
    os.environ.setdefault("HL_THREADS", "1")


# filled by test_acceptance.py, printed after the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for crit in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[crit])
