"""Shared pytest wiring: collect acceptance lines and echo them at the end."""

import pytest

_acceptance_lines = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line for an acceptance criterion."""

    def report(ok, text):
        line = "%s  %s" % ("PASS" if ok else "FAIL", text)
        _acceptance_lines.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.line(line)
