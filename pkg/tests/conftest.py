"""Shared fixtures; collects acceptance-criterion lines for the summary."""

import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    def _record(num, name, ok, detail):
        line = f"criterion {num:2d} [{name}]: {'PASS' if ok else 'FAIL'} ({detail})"
        ACCEPTANCE_LINES.append(line)
        assert ok, line

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
