"""Shared fixtures, plus a summary table for the acceptance criteria."""

import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance-criterion outcome and assert it.

    Usage: criterion("4b", ok, "kernel vs RBF max abs dev 0.0012 <= 0.02")
    """

    def record(cid: str, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {cid}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line, flush=True)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
