"""Shared test plumbing: the acceptance-criteria summary table.

Each acceptance test records one line before asserting, so the terminal
summary always carries the full per-criterion verdict, including honest
failures, without re-reading tracebacks.
"""

import pytest


class CriterionLog:
    def __init__(self):
        self.entries = {}

    def record(self, num: int, label: str, passed: bool, detail: str) -> None:
        self.entries[num] = (label, passed, detail)


_LOG = CriterionLog()


@pytest.fixture(scope="session")
def criteria() -> CriterionLog:
    return _LOG


def pytest_terminal_summary(terminalreporter):
    if not _LOG.entries:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_LOG.entries):
        label, passed, detail = _LOG.entries[num]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d} [{status}] {label}: {detail}")
