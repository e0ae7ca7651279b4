"""Shared fixtures; collects one line per acceptance criterion."""

from __future__ import annotations

import pytest

_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record a criterion outcome and return whether it passed."""

    def record(number: int, title: str, passed: bool, detail: str = "") -> bool:
        mark = "PASS" if passed else "FAIL"
        line = f"criterion {number:2d} [{mark}] {title}" + (f": {detail}" if detail else "")
        _CRITERIA[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[number])
