import time

import pytest

SUITE_BUDGET_S = 60.0

_results: dict[int, tuple[bool, str]] = {}
_start = [0.0]


def pytest_sessionstart(session):
    _start[0] = time.perf_counter()


@pytest.fixture
def criterion():
    """Record the outcome of an acceptance criterion: criterion(number, passed, detail)."""

    def record(number: int, passed: bool, detail: str) -> bool:
        _results[number] = (bool(passed), detail)
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    elapsed = time.perf_counter() - _start[0]
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in range(1, 11):
        if number not in _results:
            tr.write_line(f"criterion {number:2d}: NOT RUN")
            continue
        passed, detail = _results[number]
        if number == 10:
            in_budget = elapsed < SUITE_BUDGET_S
            passed = passed and in_budget
            detail += f"; suite wall time {elapsed:.1f} s (budget {SUITE_BUDGET_S:.0f} s)"
        tr.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
