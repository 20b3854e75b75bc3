"""Shared test fixtures and the acceptance-summary terminal hook."""

import pytest

# (criterion number) -> (passed, one-line detail), filled by test_acceptance.py.
ACCEPTANCE_LINES = {}


def record_criterion(num: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES[num] = (bool(passed), detail)


@pytest.fixture
def record():
    """Callable (num, passed, detail) that logs one acceptance result line."""
    return record_criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_LINES):
        passed, detail = ACCEPTANCE_LINES[num]
        word = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {word} - {detail}")
