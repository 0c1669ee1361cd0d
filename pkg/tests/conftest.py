import functools

import pytest

from choreobraid.choreography import ChoreographyProblem, solve
from choreobraid.combinatorics import SignSequence

ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def solved(omega_text: str, M: int = 256, seed: int = 0):
    """Solve once per (omega, M, seed) for the whole session."""
    return solve(ChoreographyProblem(SignSequence.parse(omega_text), M), seed=seed)


@pytest.fixture
def solve_cached():
    return solved


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
