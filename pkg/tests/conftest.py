"""Shared fixtures and the acceptance-criteria reporting hook."""

import numpy as np
import pytest

from binrel import PlainRelation

# Populated by tests/test_acceptance.py through the `criterion` fixture;
# printed as one PASS/FAIL line per entry at the end of the run.
ACCEPTANCE_RESULTS = {}


def _record(num: int, desc: str, ok, detail: str = ""):
    ACCEPTANCE_RESULTS[num] = (desc, bool(ok), str(detail))
    assert ok, f"criterion {num} ({desc}): {detail}"


@pytest.fixture
def criterion():
    """Record a pass/fail acceptance verdict and assert it."""
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        desc, ok, detail = ACCEPTANCE_RESULTS[num]
        word = "PASS" if ok else "FAIL"
        line = f"criterion {num:2d}: {word}  {desc}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture
def m1():
    """4x4 worked example used across the construction fixtures."""
    return PlainRelation.from_pairs(4, [(0, 0), (0, 1), (1, 2), (3, 3)])


@pytest.fixture
def m2():
    """Partner relation for the set-operation fixtures."""
    return PlainRelation.from_pairs(4, [(0, 1), (2, 2), (3, 0), (3, 3)])


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))
