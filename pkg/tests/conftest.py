import numpy as np
import pytest

from fracinv.forward import ProblemSpec


def sin_factor(t):
    return 2.0 + np.sin(t)


@pytest.fixture
def spec_half():
    return ProblemSpec.constant(0.5, 1.0)


@pytest.fixture
def spec_sin():
    return ProblemSpec(0.5, 1.0, sin_factor, 1.0, 3.0, label="2 + sin(t)")


_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record and print a one-line verdict, then fail the test if it did not pass."""

    def verdict(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return verdict


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
