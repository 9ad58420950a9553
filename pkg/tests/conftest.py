import numpy as np
import pytest

from bayesreg.model_core import standardize
from bayesreg.samplers import RngStream

_acceptance_lines: list[str] = []


@pytest.fixture
def record_criterion():
    """Print and keep one PASS/FAIL line per acceptance criterion."""

    def record(number, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        _acceptance_lines.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


def make_regression(seed, n=60, beta=(1.0, -2.0, 0.5), noise=0.5):
    gen = RngStream(seed).generator()
    beta = np.asarray(beta, dtype=float)
    x = gen.normal(size=(n, beta.size))
    y = x @ beta + noise * gen.standard_normal(n)
    return standardize(x, y)


@pytest.fixture
def small_data():
    return make_regression(7)
