import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gflasso.data import center_columns


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_instance(rng, n, j, k, n_active=2, noise=1.0):
    """Centered X with a few shared causal columns and correlated traits."""
    x = center_columns(rng.normal(size=(n, j)))
    b = np.zeros((j, k))
    b[:n_active] = rng.uniform(0.5, 1.5, size=(n_active, 1))
    y = center_columns(x @ b + noise * rng.normal(size=(n, k)))
    return x, y, b


_ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def acceptance_report():
    """Record the pass/fail line for one numbered acceptance criterion."""

    def report(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        _ACCEPTANCE_LINES[number] = line
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(_ACCEPTANCE_LINES[n])
