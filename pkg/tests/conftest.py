import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bayes_mht.instances import ternary_joint  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
INSTANCES = ROOT / "instances"

_acceptance_lines: list[str] = []


@pytest.fixture
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture
def ternary():
    return ternary_joint()


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
