"""Shared fixtures and the acceptance summary hook."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from simplexvar import SimplexConfig

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

_ACCEPTANCE_LINES: list[str] = []


class AcceptanceRecorder:
    """Collects one line per acceptance criterion for the run summary."""

    def record(self, number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number:02d} {'PASS' if passed else 'FAIL'}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line, flush=True)
        assert passed, line


@pytest.fixture(scope="session")
def acceptance() -> AcceptanceRecorder:
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@pytest.fixture
def e1_simplex() -> SimplexConfig:
    return SimplexConfig(n=5, vertices=((1, 0, 0, 0, 0),))


@pytest.fixture
def plane_simplex() -> SimplexConfig:
    return SimplexConfig(n=2, vertices=((1, 0), (0, 1)))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(987654321))
