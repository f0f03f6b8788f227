from __future__ import annotations

import math

import pytest
from hypothesis import HealthCheck, settings

from infosum.specs import Gaussian, GaussianMixture, GridConfig, Uniform

settings.register_profile(
    "infosum", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("infosum")

BIMODAL = GaussianMixture(((0.5, -1.0, 0.25), (0.5, 1.0, 0.25)))
HALF_LOG_2PIE = 0.5 * math.log(2 * math.pi * math.e)


@pytest.fixture
def cfg():
    return GridConfig()


@pytest.fixture
def bimodal():
    return BIMODAL


@pytest.fixture
def std_normal():
    return Gaussian(0.0, 1.0)


@pytest.fixture
def unit_uniform():
    return Uniform(0.0, 1.0)


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one ``PASS``/``FAIL`` line per acceptance criterion, then assert."""

    def record(k: int, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"
        ACCEPTANCE_LINES[k] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
