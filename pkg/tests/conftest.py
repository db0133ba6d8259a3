"""Shared fixtures: worksheet prescriptions and their compiled programs.

Compilation of the ten bundled worksheets is deterministic and cheap but
not free, so both are built once per session and shared read-only.
"""
from __future__ import annotations

import time

import pytest
from hypothesis import HealthCheck, settings

from hepkit.fixtures import default_prescriptions
from hepkit.genpipe import compile_prescription

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

_SESSION_START = time.perf_counter()


@pytest.fixture(scope="session")
def worksheet_rxs():
    return default_prescriptions()


@pytest.fixture(scope="session")
def compiled_programs(worksheet_rxs):
    return tuple(compile_prescription(rx) for rx in worksheet_rxs)


def pytest_terminal_summary(terminalreporter):
    elapsed = time.perf_counter() - _SESSION_START
    terminalreporter.write_line(f"suite wall time: {elapsed:.1f}s")
