"""Shared fixtures plus a per-criterion summary for the acceptance suite."""

from __future__ import annotations

from pathlib import Path

import pytest

from benchlite.model import default_catalog, load_inventory
from benchlite.orchestrator import load_mock_profile

FIXTURES = Path(__file__).parent / "fixtures"

_ACCEPTANCE_LABELS: dict[str, str] = {}
_ACCEPTANCE_RESULTS: dict[str, str] = {}


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


@pytest.fixture(scope="session")
def fleet_inventory():
    return load_inventory(FIXTURES / "inventory.txt")


@pytest.fixture(scope="session")
def fleet_profile():
    return load_mock_profile(FIXTURES / "mock_profile.txt")


def pytest_collection_modifyitems(items):
    for item in items:
        if "test_acceptance.py" not in str(item.fspath):
            continue
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _ACCEPTANCE_LABELS[item.nodeid] = doc


def pytest_runtest_logreport(report):
    if report.nodeid not in _ACCEPTANCE_LABELS:
        return
    if report.when == "call":
        _ACCEPTANCE_RESULTS[report.nodeid] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and not report.passed:
        _ACCEPTANCE_RESULTS[report.nodeid] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for nodeid, label in _ACCEPTANCE_LABELS.items():
        verdict = _ACCEPTANCE_RESULTS.get(nodeid, "SKIP")
        terminalreporter.write_line(f"{verdict}  {label}")
