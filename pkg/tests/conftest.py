import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sparsecut.graph import WeightedGraph  # noqa: E402

_criteria: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion this test gates")


def pytest_runtest_logreport(report):
    label = report.__dict__.get("criterion_label")
    if label is None:
        return
    if report.when == "call" or report.outcome != "passed":
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        if report.nodeid.endswith("]"):
            label = f"{label} [{report.nodeid.rsplit('[', 1)[1]}"
        _criteria[report.nodeid] = (label, status)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion_label = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in _criteria.values():
        terminalreporter.write_line(f"{status}  {label}")


@pytest.fixture
def triangle():
    return WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
