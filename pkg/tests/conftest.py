import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from altarb.ingest import write_dataset  # noqa: E402
from altarb.synthetic import random_dataset  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20190118)


@pytest.fixture
def small_dataset(rng):
    return random_dataset(rng, n_assets=10, n_dates=60)


@pytest.fixture
def data_dir(tmp_path, small_dataset):
    d = tmp_path / "data"
    write_dataset(small_dataset, d)
    return d


_criteria: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion reported in the summary")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    if call.when == "setup" and call.excinfo is not None:
        outcome = "SKIP" if call.excinfo.errisinstance(pytest.skip.Exception) else "FAIL"
        _criteria[name] = outcome
    elif call.when == "call":
        if call.excinfo is None:
            _criteria.setdefault(name, "PASS")
        elif call.excinfo.errisinstance(pytest.skip.Exception):
            _criteria[name] = "SKIP"
        else:
            _criteria[name] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _criteria.items():
        terminalreporter.write_line(f"[{outcome}] {name}")
