import json
from pathlib import Path

import numpy as np
import pytest

from biwarp.audit import sample_chart
from biwarp.catalog import fixture

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def oracles():
    return json.loads((DATA / "oracles.json").read_text())


@pytest.fixture(scope="session")
def r14():
    return fixture("r14")


@pytest.fixture(scope="session")
def r14_sample(r14):
    return sample_chart(r14.chart, grid=3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import summary_lines
    except ImportError:
        return
    lines = summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
