import json
from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"

_CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def sample_network():
    """Seven-node network with a known spectrum used as the worked example."""
    doc = json.loads((DATA / "sample_network.json").read_text())
    return np.array(doc["A"], dtype=float)


@pytest.fixture(scope="session")
def sample_file():
    return DATA / "sample_network.json"


@pytest.fixture
def criterion():
    """Record the outcome of one acceptance criterion and assert it."""

    def record(number: int, passed: bool, detail: str = ""):
        _CRITERIA[number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}")
        assert passed, f"criterion {number} failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        passed, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
