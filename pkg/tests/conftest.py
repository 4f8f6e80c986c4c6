import json
from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"

# filled by test_acceptance, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def golden():
    with open(DATA / "golden_designs.json") as fh:
        return {k: np.array(v, dtype=np.int64) for k, v in json.load(fh).items()}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
