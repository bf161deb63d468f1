import json
from pathlib import Path

import pytest

GOLDEN = Path(__file__).parent / "golden"

# one line per acceptance criterion, printed in the terminal summary
CRITERIA: dict[int, str] = {}


def load_golden(name: str) -> dict:
    return json.loads((GOLDEN / name).read_text())


@pytest.fixture(scope="session")
def golden_pressure():
    return load_golden("pressure.json")


@pytest.fixture(scope="session")
def golden_constructions():
    return load_golden("constructions.json")


@pytest.fixture(scope="session")
def golden_misc():
    return load_golden("misc.json")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[k])
