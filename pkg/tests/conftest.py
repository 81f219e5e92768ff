import sys
from pathlib import Path

import pytest

from cti2graph.lexicon import default_lexicon

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"
sys.path.insert(0, str(HERE))


@pytest.fixture(scope="session")
def lx():
    return default_lexicon()


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


# one line per acceptance criterion, printed after the run
CRITERIA: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[n])
