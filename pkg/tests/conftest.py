import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

#: Ordered p-values of the worked toy example (10 variables).
TOY_P = [0.02, 0.11, 0.12, 0.21, 0.36, 0.49, 0.69, 0.77, 0.87, 0.99]


@pytest.fixture
def toy_p():
    return list(TOY_P)


#: (criterion, verdict line) pairs filled in by test_acceptance.py.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
