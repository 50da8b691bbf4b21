import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rs():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.TITLES):
        status, detail = mod.RESULTS.get(n, ("NOT RUN", ""))
        line = f"criterion {n:2d} {status:<7} {mod.TITLES[n]}"
        terminalreporter.write_line(f"{line}: {detail}" if detail else line)
