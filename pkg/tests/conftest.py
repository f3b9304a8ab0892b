import sys
from pathlib import Path

import pytest

# make the reference oracle and report sink importable from any test module
sys.path.insert(0, str(Path(__file__).parent))

from homeolife import engine  # noqa: E402


@pytest.fixture(scope="session", autouse=True)
def warm_engine():
    """Compile the simulation kernel once so timed tests measure steady state."""
    engine.warm_up()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    import acceptance_report

    if not acceptance_report.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(acceptance_report.RESULTS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[criterion {number:02d}] {status}: {detail}")
