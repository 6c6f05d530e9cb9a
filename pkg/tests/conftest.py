import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# filled by test_acceptance; printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":").lstrip("C"))):
        terminalreporter.write_line(line)
