import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

#: Acceptance verdicts, filled by test_acceptance and printed at the end of the run.
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])
