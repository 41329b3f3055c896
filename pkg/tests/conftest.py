import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import util  # noqa: E402


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if util.ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in util.ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
