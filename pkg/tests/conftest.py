"""Shared pytest hooks: echo the acceptance scoreboard after the run."""

import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None:
        return
    lines = getattr(mod, "SCOREBOARD", [])
    if lines:
        terminalreporter.write_sep("=", "acceptance scoreboard")
        for line in lines:
            terminalreporter.write_line(line)
