"""Pytest hooks: replay the acceptance scoreboard in the terminal summary."""

import support


def pytest_terminal_summary(terminalreporter):
    if not support.CRITERION_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in support.CRITERION_RESULTS:
        terminalreporter.write_line(line)
