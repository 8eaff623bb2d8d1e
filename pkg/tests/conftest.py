"""Shared pytest hooks.

The acceptance suite records one verdict line per numbered criterion;
replaying them in the terminal summary keeps the whole scorecard visible
even when individual test output is captured.
"""


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
