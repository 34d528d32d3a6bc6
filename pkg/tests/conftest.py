"""Shared pytest plumbing.

The acceptance tests record one PASS/FAIL line per criterion here; the
terminal-summary hook prints them after the run, outside output capture.
"""

acceptance_lines: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(acceptance_lines):
            terminalreporter.write_line(line)
