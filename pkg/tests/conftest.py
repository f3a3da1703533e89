"""Shared test plumbing: collect acceptance CRITERION lines and echo them in
the terminal summary, where they survive output capture."""

CRITERION_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
