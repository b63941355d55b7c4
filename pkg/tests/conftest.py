"""Shared pytest plumbing: collects acceptance verdict lines so they are
printed once, unconditionally, at the end of the terminal summary."""

acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
