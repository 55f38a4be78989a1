import sys


def pytest_terminal_summary(terminalreporter):
    """Print the one-line verdict of every acceptance criterion that ran."""
    lines = []
    for name, mod in list(sys.modules.items()):
        if name.endswith("test_acceptance"):
            lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
