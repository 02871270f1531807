"""Collects the acceptance-gate verdict lines and prints them as a
section of the terminal summary, where output capture cannot eat them.
"""

_criterion_lines = []


def record_criterion(name: str, ok: bool, detail: str) -> None:
    _criterion_lines.append(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")


def pytest_terminal_summary(terminalreporter):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criterion_lines:
            terminalreporter.line(line)
