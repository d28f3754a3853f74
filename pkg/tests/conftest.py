import pytest

# one line per acceptance criterion, printed after the run so the verdicts
# are visible even when everything passes
ACCEPTANCE_LINES: list[str] = []


def record_acceptance(index: int, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"ACCEPTANCE {index}: {status}  {detail}".rstrip())


@pytest.hookimpl
def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
