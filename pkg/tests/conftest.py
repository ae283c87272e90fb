import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line and return whether it passed."""

    def record(label, ok, measured, expected, tol):
        tag = "PASS" if ok else "FAIL"
        ACCEPTANCE_LINES.append(f"{tag}  {label}: measured={measured!r} expected={expected!r} tol={tol:g}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
