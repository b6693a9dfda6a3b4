import pytest

RESULTS = []


@pytest.fixture
def record():
    """Append ``(name, ok, detail)`` for the end-of-run acceptance summary."""
    def add(name, ok, detail=""):
        RESULTS.append((name, bool(ok), detail))
        return ok
    return add


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance")
    for name, ok, detail in RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
