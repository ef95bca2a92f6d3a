import pytest

ACCEPTANCE: dict = {}


@pytest.fixture
def record():
    """``record(key, ok, detail)`` stores one acceptance verdict for the summary."""

    def _record(key, ok, detail=""):
        ACCEPTANCE[key] = (bool(ok), detail)
        return bool(ok)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.rstrip("ab")), k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
