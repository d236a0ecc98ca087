import sys
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent / "oracles"))

_ACCEPTANCE: dict[int, tuple[str, str, float, str]] = {}


class AcceptanceRecorder:
    """Times one acceptance criterion and records PASS/FAIL for the summary."""

    @contextmanager
    def criterion(self, number: int, title: str, budget_s: float | None = None):
        start = time.perf_counter()
        try:
            yield
            elapsed = time.perf_counter() - start
            if budget_s is not None:
                assert elapsed < budget_s, f"runtime {elapsed:.2f}s exceeds budget {budget_s}s"
        except BaseException as exc:
            elapsed = time.perf_counter() - start
            first = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
            _ACCEPTANCE[number] = (title, "FAIL", elapsed, first[:160])
            raise
        _ACCEPTANCE[number] = (title, "PASS", elapsed, "")


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, status, elapsed, note = _ACCEPTANCE[number]
        line = f"[{status}] {number:>2}. {title} ({elapsed:.2f}s)"
        if note:
            line += f" -- {note}"
        terminalreporter.write_line(line)
