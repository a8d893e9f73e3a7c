import numpy as np
import pytest

_ACCEPTANCE = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance():
    """Recorder ``acceptance(n, passed, detail)``: prints one line per
    criterion, keeps it for the terminal summary, then asserts."""

    def record(n, passed, detail):
        line = f"acceptance {n}: {'PASS' if passed else 'FAIL'}  {detail}"
        _ACCEPTANCE[n] = line
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE, key=str):
            terminalreporter.write_line(_ACCEPTANCE[n])
