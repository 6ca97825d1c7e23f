import numpy as np
import pytest

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in sorted(lines):
        terminalreporter.write_line(line[1])


@pytest.fixture
def criterion(request, capsys):
    """Record one acceptance line; the assertion stays with the caller."""

    def record(number, title, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title}"
        if detail:
            line += f" ({detail})"
        request.config.stash[_ACCEPTANCE].append((number, line))
        with capsys.disabled():
            print("\n" + line)
        return passed

    return record


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
