import numpy as np
import pytest

_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, {})

    def report(number, title, checks):
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{'ok' if passed else 'FAILED'}: {text}" for text, passed in checks)
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title} | {detail}"
        lines[number] = line
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
