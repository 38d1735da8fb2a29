import os
import sys

import pytest

from kpzlab import _backend

BACKENDS = ["python"] + (["compiled"] if _backend.BACKEND == "compiled" else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run a test once per available kernel backend."""
    mod = _backend.load(request.param)
    import kpzlab.passage
    import kpzlab.environment
    import kpzlab.pasep
    for m in (kpzlab.passage, kpzlab.environment, kpzlab.pasep):
        monkeypatch.setattr(m, "kernels", mod)
    return request.param


CRITERIA_LINES = []


@pytest.fixture
def report_criterion():
    """Print a criterion line now and repeat it in the terminal summary."""
    def _report(res):
        line = res.line()
        print(line)
        CRITERIA_LINES.append(line)
        return res
    return _report


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
