"""The twelve exit criteria at their stated sizes and tolerances.

Each test prints one ``[PASS]``/``[FAIL]`` line; the lines are repeated in
the terminal summary. ``kpzlab verify --suite full`` runs the same code.
"""

import pytest

from kpzlab import acceptance as A

pytestmark = [pytest.mark.acceptance, pytest.mark.slow]


@pytest.mark.parametrize("number", range(1, 13))
def test_criterion(number, report_criterion):
    res = report_criterion(getattr(A, f"criterion_{number}")())
    assert res.passed, res.line()
