"""One test per acceptance criterion; each prints its pass/fail line."""

import pytest

from conftest import ACCEPTANCE_LINES
from indetdyn.acceptance import CRITERIA, run_one


@pytest.mark.parametrize("number", [n for n, _, _ in CRITERIA],
                         ids=[f"c{n:02d}_{t.lower().replace(' ', '_')}" for n, t, _ in CRITERIA])
def test_criterion(number):
    res = run_one(number)
    ACCEPTANCE_LINES[number] = res.line()
    print(res.line())
    assert res.passed, res.detail
