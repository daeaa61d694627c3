"""Acceptance criteria 1-9, each run at its stated tolerance.

Every test prints a single ``[PASS]``/``[FAIL]`` line with the measured
numbers.  Criterion 9 (the scale smoke test) takes several minutes.
"""
import pytest

from dnfwmi.verify import CRITERIA, run_criterion


@pytest.mark.parametrize("number", sorted(CRITERIA), ids=lambda n: f"criterion{n}")
def test_criterion(number, capsys):
    result = run_criterion(number, seed=0)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
