"""Acceptance criteria 1-10.

Each test prints one PASS/FAIL line; the lines are repeated in the
terminal summary.  Run ``python tests/test_acceptance.py`` for the lines
alone.
"""

import pytest

from racahlab.suite import DEFAULT_SEED, criterion_10, run_criterion

RESULTS = {}


def _result(i):
    if i not in RESULTS:
        if i == 10:
            prior = [_result(j) for j in range(1, 10)]
            RESULTS[i] = criterion_10(DEFAULT_SEED, prior=prior)
        else:
            RESULTS[i] = run_criterion(i, DEFAULT_SEED)
    return RESULTS[i]


@pytest.mark.acceptance
@pytest.mark.parametrize("i", range(1, 11))
def test_criterion(i):
    res = _result(i)
    print(res.line())
    assert res.passed, res.line()


if __name__ == "__main__":
    for i in range(1, 11):
        print(_result(i).line())
