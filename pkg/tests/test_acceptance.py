"""Every acceptance criterion at its stated tolerance.

One PASS/FAIL line per criterion (plus its sub-checks) is printed in the
"acceptance criteria" section of the pytest summary.
"""

import pytest

from chiralcavity import acceptance

from .conftest import ACCEPTANCE_LINES

NUMBERS = sorted(acceptance.CRITERIA)


@pytest.fixture(scope="module")
def results():
    # criteria are independent, so run them across worker processes once
    out = {r.number: r for r in acceptance.run_all(NUMBERS, jobs=None)}
    for n in NUMBERS:
        report = out[n].report()
        ACCEPTANCE_LINES.extend(report.splitlines())
        print(report)
    return out


@pytest.mark.slow
@pytest.mark.parametrize("number", NUMBERS)
def test_criterion(results, number):
    res = results[number]
    assert res.error is None, res.error
    assert res.passed, "\n" + res.report()
