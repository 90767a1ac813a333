"""Acceptance criteria at full size; one PASS/FAIL line per criterion."""

import pytest

from floquet_qa import acceptance

RESULTS = []


@pytest.fixture(scope="module")
def counterexample_rows():
    return acceptance._counterexample_rows()


@pytest.mark.parametrize("fn", acceptance.CRITERIA, ids=lambda f: f.__name__)
def test_criterion(fn, counterexample_rows):
    if fn in (acceptance.criterion_5, acceptance.criterion_6):
        result = fn(rows=counterexample_rows)
    else:
        result = fn()
    RESULTS.append(result)
    print("\n" + result.line())
    assert result.passed, result.line()
