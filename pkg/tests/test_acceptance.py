"""Acceptance criteria at their stated tolerances, one PASS/FAIL line each."""

import functools

import pytest

from jetlegendre import verify

CRITERIA = {
    "1": verify.check_el,
    "2": verify.check_schmidt_even,
    "3": verify.check_ostrogradsky,
    "4": verify.check_canonical_map,
    "5a": verify.check_numeric,
    "5b": verify.check_numeric,
    "5c": verify.check_numeric,
    "5d": verify.check_numeric,
    "5e": verify.check_numeric,
    "6": verify.check_integrability_obstruction,
    "7": verify.check_chains,
    "8": verify.check_example1,
    "9": verify.check_properties,
}


@functools.lru_cache(maxsize=None)
def results_of(check):
    return tuple(check())


@pytest.mark.parametrize("criterion", list(CRITERIA))
def test_criterion(criterion, capsys):
    results = [r for r in results_of(CRITERIA[criterion]) if r.id == criterion]
    assert results, f"no result recorded for {criterion}"
    with capsys.disabled():
        for r in results:
            print("\n" + r.line(), end="")
    failed = [r.line() for r in results if not r.passed]
    assert not failed, "\n".join(failed)
