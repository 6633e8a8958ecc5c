import pytest

from leekh.suites import SUITES, run_suite


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes(name):
    checks = run_suite(name, seed=11, samples=2)
    assert checks
    failed = [c for c in checks if not c.passed]
    assert not failed, failed[:3]


def test_suites_are_reproducible():
    a = [(c.prop, c.detail) for c in run_suite("mirror", 5, 3)]
    b = [(c.prop, c.detail) for c in run_suite("mirror", 5, 3)]
    assert a == b
