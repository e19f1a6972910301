from bsmkit import suites
from bsmkit.analysis import MAX_GRAMMIAN_NK


def test_all_suites_pass():
    checks = suites.run("all")
    assert {c.suite for c in checks} == set(suites.SUITES)
    assert [c for c in checks if not c.passed] == []


def test_single_size_selection():
    checks = suites.run("discrepancy", n=3, k=2)
    assert [c.name for c in checks] == ["exhaustive n=3 k=2"]


def test_limits_turn_into_failed_checks():
    checks = suites.run("grammian", n=4, k=4, max_nk=MAX_GRAMMIAN_NK + 4)
    assert len(checks) == 1 and not checks[0].passed


def test_unknown_options_are_ignored():
    assert all(c.passed for c in suites.run("band", samples=10, n=8, k=3, bogus=1))
