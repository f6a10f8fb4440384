import pytest

from qwitness import checks


def test_all_suites_pass_at_small_counts():
    report = checks.run_suites(count=40, seed=11)
    assert report["all_pass"]
    assert set(report["suites"]) == set(checks.SUITE_NAMES)
    for result in report["suites"].values():
        assert result["pass"]
        assert result["count"] == 40
        assert result["worst_margin"] >= 0.0


def test_default_counts_apply_when_unset():
    report = checks.run_suites(suites=("entropy",), seed=3)
    assert report["suites"]["entropy"]["count"] == checks.DEFAULT_COUNTS["entropy"]


def test_reports_are_reproducible():
    a = checks.run_suites(count=25, seed=5)
    b = checks.run_suites(count=25, seed=5)
    assert a == b


def test_injected_trace_distance_bug_is_caught():
    """Self-test of the self-test: doubling the time-t distance must break
    the contractivity suite."""
    report = checks.run_suites(
        suites=("contractivity",), count=30, seed=2, distance_scale=2.0
    )
    assert not report["all_pass"]
    assert not report["suites"]["contractivity"]["pass"]
    assert report["suites"]["contractivity"]["worst_margin"] < 0.0


def test_unknown_suite_is_rejected():
    with pytest.raises(ValueError, match="unknown suite"):
        checks.run_suites(suites=("bogus",))


def test_bound_suite_margin_is_tight_but_positive():
    result = checks.bound_suite(count=150, seed=9)
    assert result.passed
    assert 0.0 <= result.worst_margin < 1.0


def test_contractivity_suite_includes_kraus_channels():
    result = checks.contractivity_suite(count=60, seed=13)
    assert result.passed
    assert result.count == 60
