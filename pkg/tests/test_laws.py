import numpy as np
import pytest

from tangentgeom.dsl import identity, parse_map
from tangentgeom.laws import INCONCLUSIVE, LawReport, Sampler, check_equation, residual


def test_residual_is_relative():
    assert residual(np.array([1000.0]), np.array([1001.0])) == pytest.approx(1 / 1001)
    assert residual(np.array([0.1]), np.array([0.2])) == pytest.approx(0.1)
    assert residual(np.array([1.0]), np.array([np.nan])) == float("inf")


def test_sampler_is_reproducible_and_bounded():
    a = Sampler.for_check(3, "x").point(50)
    b = Sampler.for_check(3, "x").point(50)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, Sampler.for_check(3, "y").point(50))
    assert np.all(np.abs(a) <= 2)
    q = Sampler(1).exact_point(20)
    assert all(abs(v) <= 2 and v.denominator <= 64 for v in q)


def test_domain_violations_resample():
    f = parse_map("log(x0)", 1, 1)
    r = check_equation("log", f, f, 1, sampler=Sampler(0), samples=20, tol=1e-12)
    assert r.passed and r.samples == 20


def test_exhausted_retries_are_inconclusive():
    f = parse_map("log(x0-5)", 1, 1)
    r = check_equation("never", f, f, 1, sampler=Sampler(0), samples=5, tol=1e-12)
    assert r.status == INCONCLUSIVE
    assert "inconclusive sample" in r.details["reason"]


def test_suite_status_and_witness():
    ok = LawReport("a", "pass", 0.0, 3, 1e-9)
    bad = LawReport("b", "fail", 0.5, 3, 1e-9, {"input": [1.0], "lhs": [1.0], "rhs": [1.5]})
    skip = LawReport.skipped("c", "n/a")
    s = LawReport.suite("s", [ok, bad, skip])
    assert s.status == "fail" and s.witness["law"] == "b" and s.max_residual == 0.5
    assert LawReport.suite("s", [ok, skip]).status == "pass"
    assert LawReport.suite("s", [skip]).status == "skipped"
    again = LawReport.from_dict(s.to_dict())
    assert again.child("b").witness["rhs"] == [1.5]


def test_pass_implies_residual_within_tolerance():
    r = check_equation("id", identity(3), identity(3), 3, sampler=Sampler(0), samples=5, tol=0.0)
    assert r.passed and r.max_residual <= r.tolerance
