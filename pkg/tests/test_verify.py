import random

import pytest

from sl2bosonic.series import TruncationPolicy, mono
from sl2bosonic.verify import (
    SUITES,
    CaseResult,
    SuiteReport,
    random_small,
    rectangle_check,
    run_suite,
    triangle_check,
)

from . import sympy_oracle as so


def test_report_lines():
    r = SuiteReport([CaseResult("s", "id", "n=1", True), CaseResult("s", "id", "n=2", False, "x")])
    assert not r.ok
    assert r.summary() == "1/2 cases passed"
    assert r.failures()[0].line() == "[FAIL] s: id n=2  x"


@pytest.mark.parametrize("a, b", [(-3, 3), (0, 0), (-1, 2), (2, 1)])
def test_triangle_and_rectangle(a, b):
    P = TruncationPolicy(6)
    x, y = mono(1, 1, 0), mono(1, 0, 1)
    if a <= b:
        assert triangle_check(a, b, x, y, P).ok
    for c, d in [(-2, 2), (0, 1)]:
        if a <= b + 1 and c <= d + 1:
            assert rectangle_check(a, b, c, d, x, y, P).ok


@pytest.mark.parametrize("a, b", [(-3, 3), (-1, 2), (0, 0), (2, 3)])
def test_cone_identities_as_rational_functions(a, b):
    # oracle: the vertex-cone decompositions hold as exact rational identities
    x, y = so.sp.symbols("x y")
    tri = sum(x ** m * y ** n for n in range(a, b + 1) for m in range(n, b + 1))
    cones = ((x * y) ** a / ((1 - x) * (1 - x * y))
             + x ** b * y ** a / ((1 - 1 / x) * (1 - y))
             + (x * y) ** b / ((1 - 1 / y) * (1 - 1 / (x * y))))
    assert so.is_zero(tri - cones)
    c, d = a - 1, b
    rect = sum(x ** m * y ** n for m in range(a, b + 1) for n in range(c, d + 1))
    cones = (x ** a * y ** c / ((1 - x) * (1 - y)) + x ** a * y ** d / ((1 - x) * (1 - 1 / y))
             + x ** b * y ** c / ((1 - 1 / x) * (1 - y))
             + x ** b * y ** d / ((1 - 1 / x) * (1 - 1 / y)))
    assert so.is_zero(rect - cones)


def test_random_small_is_small():
    rng = random.Random(0)
    for _ in range(50):
        m = random_small(rng)
        assert m.q >= 1 and m.z2 >= 0


@pytest.mark.parametrize("name, qmax", [("jackson", 8), ("stable", 6), ("pentagon", 6),
                                        ("cancellations", 6)])
def test_suites_pass(name, qmax):
    report = run_suite(name, qmax=qmax)
    assert report.ok, [c.line() for c in report.failures()]


def test_threads_keep_order():
    one = run_suite("stable", qmax=5, threads=1)
    many = run_suite("stable", qmax=5, threads=4)
    assert [c.line() for c in one.cases] == [c.line() for c in many.cases]


def test_operator_identity_suite_reports_known_failures():
    report = run_suite("operator-identities", qmax=6)
    failing = {c.identity for c in report.failures()}
    assert "A Lbar^m B = 0" in failing and "C Lbar^m B = 0" in failing
    assert all(c.ok for c in report.cases if "m=1" in c.params and "Lbar" in c.identity)


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope")
    assert set(SUITES) >= {"lemmas", "jackson", "stable", "pentagon", "cancellations",
                           "operator-identities"}
