"""Verification suites run by ``sl2bosonic verify``.

Every case produces a :class:`CaseResult` naming the identity, its
parameters and, on failure, the first offending exponent triple.  Suites are
deterministic: randomized cases come from a seeded generator.
"""
from __future__ import annotations

import itertools
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import bosonic
from .factored import fr_to_series
from .operators import (
    INITIAL,
    Undefined,
    parse_word,
    pentagon_check,
    simple,
    split_check,
    v_term,
    word_on_vinf,
)
from .series import (
    Monomial,
    TruncatedSeries,
    TruncationPolicy,
    expand_product,
    format_monomial,
    mono,
)
from .transfer import CharacterVector


@dataclass(frozen=True)
class CaseResult:
    suite: str
    identity: str
    params: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        status = "ok" if self.ok else "FAIL"
        tail = f"  {self.detail}" if self.detail and not self.ok else ""
        return f"[{status}] {self.suite}: {self.identity} {self.params}{tail}"


@dataclass
class SuiteReport:
    cases: List[CaseResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.cases)

    def failures(self) -> List[CaseResult]:
        return [c for c in self.cases if not c.ok]

    def summary(self) -> str:
        bad = len(self.failures())
        return f"{len(self.cases) - bad}/{len(self.cases)} cases passed"


def first_series_difference(f: TruncatedSeries, g: TruncatedSeries) -> str:
    keys = sorted(set(f.terms) | set(g.terms))
    for key in keys:
        a, b = f.terms.get(key, 0), g.terms.get(key, 0)
        if a != b:
            return f"first difference at {key}: {a} vs {b}"
    return ""


def first_vector_difference(a: CharacterVector, b: CharacterVector) -> str:
    hit = a.first_difference(b)
    if hit is None:
        return ""
    st, key, x, y = hit
    return f"component ({st.i},{st.l}) at {key}: {x} vs {y}"


# ---------------------------------------------------------------------------
# random monomials
# ---------------------------------------------------------------------------

def random_small(rng: random.Random, qmin: int = 1, qtop: int = 3) -> Monomial:
    """A Small monomial with a positive q-power, so no window is needed."""
    return mono(rng.randint(qmin, qtop), rng.randint(-2, 2), rng.randint(0, 2))


# ---------------------------------------------------------------------------
# vertex lemmas
# ---------------------------------------------------------------------------

def _term(pref: Monomial, dens: Sequence[Monomial], policy: TruncationPolicy) -> TruncatedSeries:
    return expand_product(1, pref, [(d, -1) for d in dens], [], policy)


def _finite_sum(points, policy: TruncationPolicy) -> TruncatedSeries:
    acc: Dict[Tuple[int, int, int], int] = {}
    for m in points:
        acc[m.triple] = acc.get(m.triple, 0) + 1
    return TruncatedSeries(acc, policy)


def triangle_check(a: int, b: int, x: Monomial, y: Monomial, policy: TruncationPolicy) -> CaseResult:
    """sum_{a<=n<=m<=b} x^m y^n against its three vertex cones."""
    if a > b:
        raise ValueError("need a <= b")
    xy = x * y
    lhs = _finite_sum((x ** m * y ** n for n in range(a, b + 1) for m in range(n, b + 1)), policy)
    rhs = (_term(xy ** a, [x, xy], policy)
           + _term(x ** b * y ** a, [x.inverse(), y], policy)
           + _term(xy ** b, [y.inverse(), xy.inverse()], policy))
    params = f"a={a} b={b} x={format_monomial(x)} y={format_monomial(y)}"
    return CaseResult("lemmas", "triangle", params, lhs == rhs, first_series_difference(lhs, rhs))


def rectangle_check(a: int, b: int, c: int, d: int, x: Monomial, y: Monomial,
                    policy: TruncationPolicy) -> CaseResult:
    """sum over a<=m<=b, c<=n<=d of x^m y^n against its four vertex cones."""
    if a > b + 1 or c > d + 1:
        raise ValueError("need a <= b+1 and c <= d+1")
    lhs = _finite_sum((x ** m * y ** n for m in range(a, b + 1) for n in range(c, d + 1)), policy)
    xi, yi = x.inverse(), y.inverse()
    rhs = (_term(x ** a * y ** c, [x, y], policy)
           + _term(x ** a * y ** d, [x, yi], policy)
           + _term(x ** b * y ** c, [xi, y], policy)
           + _term(x ** b * y ** d, [xi, yi], policy))
    params = f"a={a} b={b} c={c} d={d} x={format_monomial(x)} y={format_monomial(y)}"
    return CaseResult("lemmas", "rectangle", params, lhs == rhs, first_series_difference(lhs, rhs))


def lemma_cases(qmax: int = 6, samples: int = 50, seed: int = 0, lo: int = -3, hi: int = 3):
    """Every corner choice in [lo, hi] with every sampled (x, y)."""
    rng = random.Random(seed)
    pairs = [(random_small(rng), random_small(rng)) for _ in range(samples)]
    policy = TruncationPolicy(qmax)
    rng_corners = range(lo, hi + 1)
    for x, y in pairs:
        for a, b in itertools.product(rng_corners, repeat=2):
            if a <= b:
                yield lambda a=a, b=b, x=x, y=y: triangle_check(a, b, x, y, policy)
        for a, b, c, d in itertools.product(rng_corners, repeat=4):
            if a <= b + 1 and c <= d + 1:
                yield lambda a=a, b=b, c=c, d=d, x=x, y=y: rectangle_check(a, b, c, d, x, y, policy)


# ---------------------------------------------------------------------------
# the other suites
# ---------------------------------------------------------------------------

JACKSON_FIXED = [
    (mono(2, 1, 2), mono(0, 0, 0)),
    (mono(1, 0, 0), mono(2, 0, 0)),
    (mono(1, 0, 1), mono(1, 0, 0)),
]


def jackson_case(x: Monomial, y: Monomial, policy: TruncationPolicy) -> CaseResult:
    lhs, terms = bosonic.jackson_terms(x, y, policy)
    left = fr_to_series(lhs, policy)
    right = TruncatedSeries.zero(policy)
    for t in terms:
        right = right + fr_to_series(t, policy)
    params = f"x={format_monomial(x)} y={format_monomial(y)} qmax={policy.qmax}"
    return CaseResult("jackson", "Jackson specialization", params, left == right,
                      first_series_difference(left, right))


def jackson_cases(qmax: int = 12, samples: int = 20, seed: int = 1):
    policy = TruncationPolicy(qmax)
    rng = random.Random(seed)
    pairs = list(JACKSON_FIXED) + [(random_small(rng, 0), random_small(rng, 0)) for _ in range(samples)]
    for x, y in pairs:
        yield lambda x=x, y=y: jackson_case(x, y, policy)


def _vector_case(suite: str, name: str, params: str, thunk) -> CaseResult:
    try:
        a, b = thunk()
    except Undefined as exc:
        return CaseResult(suite, name, params, False, f"undefined: {exc}")
    return CaseResult(suite, name, params, a == b, first_vector_difference(a, b))


def stable_cases(qmax: int = 10, ks: Sequence[int] = (1, 2), nmax: int = 4):
    """(A+B) v_inf = v_inf, B v_inf = f1 v1 and A^n f1 v1 = f_(n+1) v_(n+1)."""
    from .operators import apply_word, to_character
    policy = TruncationPolicy(qmax)
    for k in ks:
        yield lambda k=k: _vector_case(
            "stable", "(A+B) v_inf = v_inf", f"k={k} qmax={qmax}",
            lambda: (word_on_vinf(parse_word("(A+B)"), k, policy), word_on_vinf(parse_word(""), k, policy)))
        yield lambda k=k: _vector_case(
            "stable", "B v_inf = f1 v1", f"k={k} qmax={qmax}",
            lambda: (word_on_vinf(parse_word("B"), k, policy), to_character(v_term(1), k, policy)))
        for n in range(1, nmax + 1):
            yield lambda k=k, n=n: _vector_case(
                "stable", "A^n f1 v1 = f(n+1) v(n+1)", f"n={n} k={k} qmax={qmax}",
                lambda: (to_character(apply_word(parse_word("A " * n), v_term(1)), k, policy),
                         to_character(v_term(n + 1), k, policy)))


def pentagon_cases(qmax: int = 8, ks: Sequence[int] = (1, 2, 3)):
    """Sum of the five letters equals M.S; B = B1 + B2 and D = D1 + D2."""
    policy = TruncationPolicy(qmax)
    vectors = {
        "[1,0,z2]": simple(INITIAL),
        "v1": v_term(1),
        "v2": v_term(2),
        "[1,q z2,z2]": simple((mono(), mono(1, 0, 1), mono(0, 0, 1))),
    }
    for k in ks:
        for name, v in vectors.items():
            def pent(k=k, name=name, v=v):
                try:
                    ok = pentagon_check(v, k, policy)
                except Undefined as exc:
                    return CaseResult("pentagon", "A+B+C+D+E = M S", f"{name} k={k}", False, str(exc))
                return CaseResult("pentagon", "A+B+C+D+E = M S", f"{name} k={k}", ok)

            def split(k=k, name=name, v=v):
                try:
                    ok = split_check(v, k, policy)
                except Undefined as exc:
                    return CaseResult("pentagon", "B = B1+B2, D = D1+D2", f"{name} k={k}", False, str(exc))
                return CaseResult("pentagon", "B = B1+B2, D = D1+D2", f"{name} k={k}", ok)
            yield pent
            yield split


def cancellation_cases(qmax: int = 8, k: int = 1):
    policy = TruncationPolicy(qmax)
    for pid, (first, second) in enumerate(bosonic.CANCELLATION_PAIRS):
        for n, m, s in itertools.product((0, 1), repeat=3):
            def case(pid=pid, n=n, m=m, s=s, first=first, second=second):
                r = bosonic.cancellation_check(pid, n, m, s, k, policy)
                return CaseResult("cancellations", f"({first}) + ({second})",
                                  f"n={n} m={m} s={s} k={k}", r.ok, r.detail)
            yield case
    yield lambda: _from_check("cancellations", "C E v_inf + C E^2 v_inf", f"k={k}",
                              bosonic.ce_check(k, policy))


def _from_check(suite: str, name: str, params: str, r) -> CaseResult:
    return CaseResult(suite, name, params, bool(r), r.detail)


def operator_identity_cases(qmax: int = 8, k: int = 1, nmax: int = 2, mmax: int = 2):
    policy = TruncationPolicy(qmax)
    yield lambda: _from_check("operator-identities", "BE = 0", "symbolic [P,Q,R]",
                              bosonic.be_zero_check())
    for m in (0, 1):
        for idx, (name, w) in enumerate(bosonic.identity_words(m)):
            yield lambda name=name, w=w, m=m: _from_check(
                "operator-identities", name.replace(f"^{m}", "^m") + " = 0", f"m={m} k={k}",
                bosonic.vanishing_word_check(w, k, policy))
    for n in range(nmax + 1):
        for m in range(mmax + 1):
            yield lambda n=n, m=m: _from_check(
                "operator-identities", "A^n B (A+B)^m [1,0,z2] closed form", f"n={n} m={m} k={k}",
                bosonic.explicit_anb_check(n, m, k, policy, printed=True))


SUITES: Dict[str, Callable] = {
    "lemmas": lemma_cases,
    "jackson": jackson_cases,
    "stable": stable_cases,
    "pentagon": pentagon_cases,
    "cancellations": cancellation_cases,
    "operator-identities": operator_identity_cases,
}


def run_suite(name: str, qmax: Optional[int] = None, threads: int = 1) -> SuiteReport:
    """Run one suite, or all of them for ``name == 'all'``.

    Cases run on a thread pool when ``threads > 1``; results keep case order.
    """
    names = list(SUITES) if name == "all" else [name]
    for n in names:
        if n not in SUITES:
            raise ValueError(f"unknown suite {n!r}")
    report = SuiteReport()
    for n in names:
        kwargs = {} if qmax is None else {"qmax": qmax}
        cases = list(SUITES[n](**kwargs))
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                report.cases.extend(pool.map(lambda c: c(), cases))
        else:
            report.cases.extend(c() for c in cases)
    return report
