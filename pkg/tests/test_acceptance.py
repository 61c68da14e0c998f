"""Acceptance suite: twelve criteria, one PASS/FAIL line each.

Run under pytest (the lines appear in the terminal summary) or directly with
``python3 -m tests.test_acceptance``.
"""
import itertools
import random

import pytest

from sl2bosonic import bosonic
from sl2bosonic.operators import (
    INITIAL,
    Undefined,
    apply_word,
    initial_closed_form,
    initial_sum_form,
    resolve_groups,
    simple,
    symbolic_vector,
    to_character,
    v_term,
    word_on_vinf,
)
from sl2bosonic.paths import oracle_vector
from sl2bosonic.series import (
    MonomialClass,
    Monomial,
    TruncatedSeries,
    TruncationPolicy,
    classify_monomial,
    inv_one_minus,
    mono,
    shift_z2,
)
from sl2bosonic.transfer import (
    build_matrix,
    fixed_point_character,
    limit_character,
    recursion_character,
    states,
)
from sl2bosonic.verify import run_suite

# criterion number -> "PASS ..." / "FAIL ..." line, filled as tests run
RESULTS = {}


def _record(num, title, ok, detail=""):
    line = f"criterion {num:2d} [{'PASS' if ok else 'FAIL'}] {title}"
    if detail:
        line += f": {detail}"
    RESULTS[num] = line
    print(line)
    return ok


# 1 ---------------------------------------------------------------------------

def criterion_1():
    P = TruncationPolicy(8)
    bad = []
    for k in (1, 2, 3):
        rec = limit_character(k, P)
        orc = oracle_vector(k, P)
        try:
            bos = bosonic.theorem_main_character(k, P, route="closed", check_negative_z1=True)
        except AssertionError as exc:
            bad.append(f"k={k}: {exc}")
            continue
        for s in states(k):
            if not rec[s] == orc[s] == bos[s]:
                bad.append(f"k={k} (i,l)=({s.i},{s.l})")
    return not bad, "; ".join(bad) or "k=1..3 at qmax 8, all components equal"


# 2 ---------------------------------------------------------------------------

def criterion_2():
    one, zero = mono(), 0
    printed = [[one, mono(1, 1, 1), one],
               [zero, one, one],
               [mono(0, 0, 1), zero, zero]]
    printed_m0 = [[one, zero, one], [zero, one, one], [zero, zero, zero]]
    M = build_matrix(1)
    order = [(s.i, s.l) for s in states(1)]
    ok = (order == [(0, 0), (0, 1), (1, 1)] and M.rows() == printed
          and M.at_z2_zero().rows() == printed_m0)
    return ok, "k=1 matrix and its z2=0 reduction"


# 3 ---------------------------------------------------------------------------

def criterion_3():
    P = TruncationPolicy(8)
    bad = []
    for k in range(1, 5):
        for N in (1, 2):
            if initial_closed_form(N, k, P) != recursion_character(k, N, P):
                bad.append(f"chi^({N}) k={k}")
        if initial_sum_form(k, P) != recursion_character(k, 2, P):
            bad.append(f"chi^(2) sum form k={k}")
    return not bad, "; ".join(bad) or "chi^(1), chi^(2) for k=1..4"


# 4 ---------------------------------------------------------------------------

def criterion_4():
    P = TruncationPolicy(8)
    bad, count = [], 0
    for k in (1, 2):
        for fid, fam in bosonic.families().items():
            for total in range(4):
                for n, m, s in bosonic.shell(total):
                    if not fam.in_domain(n, m, s):
                        continue
                    count += 1
                    try:
                        ok = (bosonic.family_term_closed(fid, n, m, s, k, P)
                              == bosonic.family_term_operator(fid, n, m, s, k, P))
                    except Undefined as exc:
                        ok = False
                        bad.append(f"family {fid} ({n},{m},{s}) k={k} undefined at {exc.position}")
                        continue
                    if not ok:
                        bad.append(f"family {fid} ({n},{m},{s}) k={k}")
    return not bad, "; ".join(bad[:5]) or f"{count} family terms"


# 5, 6, 7, 10: suites ---------------------------------------------------------

def _suite(name, qmax):
    report = run_suite(name, qmax=qmax)
    fails = [c.line() for c in report.failures()]
    return report.ok, "; ".join(fails[:5]) or report.summary()


def criterion_5():
    return _suite("jackson", 12)


def criterion_6():
    return _suite("stable", 10)


def criterion_7():
    return _suite("cancellations", 8)


def criterion_10():
    return _suite("lemmas", 6)


# 8 ---------------------------------------------------------------------------

def criterion_8():
    """Every sub-claim, as stated, including the printed explicit formula."""
    P = TruncationPolicy(8)
    bad = []
    if not bosonic.operator_identity_check("BE", {}, 1, P):
        bad.append("BE")
    for m in (0, 1):
        for idx, (name, _) in enumerate(bosonic.identity_words(m)):
            if not bosonic.operator_identity_check("vanishing", {"m": m, "index": idx}, 1, P):
                bad.append(f"{name} m={m}")
    for n, m in itertools.product(range(3), repeat=2):
        if not bosonic.explicit_anb_check(n, m, 1, P, printed=True):
            bad.append(f"explicit A^n B (A+B)^m n={n} m={m}")
    return not bad, f"{len(bad)} failing: " + "; ".join(bad) if bad else "all identities"


# 9 ---------------------------------------------------------------------------

def criterion_9():
    bad = []
    R5 = Monomial.symbol("R", 5)
    try:
        (t,) = apply_word("CBCAE", simple(symbolic_vector())).terms
        if t.vector != (mono(3, 1, 2) * R5, mono(2, 0, 1) * R5, mono(3, 1, 2) * R5):
            bad.append("CBCAE vector part")
    except Undefined:
        bad.append("CBCAE undefined")
    for w in ("BCBCAE", "ECBCAE"):
        try:
            apply_word(w, simple(INITIAL))
            bad.append(f"{w} defined")
        except Undefined:
            pass
    try:
        vs = apply_word("(B+E)CBCAE", simple(INITIAL))
        resolve_groups(vs, 1)
    except Undefined:
        bad.append("(B+E)CBCAE unresolved")
    return not bad, "; ".join(bad) or "CBCAE, BCBCAE, ECBCAE, (B+E)CBCAE"


# 11 --------------------------------------------------------------------------

def _non_negative(chi):
    for _, f in chi.items():
        for (a, b, c), v in f.terms.items():
            if v < 0 or a < 0 or b < 0 or c < 0:
                return False
    return True


def criterion_11():
    bad = []
    for k in (1, 2, 3):
        for qmax in (4, 8):
            P = TruncationPolicy(qmax)
            routes = {
                "recursion": lambda: limit_character(k, P),
                "fixed-point": lambda: fixed_point_character(k, TruncationPolicy(qmax, z2max=qmax)),
                "oracle": lambda: oracle_vector(k, P),
                "bosonic-closed": lambda: bosonic.theorem_main_character(k, P, route="closed"),
                "bosonic-operator": lambda: bosonic.theorem_main_character(k, P, route="operator"),
            }
            for name, thunk in routes.items():
                if not _non_negative(thunk()):
                    bad.append(f"{name} k={k} qmax={qmax}")
    return not bad, "; ".join(bad) or "5 routes, k=1..3, qmax 4 and 8"


# 12 --------------------------------------------------------------------------

def _random_series(rng, policy):
    terms = {}
    for _ in range(rng.randint(0, 6)):
        terms[(rng.randint(0, policy.qmax), rng.randint(-2, 3), rng.randint(0, 3))] = rng.randint(-5, 5)
    return TruncatedSeries(terms, policy)


def _naive_mul(f, g, policy):
    acc = {}
    for (a, b, c), u in f.items():
        for (d, e, h), v in g.items():
            key = (a + d, b + e, c + h)
            acc[key] = acc.get(key, 0) + u * v
    return {key: v for key, v in acc.items() if v and policy.admits(key)}


def criterion_12(cases=1000):
    rng = random.Random(2024)
    P = TruncationPolicy(6)
    bad = []
    for i in range(cases):
        f, g, h = (_random_series(rng, P) for _ in range(3))
        if not (f * g == g * f and (f * g) * h == f * (g * h) and f * (g + h) == f * g + f * h
                and (f + g) + h == f + (g + h) and (f * g).terms == _naive_mul(f.terms, g.terms, P)):
            bad.append(f"ring case {i}")
    W = TruncationPolicy(6, z1min=-30, z2max=30)
    done = 0
    while done < cases:
        x = mono(rng.randint(-4, 4), rng.randint(-4, 4), rng.randint(-4, 4))
        if classify_monomial(x) not in (MonomialClass.SMALL, MonomialClass.LARGE):
            continue
        done += 1
        r = inv_one_minus(x, W)
        prod = (TruncatedSeries.one(W) - TruncatedSeries({x.triple: 1}, W)) * r
        inner = TruncationPolicy(6 - max(0, -x.q), z1min=-30 + max(0, x.z1) + abs(x.z1),
                                 z2max=30 - max(0, x.z2) - abs(x.z2))
        if prod.truncate(inner) != TruncatedSeries.one(inner):
            bad.append(f"inverse of {x.triple}")
    for i in range(cases):
        f, g = _random_series(rng, P), _random_series(rng, P)
        if not (shift_z2(f * g) == shift_z2(f) * shift_z2(g)
                and shift_z2(f + g) == shift_z2(f) + shift_z2(g)):
            bad.append(f"shift case {i}")
    return not bad, "; ".join(bad[:5]) or f"{cases} cases each for ring, inverse, shift"


CRITERIA = {
    1: ("triple cross-validation", criterion_1),
    2: ("printed transfer matrix", criterion_2),
    3: ("initial iterates", criterion_3),
    4: ("route equivalence", criterion_4),
    5: ("Jackson specialization", criterion_5),
    6: ("stable-tail lemma", criterion_6),
    7: ("cancellation ledger", criterion_7),
    8: ("operator identities", criterion_8),
    9: ("definedness fixtures", criterion_9),
    10: ("vertex lemmas", criterion_10),
    11: ("non-negativity", criterion_11),
    12: ("series ring properties", criterion_12),
}

# Criterion 8 as stated contains false sub-claims (X Lbar^0 B on v_inf and the
# printed explicit formula for m >= 1); see the decision log. It is reported
# as FAIL and kept as a strict xfail so a change in outcome is noticed.
KNOWN_FAILING = {8}


def _params():
    for num in CRITERIA:
        marks = []
        if num in KNOWN_FAILING:
            marks.append(pytest.mark.xfail(strict=True, reason="sub-claims false as stated"))
        yield pytest.param(num, marks=marks, id=f"criterion_{num:02d}")


@pytest.mark.parametrize("num", list(_params()))
def test_criterion(num):
    title, fn = CRITERIA[num]
    ok, detail = fn()
    assert _record(num, title, ok, detail), RESULTS[num]


def test_criterion_8_parts_that_hold():
    """The corrected explicit formula and the remaining vanishing words."""
    P = TruncationPolicy(8)
    assert bosonic.operator_identity_check("BE", {}, 1, P)
    for m in (0, 1):
        for idx in range(8):
            ok = bool(bosonic.operator_identity_check("vanishing", {"m": m, "index": idx}, 1, P))
            assert ok == (not (m == 0 and idx in (1, 3))), (m, idx)
    for n, m in itertools.product(range(3), repeat=2):
        assert bosonic.explicit_anb_check(n, m, 1, P, printed=False)
    # the failing case: A B v_inf = f2 v2, not zero
    assert word_on_vinf("A B", 1, P) == to_character(v_term(2), 1, P)


if __name__ == "__main__":
    for num, (title, fn) in CRITERIA.items():
        _record(num, title, *fn())
