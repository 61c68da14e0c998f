import itertools

import pytest

from sl2bosonic.paths import (
    InvalidConfig,
    enumerate_configs,
    full_character,
    is_admissible,
    oracle_character,
)
from sl2bosonic.series import TruncationPolicy, mono, substitute_z
from sl2bosonic.transfer import limit_character, states


def naive_admissible(a, b, k, l, pad=6):
    """Every constraint written out literally on a zero-padded window.

    Index -1 holds b = l, a = 0; the right end n = infinity carries b = k.
    """
    R = len(a) + pad
    A = {s: (a[s] if 0 <= s < len(a) else 0) for s in range(-1, R + 1)}
    B = {s: (b[s] if 0 <= s < len(b) else 0) for s in range(0, R + 1)}
    B[-1] = l
    for r in range(0, R):
        if A[r] + B[r + 1] + A[r + 1] > k or B[r] + A[r] + B[r + 1] > k:
            return False
    for m in range(-1, R + 1):
        for n in range(m + 1, R + 1):
            lhs = sum(B[s] for s in range(m, n + 1))
            rhs = k + sum(A[s] for s in range(m + 1, n - 1))
            if lhs > rhs:
                return False
        # n = infinity: b_inf = k on the left, the a-sum runs to the end
        if sum(B[s] for s in range(m, R + 1)) + k > k + sum(A[s] for s in range(m + 1, R + 1)):
            return False
    return True


def naive_configs(k, l, i, qmax):
    out = []
    J = qmax
    ranges = [range(0, k + 1)] * (2 * J)
    for flat in itertools.product(*ranges):
        a = [i] + list(flat[:J])
        b = [0] + list(flat[J:])
        q = sum(j * (a[j] + b[j]) for j in range(1, J + 1))
        if q > qmax:
            continue
        if naive_admissible(a, b, k, l):
            out.append(mono(q, sum(b), sum(a) + sum(b)))
    return sorted(out, key=lambda m: m.triple)


def test_all_zero_is_admissible():
    assert is_admissible([0], [0], 1, 0, 0)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_lowest_configuration(k):
    for s in states(k):
        # a_0 = i alone satisfies every constraint exactly when i = l
        assert is_admissible([s.i], [0], k, s.l, s.i) == (s.i == s.l)
        assert is_admissible([s.i], [0], k, s.l, s.i) == naive_admissible([s.i], [0], k, s.l)


def test_pair_violation():
    assert not is_admissible([0, 0], [0, 2], 1, 0, 0)


def test_malformed_boundary():
    with pytest.raises(InvalidConfig):
        is_admissible([1], [0], 1, 0, 0)
    with pytest.raises(InvalidConfig):
        is_admissible([0], [1], 1, 0, 0)


@pytest.mark.parametrize("k, qmax", [(1, 4), (2, 3)])
def test_enumeration_matches_naive(k, qmax):
    for s in states(k):
        got = sorted((w for _, w in enumerate_configs(k, s.l, s.i, qmax)), key=lambda m: m.triple)
        assert got == naive_configs(k, s.l, s.i, qmax)


def test_qmax_zero():
    cfgs = list(enumerate_configs(1, 0, 0, 0))
    assert len(cfgs) == 1
    assert cfgs[0][1] == mono()


def test_count_matches_coefficient_sum():
    P = TruncationPolicy(3)
    n = len(list(enumerate_configs(1, 0, 0, 3)))
    assert n == limit_character(1, P)[(0, 0)].coefficient_sum()


@pytest.mark.parametrize("k, qmax", [(1, 8), (2, 8), (3, 6)])
def test_oracle_equals_limit(k, qmax):
    P = TruncationPolicy(qmax)
    chi = limit_character(k, P)
    for s in states(k):
        f = oracle_character(k, s.l, s.i, P)
        assert f == chi[s]
        low = [c for (a, _, c) in f.terms if a == 0]
        assert all(c >= s.i for c in low)


def test_monotone_in_qmax():
    small = oracle_character(2, 1, 0, TruncationPolicy(4))
    big = oracle_character(2, 1, 0, TruncationPolicy(6))
    assert big.truncate(TruncationPolicy(4)) == small


@pytest.mark.parametrize("k", [1, 2])
def test_full_character(k):
    P = TruncationPolicy(5)
    chi = limit_character(k, P)
    for l in range(k + 1):
        fc = full_character(k, l, P)
        want = substitute_z(chi[(0, l)])
        for i in range(1, l + 1):
            want = want + substitute_z(chi[(i, l)])
        assert fc == want
    assert full_character(k, 0, P).coeff_at(0, 0) == 1
