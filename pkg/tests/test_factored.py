import random

import pytest

from sl2bosonic.factored import (
    FR_ONE,
    FactorizationFailed,
    FR_ZERO,
    fr_add,
    fr_inverse,
    fr_mul,
    fr_shift,
    fr_to_series,
    make_fr,
)
from sl2bosonic.operators import f_scalar
from sl2bosonic.series import (
    DivisionByVanishingFactor,
    ONE,
    TruncatedSeries,
    TruncationPolicy,
    mono,
    pochhammer,
)

P = TruncationPolicy(8)


def poly(terms, policy=P):
    return TruncatedSeries(terms, policy)


def one_minus(m, policy=P):
    return poly({(0, 0, 0): 1, m.triple: -1}, policy)


def test_identity_and_zero():
    x = make_fr(3, mono(1, 0, 1), {mono(1): -1})
    assert fr_mul(x, FR_ONE) == x
    assert fr_add(x, FR_ZERO) == x
    assert fr_mul(x, FR_ZERO).is_zero


def test_orbit_normalization():
    x = mono(1, 1, 2)
    got = fr_mul(make_fr(1, ONE, inf={x: 1}), make_fr(1, ONE, inf={x * mono(1): -1}))
    assert got == make_fr(1, ONE, {x: 1})
    assert not got.inf


def test_f1_times_linear_factor():
    got = fr_mul(f_scalar(1), make_fr(1, ONE, {mono(1, 0, 1): 1}))
    want = make_fr(1, ONE, {mono(2, 1, 2): 1}, {mono(1): -1, mono(2, 1, 2): -1})
    assert got == want


def test_unit_factor():
    assert make_fr(1, ONE, {ONE: 1}).is_zero
    with pytest.raises(DivisionByVanishingFactor):
        make_fr(1, ONE, {ONE: -1})


def test_large_factor_is_reoriented():
    # 1/(1 - q^-1) = -q/(1 - q)
    x = make_fr(1, ONE, {mono(-1): -1})
    assert x == make_fr(-1, mono(1), {mono(1): -1})


def test_series_of_simple_values():
    assert fr_to_series(FR_ONE, P) == TruncatedSeries.one(P)
    pol = TruncationPolicy(2)
    got = fr_to_series(make_fr(1, ONE, {mono(1, 0, 1): -1}), pol)
    assert got.terms == {(0, 0, 0): 1, (1, 0, 1): 1, (2, 0, 2): 1}


def test_f1_reconstruction():
    # multiplying the expansion of f_1 by all its denominators gives its numerator
    pol = TruncationPolicy(6)
    s = fr_to_series(f_scalar(1), pol)
    back = (s * pochhammer(mono(1), None, 1, pol) * pochhammer(mono(2, 1, 2), None, 1, pol)
            * one_minus(mono(1, 0, 1), pol))
    assert back == one_minus(mono(2, 1, 2), pol)


def _random_fr(rng, inf):
    lin = {}
    for _ in range(rng.randint(0, 3)):
        m = mono(rng.randint(1, 3), rng.randint(-1, 1), rng.randint(0, 2))
        lin[m] = lin.get(m, 0) + rng.choice((-2, -1, 1, 2))
    return make_fr(rng.choice((-2, -1, 1, 3)), mono(rng.randint(0, 2), rng.randint(0, 1),
                                                    rng.randint(0, 2)), lin, inf)


@pytest.mark.parametrize("seed", range(40))
def test_add_and_mul_commute_with_expansion(seed):
    rng = random.Random(seed)
    # summands share their infinite products, as in every grouped step
    inf = {}
    if rng.random() < 0.5:
        inf[mono(rng.randint(1, 2), 0, rng.randint(0, 1))] = rng.choice((-1, 1))
    x, y = _random_fr(rng, inf), _random_fr(rng, inf)
    sx, sy = fr_to_series(x, P), fr_to_series(y, P)
    assert fr_to_series(fr_add(x, y), P) == sx + sy
    assert fr_to_series(fr_mul(x, y), P) == sx * sy


def test_add_refactors_common_numerator():
    # 1/(1-q) - q/(1-q) = 1
    x = make_fr(1, ONE, {mono(1): -1})
    y = make_fr(-1, mono(1), {mono(1): -1})
    assert fr_add(x, y) == FR_ONE


def test_add_keeps_overflow_when_needed():
    x = make_fr(1, ONE)
    y = make_fr(1, mono(1, 1, 0))
    s = fr_add(x, y)
    assert fr_to_series(s, P).terms == {(0, 0, 0): 1, (1, 1, 0): 1}


def test_inverse_and_shift():
    x = make_fr(-1, mono(1, 0, 1), {mono(2, 0, 1): -1}, {mono(1): 1})
    assert fr_mul(x, fr_inverse(x)) == FR_ONE
    sx = fr_shift(x)
    assert sx == make_fr(-1, mono(2, 0, 1), {mono(3, 0, 1): -1}, {mono(1): 1})


def test_add_refuses_different_infinite_products():
    x = make_fr(1, ONE, inf={mono(1): -1})
    y = make_fr(1, ONE, inf={mono(1, 0, 1): -1})
    with pytest.raises(FactorizationFailed):
        fr_add(x, y)
