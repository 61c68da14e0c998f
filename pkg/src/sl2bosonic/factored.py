"""Exactly factored scalars: sign * monomial * prod (1-m)^e * prod (x)_inf^e.

Scalar parts of simple vectors stay in this form until they are expanded,
since definedness is a property of the individual factors.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, Mapping, Optional, Tuple

from .series import (
    AmbiguousExpansion,
    DivisionByVanishingFactor,
    Monomial,
    MonomialClass,
    ONE,
    TruncatedSeries,
    TruncationPolicy,
    classify_monomial,
    expand_product,
    format_monomial,
)

Poly = Dict[Monomial, int]


class FactorizationFailed(ArithmeticError):
    """Two scalars cannot be put over a common finite denominator."""


# ---------------------------------------------------------------------------
# Laurent polynomials keyed by Monomial
# ---------------------------------------------------------------------------

def poly_mul(a: Mapping[Monomial, int], b: Mapping[Monomial, int]) -> Poly:
    out: Poly = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = m1 * m2
            out[m] = out.get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def poly_add(a: Mapping[Monomial, int], b: Mapping[Monomial, int]) -> Poly:
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, 0) + c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def one_minus_power(m: Monomial, e: int) -> Poly:
    """(1 - m)^e, e >= 0."""
    out: Poly = {ONE: 1}
    for _ in range(e):
        out = poly_mul(out, {ONE: 1, m: -1})
    return out


def _coordinates(m: Monomial) -> Dict[object, int]:
    d = {}
    if m.q:
        d["q"] = m.q
    if m.z1:
        d["z1"] = m.z1
    if m.z2:
        d["z2"] = m.z2
    for key, e in m.sym:
        d[key] = e
    return d


def divide_one_minus(p: Mapping[Monomial, int], m: Monomial) -> Optional[Poly]:
    """p / (1 - m) if the division is exact, else None.

    Terms split into chains {r * m^j}; along a chain the quotient is the
    running sum of coefficients, and exactness means each chain sums to zero.
    """
    coords = _coordinates(m)
    if not coords:
        return None
    var, step = next(iter(coords.items()))
    chains: Dict[Monomial, Dict[int, int]] = {}
    for term, c in p.items():
        e = _coordinates(term).get(var, 0)
        j = e // step
        rep = term / (m ** j)
        chains.setdefault(rep, {})[j] = c
    out: Poly = {}
    for rep, chain in chains.items():
        if sum(chain.values()):
            return None
        lo, hi = min(chain), max(chain)
        run = 0
        for j in range(lo, hi):
            run += chain.get(j, 0)
            if run:
                out[rep * (m ** j)] = run
    return out


def _monomial_content(p: Mapping[Monomial, int]) -> Monomial:
    """Componentwise minimum exponent over the support."""
    coords = [_coordinates(m) for m in p]
    keys = set().union(*coords) if coords else set()
    mins = {k: min(c.get(k, 0) for c in coords) for k in keys}
    sym = tuple(sorted(((k, v) for k, v in mins.items() if not isinstance(k, str) and v),
                       key=lambda item: (item[0][0], -1 if item[0][1] is None else item[0][1])))
    return Monomial(mins.get("q", 0), mins.get("z1", 0), mins.get("z2", 0), sym)


# ---------------------------------------------------------------------------
# FactoredRational
# ---------------------------------------------------------------------------

def _orient(m: Monomial) -> Tuple[Monomial, bool]:
    """Canonical member of {m, 1/m} for the factor (1 - m); True if flipped."""
    cls = classify_monomial(m)
    if cls is MonomialClass.LARGE:
        return m.inverse(), True
    if cls is MonomialClass.INDETERMINATE:
        return (m.inverse(), True) if m.q < 0 else (m, False)
    if cls is MonomialClass.SYMBOLIC:
        first = m.sym[0][1]
        return (m.inverse(), True) if first < 0 else (m, False)
    return m, False


@dataclass(frozen=True)
class FactoredRational:
    """coeff * prefactor * overflow * prod (1-m)^e * prod (x)_inf^e.

    ``linear`` and ``inf`` are sorted tuples of (Monomial, multiplicity);
    ``overflow`` is an optional Laurent polynomial numerator that did not
    split into linear factors, stored as a sorted tuple of (Monomial, coeff).
    Build through :func:`make_fr`, which canonicalizes.
    """

    coeff: int
    prefactor: Monomial = ONE
    linear: tuple = ()
    inf: tuple = ()
    overflow: Optional[tuple] = None

    @property
    def is_zero(self) -> bool:
        return self.coeff == 0

    def linear_dict(self) -> Dict[Monomial, int]:
        return dict(self.linear)

    def inf_dict(self) -> Dict[Monomial, int]:
        return dict(self.inf)

    def overflow_poly(self) -> Poly:
        return dict(self.overflow) if self.overflow else {ONE: 1}

    def has_symbols(self) -> bool:
        if self.prefactor.sym:
            return True
        if any(m.sym for m, _ in self.linear) or any(m.sym for m, _ in self.inf):
            return True
        return bool(self.overflow) and any(m.sym for m, _ in self.overflow)

    def __mul__(self, other: "FactoredRational") -> "FactoredRational":
        return fr_mul(self, other)

    def __add__(self, other: "FactoredRational") -> "FactoredRational":
        return fr_add(self, other)

    def __neg__(self) -> "FactoredRational":
        return FactoredRational(-self.coeff, self.prefactor, self.linear, self.inf, self.overflow)

    def shift(self, times: int = 1) -> "FactoredRational":
        return fr_shift(self, times)

    def __str__(self) -> str:
        return format_fr(self)


FR_ZERO = FactoredRational(0)
FR_ONE = FactoredRational(1)


def _sort_key(item):
    m, _ = item
    return (m.q, m.z1, m.z2, repr(m.sym))


def make_fr(coeff: int, prefactor: Monomial = ONE,
            linear: Optional[Mapping[Monomial, int]] = None,
            inf: Optional[Mapping[Monomial, int]] = None,
            overflow: Optional[Mapping[Monomial, int]] = None) -> FactoredRational:
    """Canonical FactoredRational.

    Infinite products on one q-orbit are pushed to the largest base with
    (x)_inf = (1 - x)(qx)_inf.  Linear factors are oriented so that their
    monomial is never Large, (1 - 1)^e>0 collapses to zero and (1 - 1)^e<0
    raises DivisionByVanishingFactor.
    """
    if coeff == 0 or prefactor.is_zero:
        return FR_ZERO
    lin: Dict[Monomial, int] = {}
    for m, e in (linear or {}).items():
        if e and not m.is_zero:
            lin[m] = lin.get(m, 0) + e

    # q-orbit normalization of infinite products
    orbits: Dict[Monomial, Dict[int, int]] = {}
    for base, e in (inf or {}).items():
        if not e:
            continue
        if base.is_zero:
            continue
        key = Monomial(0, base.z1, base.z2, base.sym)
        orbits.setdefault(key, {})
        orbits[key][base.q] = orbits[key].get(base.q, 0) + e
    infd: Dict[Monomial, int] = {}
    for key, by_q in orbits.items():
        top = max(by_q)
        total = 0
        for a, e in by_q.items():
            total += e
            for j in range(a, top):
                m = key * Monomial(j, 0, 0)
                lin[m] = lin.get(m, 0) + e
        if total:
            infd[key * Monomial(top, 0, 0)] = total

    if overflow is not None:
        poly = {m: c for m, c in overflow.items() if c}
        if not poly:
            return FR_ZERO
        content = _monomial_content(poly)
        if content != ONE:
            poly = {m / content: c for m, c in poly.items()}
            prefactor = prefactor * content
        g = 0
        for c in poly.values():
            g = gcd(g, c)
        if g > 1:
            poly = {m: c // g for m, c in poly.items()}
            coeff *= g
        if len(poly) == 1:
            (m, c), = poly.items()
            coeff *= c
            prefactor = prefactor * m
            poly = None
    else:
        poly = None

    oriented: Dict[Monomial, int] = {}
    for m, e in lin.items():
        if not e:
            continue
        o, flipped = _orient(m)
        if flipped:
            # (1 - m)^e = (-m)^e (1 - 1/m)^e
            coeff *= (-1) ** (e % 2)
            prefactor = prefactor * (m ** e)
        oriented[o] = oriented.get(o, 0) + e
    final = {}
    for m, e in oriented.items():
        if not e:
            continue
        if m.is_one:
            if e > 0:
                return FR_ZERO
            raise DivisionByVanishingFactor("factor (1 - 1) in a denominator")
        final[m] = e
    return FactoredRational(
        coeff,
        prefactor,
        tuple(sorted(final.items(), key=_sort_key)),
        tuple(sorted(infd.items(), key=_sort_key)),
        None if poly is None else tuple(sorted(poly.items(), key=_sort_key)),
    )


def fr_monomial(m: Monomial, coeff: int = 1) -> FactoredRational:
    return make_fr(coeff, m)


def fr_linear(m: Monomial, e: int = 1) -> FactoredRational:
    """(1 - m)^e."""
    return make_fr(1, ONE, {m: e})


def fr_mul(x: FactoredRational, y: FactoredRational) -> FactoredRational:
    if x.is_zero or y.is_zero:
        return FR_ZERO
    lin = dict(x.linear)
    for m, e in y.linear:
        lin[m] = lin.get(m, 0) + e
    inf = dict(x.inf)
    for m, e in y.inf:
        inf[m] = inf.get(m, 0) + e
    if x.overflow is None and y.overflow is None:
        over = None
    else:
        over = poly_mul(x.overflow_poly(), y.overflow_poly())
    return make_fr(x.coeff * y.coeff, x.prefactor * y.prefactor, lin, inf, over)


def fr_product(items: Iterable[FactoredRational]) -> FactoredRational:
    out = FR_ONE
    for x in items:
        out = fr_mul(out, x)
    return out


def fr_inverse(x: FactoredRational) -> FactoredRational:
    if x.is_zero or x.overflow is not None:
        raise ZeroDivisionError("cannot invert zero or an unfactored numerator")
    if abs(x.coeff) != 1:
        raise ValueError("integer content other than +-1 is not invertible here")
    return make_fr(x.coeff, x.prefactor.inverse(),
                   {m: -e for m, e in x.linear}, {m: -e for m, e in x.inf})


def fr_shift(x: FactoredRational, times: int = 1) -> FactoredRational:
    """Apply the q-shift in z2 to every monomial of the scalar."""
    if x.is_zero or times == 0:
        return x
    over = None if x.overflow is None else {m.shift(times): c for m, c in x.overflow}
    return make_fr(x.coeff, x.prefactor.shift(times),
                   {m.shift(times): e for m, e in x.linear},
                   {m.shift(times): e for m, e in x.inf},
                   over)


def fr_substitute_one(x: FactoredRational, name: str) -> FactoredRational:
    """Evaluate a formal symbol at 1."""
    if x.is_zero:
        return x
    over = None
    if x.overflow is not None:
        over = {}
        for m, c in x.overflow:
            k = m.without(name)
            over[k] = over.get(k, 0) + c
    lin: Dict[Monomial, int] = {}
    for m, e in x.linear:
        k = m.without(name)
        lin[k] = lin.get(k, 0) + e
    inf: Dict[Monomial, int] = {}
    for m, e in x.inf:
        k = m.without(name)
        inf[k] = inf.get(k, 0) + e
    return make_fr(x.coeff, x.prefactor.without(name), lin, inf, over)


def _shifted_candidates(ms: Iterable[Monomial], reach: int = 2):
    seen = set()
    for m in ms:
        for j in range(-reach, reach + 1):
            c = m * Monomial(j, 0, 0)
            if c.is_one:
                continue
            o, _ = _orient(c)
            if o not in seen:
                seen.add(o)
                yield o


def fr_add(x: FactoredRational, y: FactoredRational) -> FactoredRational:
    """Sum over the common denominator, then re-factor the numerator.

    The numerator is divided by every (1 - m) with m drawn from the summands'
    factors and their q-shifts by up to two steps; whatever does not split is
    kept as an overflow numerator.  Raises FactorizationFailed when the
    infinite products of the summands differ.
    """
    if x.is_zero:
        return y
    if y.is_zero:
        return x
    # push infinite products of both onto common bases
    xs = _rebase(x, y)
    ys = _rebase(y, x)
    if dict(xs.inf) != dict(ys.inf):
        raise FactorizationFailed("summands carry different infinite products")

    lx, ly = dict(xs.linear), dict(ys.linear)
    common: Dict[Monomial, int] = {}
    for m in set(lx) | set(ly):
        common[m] = min(lx.get(m, 0), ly.get(m, 0))

    def numerator(z: FactoredRational, ld: Dict[Monomial, int]) -> Poly:
        p: Poly = {z.prefactor: z.coeff}
        if z.overflow is not None:
            p = poly_mul(p, dict(z.overflow))
        for m in common:
            extra = ld.get(m, 0) - common[m]
            if extra:
                p = poly_mul(p, one_minus_power(m, extra))
        return p

    total = poly_add(numerator(xs, lx), numerator(ys, ly))
    if not total:
        return FR_ZERO

    content = _monomial_content(total)
    total = {m / content: c for m, c in total.items()}
    g = 0
    for c in total.values():
        g = gcd(g, c)
    total = {m: c // g for m, c in total.items()}

    found: Dict[Monomial, int] = {}
    cands = list(_shifted_candidates(list(lx) + list(ly)))
    for cand in cands:
        if len(total) <= 1:
            break
        while len(total) > 1:
            quo = divide_one_minus(total, cand)
            if quo is None:
                break
            total = quo
            found[cand] = found.get(cand, 0) + 1
    lin = {m: e for m, e in common.items() if e}
    for m, e in found.items():
        lin[m] = lin.get(m, 0) + e
    return make_fr(g, content, lin, dict(xs.inf), total)


def _rebase(x: FactoredRational, other: FactoredRational) -> FactoredRational:
    """Re-express x's infinite products on the largest base of each q-orbit
    occurring in x or other."""
    tops: Dict[Monomial, int] = {}
    for m, _ in list(x.inf) + list(other.inf):
        key = Monomial(0, m.z1, m.z2, m.sym)
        tops[key] = max(tops.get(key, m.q), m.q)
    lin = dict(x.linear)
    inf: Dict[Monomial, int] = {}
    for m, e in x.inf:
        key = Monomial(0, m.z1, m.z2, m.sym)
        top = tops[key]
        for j in range(m.q, top):
            f = key * Monomial(j, 0, 0)
            lin[f] = lin.get(f, 0) + e
        t = key * Monomial(top, 0, 0)
        inf[t] = inf.get(t, 0) + e
    # keep the rebased form without re-normalizing the orbit tops away
    oriented = make_fr(x.coeff, x.prefactor, lin, None, None if x.overflow is None else dict(x.overflow))
    return FactoredRational(oriented.coeff, oriented.prefactor, oriented.linear,
                            tuple(sorted(inf.items(), key=_sort_key)), oriented.overflow)


def fr_sum(items: Iterable[FactoredRational]) -> FactoredRational:
    out = FR_ZERO
    for x in items:
        out = fr_add(out, x)
    return out


# ---------------------------------------------------------------------------
# Expansion
# ---------------------------------------------------------------------------

def q_valuation_bound(x: FactoredRational) -> int:
    """A lower bound for the q-degree of every term of the expansion."""
    low = x.prefactor.q
    for m, e in x.linear:
        if e > 0 and m.q < 0:
            low += e * m.q
    if x.overflow is not None:
        low += min(m.q for m, _ in x.overflow)
    return low


def _inf_to_linear(x: FactoredRational, reach: int) -> Dict[Monomial, int]:
    lin: Dict[Monomial, int] = {}
    for base, e in x.inf:
        if base.sym or base.q < 0 or classify_monomial(base) is not MonomialClass.SMALL:
            raise AmbiguousExpansion(f"({format_monomial(base)})_inf cannot be expanded")
        for j in range(0, max(0, reach - base.q) + 1):
            m = base * Monomial(j, 0, 0)
            lin[m] = lin.get(m, 0) + e
    return lin


@lru_cache(maxsize=200_000)
def fr_to_series(x: FactoredRational, policy: TruncationPolicy) -> TruncatedSeries:
    """Expand with every denominator in non-negative powers of its small side."""
    if x.is_zero:
        return TruncatedSeries.zero(policy)
    if x.has_symbols():
        raise ValueError("scalar with formal symbols cannot be expanded")
    low = q_valuation_bound(x)
    if low > policy.qmax:
        return TruncatedSeries.zero(policy)
    reach = policy.qmax - low
    lin = dict(x.linear)
    for m, e in _inf_to_linear(x, reach).items():
        lin[m] = lin.get(m, 0) + e
    polys = []
    if x.overflow is not None:
        polys.append({m.triple: c for m, c in x.overflow})
    return expand_product(x.coeff, x.prefactor, lin.items(), polys, policy)


def format_fr(x: FactoredRational) -> str:
    if x.is_zero:
        return "0"
    head = str(x.coeff) if x.prefactor.is_one else f"{x.coeff}*{format_monomial(x.prefactor)}"
    num, den = [], []
    for m, e in x.linear:
        s = f"(1 - {format_monomial(m)})" + (f"^{abs(e)}" if abs(e) != 1 else "")
        (num if e > 0 else den).append(s)
    for m, e in x.inf:
        s = f"({format_monomial(m)})_inf" + (f"^{abs(e)}" if abs(e) != 1 else "")
        (num if e > 0 else den).append(s)
    if x.overflow is not None:
        terms = " + ".join(f"{c}*{format_monomial(m)}" for m, c in x.overflow)
        num.append(f"[{terms}]")
    out = head
    if num:
        out += " * " + " * ".join(num)
    if den:
        out += " / (" + " * ".join(den) + ")"
    return out
