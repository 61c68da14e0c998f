"""Truncated Laurent series in (q, z1, z2) with exact integer coefficients.

The working ring is C[[q, z2]]((z1^-1)) cut down to finitely many terms by a
:class:`TruncationPolicy`.  Terms are stored sparsely as ``{(a, b, c): coeff}``
for the monomial ``q**a * z1**b * z2**c``.

Monomials used by the operator calculus may also carry formal symbols
(generic vector entries ``P, Q, R`` and a deformation parameter ``t``); those
never reach a :class:`TruncatedSeries`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from math import comb
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple

Triple = Tuple[int, int, int]


class SeriesError(ArithmeticError):
    """Base class for expansion and window errors."""


class DivisionByVanishingFactor(SeriesError):
    """1/(1 - X) was requested for X equal to the identity monomial."""


class AmbiguousExpansion(SeriesError):
    """1/(1 - X) for a monomial with no admissible expansion direction."""


class WindowRequired(SeriesError):
    """The expansion is infinite at fixed q-degree and no window was set."""


class PolicyMismatch(ValueError):
    pass


class OutOfWindow(KeyError):
    pass


# ---------------------------------------------------------------------------
# Monomials
# ---------------------------------------------------------------------------

def _merge_sym(a: tuple, b: tuple, sign: int = 1) -> tuple:
    if not b:
        return a
    acc = dict(a)
    for key, e in b:
        v = acc.get(key, 0) + sign * e
        if v:
            acc[key] = v
        else:
            acc.pop(key, None)
    return tuple(sorted(acc.items(), key=_sym_sort_key))


def _sym_sort_key(item):
    (name, shift), _ = item
    return (name, -1 if shift is None else shift)


@dataclass(frozen=True)
class Monomial:
    """``q**q * z1**z1 * z2**z2`` times optional formal symbols.

    ``sym`` is a sorted tuple of ``((name, shift), exponent)``; ``shift`` counts
    how many times the q-shift in z2 has been applied to the symbol, or is
    ``None`` for symbols the shift leaves alone.  The zero monomial absorbs
    products and compares equal to every other zero monomial.
    """

    q: int = 0
    z1: int = 0
    z2: int = 0
    sym: tuple = ()
    is_zero: bool = False

    @classmethod
    def zero(cls) -> "Monomial":
        return _ZERO

    @classmethod
    def symbol(cls, name: str, shift: Optional[int] = 0, exp: int = 1) -> "Monomial":
        return cls(sym=(((name, shift), exp),))

    @property
    def triple(self) -> Triple:
        return (self.q, self.z1, self.z2)

    @property
    def is_one(self) -> bool:
        return not self.is_zero and self.q == 0 and self.z1 == 0 and self.z2 == 0 and not self.sym

    @property
    def has_symbols(self) -> bool:
        return bool(self.sym)

    def __mul__(self, other: "Monomial") -> "Monomial":
        if self.is_zero or other.is_zero:
            return _ZERO
        return Monomial(self.q + other.q, self.z1 + other.z1, self.z2 + other.z2,
                        _merge_sym(self.sym, other.sym))

    def inverse(self) -> "Monomial":
        if self.is_zero:
            raise ZeroDivisionError("inverse of the zero monomial")
        return Monomial(-self.q, -self.z1, -self.z2, tuple((k, -e) for k, e in self.sym))

    def __truediv__(self, other: "Monomial") -> "Monomial":
        return self * other.inverse()

    def __pow__(self, n: int) -> "Monomial":
        if self.is_zero:
            if n > 0:
                return _ZERO
            if n == 0:
                return _ONE
            raise ZeroDivisionError("negative power of the zero monomial")
        return Monomial(self.q * n, self.z1 * n, self.z2 * n,
                        tuple((k, e * n) for k, e in self.sym) if n else ())

    def shift(self, times: int = 1) -> "Monomial":
        """q-shift in z2: ``z2 -> q z2``; shiftable symbols advance their index."""
        if self.is_zero or times == 0:
            return self
        sym = tuple(((name, s if s is None else s + times), e) for (name, s), e in self.sym)
        return Monomial(self.q + times * self.z2, self.z1, self.z2, sym)

    def without(self, name: str) -> "Monomial":
        """Drop every symbol called ``name`` (evaluation at ``name = 1``)."""
        if self.is_zero:
            return self
        return Monomial(self.q, self.z1, self.z2,
                        tuple(item for item in self.sym if item[0][0] != name))

    def exponent_of(self, name: str) -> int:
        return sum(e for (n, _), e in self.sym if n == name)

    def __repr__(self) -> str:
        return f"Monomial({format_monomial(self)})"

    def __str__(self) -> str:
        return format_monomial(self)


_ZERO = Monomial(is_zero=True)
_ONE = Monomial()

ONE = _ONE
ZERO = _ZERO
Q = Monomial(1, 0, 0)
Z1 = Monomial(0, 1, 0)
Z2 = Monomial(0, 0, 1)


def mono(q: int = 0, z1: int = 0, z2: int = 0) -> Monomial:
    return Monomial(q, z1, z2)


def format_monomial(m: Monomial) -> str:
    if m.is_zero:
        return "0"
    parts = []
    for name, e in (("q", m.q), ("z1", m.z1), ("z2", m.z2)):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    for (name, s), e in m.sym:
        label = name if not s else f"S{s}({name})"
        parts.append(label if e == 1 else f"{label}^{e}")
    return "*".join(parts) if parts else "1"


class MonomialClass(enum.Enum):
    SMALL = "small"
    LARGE = "large"
    UNIT = "unit"
    INDETERMINATE = "indeterminate"
    # monomials carrying formal symbols: no expansion direction, never vanishing
    SYMBOLIC = "symbolic"


def _small_exponents(a: int, b: int, c: int) -> bool:
    return (a >= 0 and c >= 0 and a + c > 0) or (a == 0 and c == 0 and b < 0)


def classify_monomial(x: Monomial) -> MonomialClass:
    """Expansion direction of 1/(1 - x) in C[[q, z2]]((z1^-1))."""
    if x.is_zero:
        raise ValueError("the zero monomial has no class")
    if x.sym:
        return MonomialClass.SYMBOLIC
    a, b, c = x.q, x.z1, x.z2
    if a == 0 and b == 0 and c == 0:
        return MonomialClass.UNIT
    if _small_exponents(a, b, c):
        return MonomialClass.SMALL
    if _small_exponents(-a, -b, -c):
        return MonomialClass.LARGE
    return MonomialClass.INDETERMINATE


# ---------------------------------------------------------------------------
# Truncation policy and series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncationPolicy:
    """Keep terms with q-degree <= qmax and, optionally, z1 >= z1min, z2 <= z2max."""

    qmax: int
    z1min: Optional[int] = None
    z2max: Optional[int] = None

    def __post_init__(self):
        if self.qmax < 0:
            raise ValueError("qmax must be non-negative")
        if self.z2max is not None and self.z2max < 0:
            raise ValueError("z2max must be non-negative")

    def admits(self, key: Triple) -> bool:
        a, b, c = key
        if a > self.qmax:
            return False
        if self.z1min is not None and b < self.z1min:
            return False
        if self.z2max is not None and c > self.z2max:
            return False
        return True


class _Window:
    """Internal bounds used while expanding; unlike the policy, may be negative."""

    __slots__ = ("qmax", "z1min", "z2max")

    def __init__(self, qmax, z1min=None, z2max=None):
        self.qmax = qmax
        self.z1min = z1min
        self.z2max = z2max

    @classmethod
    def of(cls, policy: TruncationPolicy) -> "_Window":
        return cls(policy.qmax, policy.z1min, policy.z2max)

    def admits(self, key: Triple) -> bool:
        a, b, c = key
        return (a <= self.qmax
                and (self.z1min is None or b >= self.z1min)
                and (self.z2max is None or c <= self.z2max))


class TruncatedSeries:
    """Finite map from exponent triples to nonzero ints, closed under a policy."""

    __slots__ = ("_terms", "policy")

    def __init__(self, terms: Mapping[Triple, int] | Iterable[Tuple[Triple, int]] = (),
                 policy: TruncationPolicy = None):
        if policy is None:
            raise TypeError("a TruncationPolicy is required")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: Dict[Triple, int] = {}
        for key, v in items:
            if v and policy.admits(key):
                acc[key] = acc.get(key, 0) + v
        self._terms = {k: v for k, v in acc.items() if v}
        self.policy = policy

    @classmethod
    def _raw(cls, terms: Dict[Triple, int], policy: TruncationPolicy) -> "TruncatedSeries":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj.policy = policy
        return obj

    @classmethod
    def one(cls, policy: TruncationPolicy) -> "TruncatedSeries":
        return cls({(0, 0, 0): 1}, policy)

    @classmethod
    def zero(cls, policy: TruncationPolicy) -> "TruncatedSeries":
        return cls._raw({}, policy)

    @classmethod
    def monomial(cls, m: Monomial, policy: TruncationPolicy, coeff: int = 1) -> "TruncatedSeries":
        if m.is_zero or coeff == 0:
            return cls.zero(policy)
        if m.sym:
            raise ValueError("symbolic monomials cannot be expanded")
        return cls({m.triple: coeff}, policy)

    @property
    def terms(self) -> Dict[Triple, int]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Triple, int]]:
        return iter(sorted(self._terms.items()))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if isinstance(other, TruncatedSeries):
            return self.policy == other.policy and self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    __hash__ = None

    def __repr__(self) -> str:
        return f"TruncatedSeries({format_series(self)}, qmax={self.policy.qmax})"

    def _check(self, other: "TruncatedSeries"):
        if self.policy != other.policy:
            raise PolicyMismatch(f"{self.policy} != {other.policy}")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        acc = dict(self._terms)
        for k, v in other._terms.items():
            s = acc.get(k, 0) + v
            if s:
                acc[k] = s
            else:
                del acc[k]
        return TruncatedSeries._raw(acc, self.policy)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries._raw({k: -v for k, v in self._terms.items()}, self.policy)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def __mul__(self, other) -> "TruncatedSeries":
        if isinstance(other, int):
            if other == 0:
                return TruncatedSeries.zero(self.policy)
            return TruncatedSeries._raw({k: v * other for k, v in self._terms.items()},
                                        self.policy)
        self._check(other)
        return TruncatedSeries._raw(_convolve(self._terms, other._terms, _Window.of(self.policy)),
                                    self.policy)

    __rmul__ = __mul__

    def times_monomial(self, m: Monomial, coeff: int = 1,
                       policy: Optional[TruncationPolicy] = None) -> "TruncatedSeries":
        """Multiply by coeff * m; ``policy`` gives the window of the result."""
        pol = self.policy if policy is None else policy
        if m.is_zero or coeff == 0:
            return TruncatedSeries.zero(pol)
        a0, b0, c0 = m.triple
        acc = {}
        for (a, b, c), v in self._terms.items():
            key = (a + a0, b + b0, c + c0)
            if pol.admits(key):
                acc[key] = v * coeff
        return TruncatedSeries._raw(acc, pol)

    def truncate(self, policy: TruncationPolicy) -> "TruncatedSeries":
        return TruncatedSeries(self._terms, policy)

    def coeff_at(self, key: Triple) -> int:
        return coeff_at(self, key)

    def valuation(self) -> Optional[int]:
        return min((k[0] for k in self._terms), default=None)

    def coefficient_sum(self) -> int:
        return sum(self._terms.values())


def format_series(f: TruncatedSeries, limit: int = 12) -> str:
    items = list(f.items())
    if not items:
        return "0"
    parts = []
    for (a, b, c), v in items[:limit]:
        m = format_monomial(Monomial(a, b, c))
        if m == "1":
            parts.append(str(v))
        elif v == 1:
            parts.append(m)
        elif v == -1:
            parts.append("-" + m)
        else:
            parts.append(f"{v}*{m}")
    s = " + ".join(parts).replace("+ -", "- ")
    if len(items) > limit:
        s += f" + ... ({len(items)} terms)"
    return s


def _convolve(f: Mapping[Triple, int], g: Mapping[Triple, int], win: _Window) -> Dict[Triple, int]:
    if not f or not g:
        return {}
    if len(f) < len(g):
        f, g = g, f
    buckets: Dict[int, list] = {}
    for key, v in g.items():
        buckets.setdefault(key[0], []).append((key, v))
    gq = sorted(buckets)
    qmax, z1min, z2max = win.qmax, win.z1min, win.z2max
    acc: Dict[Triple, int] = {}
    get = acc.get
    for (a, b, c), v in f.items():
        room = qmax - a
        for qb in gq:
            if qb > room:
                break
            for (a2, b2, c2), w in buckets[qb]:
                cc = c + c2
                if z2max is not None and cc > z2max:
                    continue
                bb = b + b2
                if z1min is not None and bb < z1min:
                    continue
                key = (a + a2, bb, cc)
                acc[key] = get(key, 0) + v * w
    return {k: v for k, v in acc.items() if v}


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def series_add(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    return f + g


def series_mul(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    return f * g


def coeff_at(f: TruncatedSeries, key: Triple) -> int:
    if not f.policy.admits(tuple(key)):
        raise OutOfWindow(key)
    return f._terms.get(tuple(key), 0)


def shift_z2(f: TruncatedSeries) -> TruncatedSeries:
    """(S f)(q, z1, z2) = f(q, z1, q z2)."""
    pol = f.policy
    acc = {}
    for (a, b, c), v in f._terms.items():
        key = (a + c, b, c)
        if pol.admits(key):
            acc[key] = v
    return TruncatedSeries._raw(acc, pol)


class QZSeries:
    """Series in (q, z) after the substitution z1 -> z, z2 -> 1/z."""

    __slots__ = ("_terms", "qmax")

    def __init__(self, terms: Mapping[Tuple[int, int], int], qmax: int):
        self._terms = {k: v for k, v in terms.items() if v and k[0] <= qmax}
        self.qmax = qmax

    def items(self):
        return iter(sorted(self._terms.items()))

    @property
    def terms(self):
        return dict(self._terms)

    def __add__(self, other: "QZSeries") -> "QZSeries":
        if self.qmax != other.qmax:
            raise PolicyMismatch("qmax differs")
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, 0) + v
        return QZSeries(acc, self.qmax)

    def __eq__(self, other):
        if not isinstance(other, QZSeries):
            return NotImplemented
        return self.qmax == other.qmax and self._terms == other._terms

    __hash__ = None

    def coeff_at(self, qexp: int, zexp: int) -> int:
        return self._terms.get((qexp, zexp), 0)

    def __repr__(self):
        return f"QZSeries({sorted(self._terms.items())[:8]}..., qmax={self.qmax})"


def substitute_z(f: TruncatedSeries) -> QZSeries:
    """Map q^a z1^b z2^c to q^a z^(b - c)."""
    acc: Dict[Tuple[int, int], int] = {}
    for (a, b, c), v in f._terms.items():
        key = (a, b - c)
        acc[key] = acc.get(key, 0) + v
    return QZSeries(acc, f.policy.qmax)


def _expansion_variable(x: Monomial) -> Tuple[Monomial, bool]:
    """(Y, large) with Y Small such that 1/(1-x) = sum Y^j or -Y sum Y^j."""
    cls = classify_monomial(x)
    if cls is MonomialClass.UNIT:
        raise DivisionByVanishingFactor(f"1/(1 - {x})")
    if cls is MonomialClass.SMALL:
        return x, False
    if cls is MonomialClass.LARGE:
        return x.inverse(), True
    raise AmbiguousExpansion(f"1/(1 - {x}) has no expansion direction")


def _require_window(y: Monomial, win: _Window):
    if y.q == 0 and y.z2 == 0 and win.z1min is None:
        raise WindowRequired(f"powers of {y} need a z1min window")
    if y.q == 0 and y.z2 > 0 and win.z2max is None:
        raise WindowRequired(f"powers of {y} need a z2max window")


def _power_series(y: Monomial, e: int, win: _Window, offset: Triple = (0, 0, 0)) -> Dict[Triple, int]:
    """offset * (1 - y)^(-e) for Small y and e >= 1, restricted to the window."""
    _require_window(y, win)
    a0, b0, c0 = offset
    ya, yb, yc = y.triple
    acc: Dict[Triple, int] = {}
    j = 0
    while True:
        key = (a0 + j * ya, b0 + j * yb, c0 + j * yc)
        if key[0] > win.qmax:
            break
        if win.z2max is not None and key[2] > win.z2max:
            break
        if ya == 0 and yc == 0 and key[1] < win.z1min:
            break
        if win.admits(key):
            acc[key] = comb(e - 1 + j, j)
        j += 1
    return acc


def _binomial_poly(m: Monomial, e: int) -> Dict[Triple, int]:
    """(1 - m)^e for e >= 0 as an exact polynomial."""
    ma, mb, mc = m.triple
    return {(j * ma, j * mb, j * mc): (-1) ** j * comb(e, j) for j in range(e + 1)}


def inv_one_minus(x: Monomial, policy: TruncationPolicy) -> TruncatedSeries:
    """Expansion of 1/(1 - x): in powers of x if x is Small, of 1/x if Large."""
    if x.is_zero:
        return TruncatedSeries.one(policy)
    y, large = _expansion_variable(x)
    win = _Window.of(policy)
    if large:
        terms = _power_series(y, 1, win, offset=y.triple)
        return TruncatedSeries({k: -v for k, v in terms.items()}, policy)
    return TruncatedSeries(_power_series(y, 1, win), policy)


INFINITE = None


def pochhammer(x: Monomial, length: Optional[int], sign: int, policy: TruncationPolicy) -> TruncatedSeries:
    """prod_{j < length} (1 - q^j x)^sign; ``length=None`` means the infinite product."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if x.is_zero:
        return TruncatedSeries.one(policy)
    if length is INFINITE:
        if x.q < 0 or classify_monomial(x) is not MonomialClass.SMALL:
            raise AmbiguousExpansion(f"({x})_inf needs a Small base with q-exponent >= 0")
        length = max(0, policy.qmax - x.q + 1)
    elif length < 0:
        raise ValueError("negative Pochhammer length")
    result = TruncatedSeries.one(policy)
    for j in range(length):
        m = x * Monomial(j, 0, 0)
        if sign == 1:
            factor = TruncatedSeries(_binomial_poly(m, 1), policy)
        else:
            factor = inv_one_minus(m, policy)
        result = result * factor
    return result


# ---------------------------------------------------------------------------
# Products of linear factors with exact precision bookkeeping
# ---------------------------------------------------------------------------

def _poly_bounds(p: Mapping[Triple, int]) -> Tuple[int, int, int]:
    """(min q, min z2, max z1) over the support of a nonzero polynomial."""
    return (min(k[0] for k in p), min(k[2] for k in p), max(k[1] for k in p))


def expand_product(coeff: int, prefactor: Monomial,
                   linear: Iterable[Tuple[Monomial, int]],
                   polys: Iterable[Mapping[Triple, int]],
                   policy: TruncationPolicy) -> TruncatedSeries:
    """coeff * prefactor * prod (1 - m)^e * prod polys, exactly within ``policy``.

    Each factor is expanded only as far as the others' lowest q- and z2-degrees
    require, so negative exponents in numerators and the prefactor are safe.
    Pure z1^-1 denominators are expanded last, against the largest z1-degree
    the remaining product can supply.
    """
    if coeff == 0 or prefactor.is_zero:
        return TruncatedSeries.zero(policy)
    if prefactor.sym:
        raise ValueError("symbolic prefactor cannot be expanded")

    finite: list = []          # exact polynomials
    dens: list = []            # (Y small, e >= 1, sign flip offset)
    for m, e in linear:
        if e == 0:
            continue
        if m.is_zero:
            continue
        if m.sym:
            raise ValueError(f"symbolic factor (1 - {m}) cannot be expanded")
        if e > 0:
            if m.is_one:
                return TruncatedSeries.zero(policy)
            finite.append(_binomial_poly(m, e))
        else:
            y, large = _expansion_variable(m)
            if large:
                # 1/(1-m)^e = (-y)^e / (1-y)^e with y = 1/m
                coeff *= (-1) ** (-e)
                prefactor = prefactor * (y ** (-e))
            dens.append((y, -e))
    for p in polys:
        p = {k: v for k, v in p.items() if v}
        if not p:
            return TruncatedSeries.zero(policy)
        finite.append(p)

    pa, pb, pc = prefactor.triple
    qtarget = policy.qmax - pa
    z2target = None if policy.z2max is None else policy.z2max - pc

    bounds = [_poly_bounds(p) for p in finite]
    qlow_total = sum(b[0] for b in bounds)
    z2low_total = sum(b[1] for b in bounds)

    # every Small y has q >= 0 and z2 >= 0, so denominators only lower nothing
    work = _Window(qtarget - qlow_total + 0,
                   None,
                   None if z2target is None else z2target - z2low_total)
    group_late = [(y, e) for y, e in dens if y.q == 0 and y.z2 == 0]
    group_early = [(y, e) for y, e in dens if not (y.q == 0 and y.z2 == 0)]

    acc: Dict[Triple, int] = {(0, 0, 0): 1}
    # finite polynomials: multiply with the margin left by the not-yet-used lows
    remaining_q = qlow_total
    remaining_z2 = z2low_total
    for p, (lq, lz2, _) in zip(finite, bounds):
        remaining_q -= lq
        remaining_z2 -= lz2
        win = _Window(qtarget - remaining_q, None,
                      None if z2target is None else z2target - remaining_z2)
        acc = _convolve(acc, p, win)
        if not acc:
            return TruncatedSeries.zero(policy)
    final_early = _Window(qtarget, None, z2target)
    for y, e in group_early:
        acc = _convolve(acc, _power_series(y, e, _Window(work.qmax, None, work.z2max)), final_early)
        if not acc:
            return TruncatedSeries.zero(policy)
    if group_late:
        if policy.z1min is None:
            raise WindowRequired(f"powers of {group_late[0][0]} need a z1min window")
        top = max(k[1] for k in acc)
        z1need = policy.z1min - pb - top
        for y, e in group_late:
            acc = _convolve(acc, _power_series(y, e, _Window(work.qmax, z1need, work.z2max)),
                            final_early)
    out = {}
    for (a, b, c), v in acc.items():
        key = (a + pa, b + pb, c + pc)
        if policy.admits(key):
            out[key] = v * coeff
    return TruncatedSeries._raw({k: v for k, v in out.items() if v}, policy)
