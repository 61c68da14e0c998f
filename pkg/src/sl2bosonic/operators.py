"""Extremal-operator calculus on simple vectors f[P, Q, R].

The (i, l) component of [P, Q, R] is P^(k-l) Q^(l-i) R^i.  Each operator
multiplies the scalar by a few factors (1 - X)^{+-1} built from ratios of
P, Q, R, replaces the vector part, and then applies the q-shift S (z2 -> q z2)
to everything.  Words act rightmost step first.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .factored import (
    FR_ONE,
    FR_ZERO,
    FactoredRational,
    fr_add,
    fr_monomial,
    fr_mul,
    fr_shift,
    fr_substitute_one,
    fr_to_series,
    make_fr,
    q_valuation_bound,
)
from .series import (
    DivisionByVanishingFactor,
    Monomial,
    MonomialClass,
    ONE,
    TruncatedSeries,
    TruncationPolicy,
    ZERO,
    classify_monomial,
    format_monomial,
    mono,
)
from .transfer import CharacterVector, build_matrix, states, transfer_step

LETTERS = ("A", "B", "C", "D", "E")
EXTRA_LETTERS = ("B1", "B2", "D1", "D2")
DEFORM = ("_t1", "_t2")


class Undefined(ArithmeticError):
    """An operator produced a factor with no admissible expansion."""

    def __init__(self, operator: str, factor: str, reason: str, position: Optional[int] = None):
        self.operator = operator
        self.factor = factor
        self.reason = reason
        self.position = position
        where = "" if position is None else f" at step {position}"
        super().__init__(f"{operator}{where}: {reason} factor {factor}")


# ---------------------------------------------------------------------------
# vectors
# ---------------------------------------------------------------------------

Triple3 = Tuple[Monomial, Monomial, Monomial]


def component(vec: Triple3, k: int, i: int, l: int) -> Monomial:
    P, Q, R = vec
    return (P ** (k - l)) * (Q ** (l - i)) * (R ** i)


@dataclass(frozen=True)
class SimpleVector:
    scalar: FactoredRational
    vector: Triple3
    group: Optional[int] = None

    def component(self, k: int, i: int, l: int) -> Monomial:
        return component(self.vector, k, i, l)

    def shift(self, times: int = 1) -> "SimpleVector":
        return SimpleVector(fr_shift(self.scalar, times),
                            tuple(m.shift(times) for m in self.vector), self.group)

    def scaled(self, x: FactoredRational) -> "SimpleVector":
        return SimpleVector(fr_mul(self.scalar, x), self.vector, self.group)

    def same_as(self, other: "SimpleVector", k: int) -> bool:
        """Equality up to f[aP, aQ, aR] = f a^k [P, Q, R]."""
        for s in states(k):
            a = fr_mul(self.scalar, fr_monomial(self.component(k, s.i, s.l)))
            b = fr_mul(other.scalar, fr_monomial(other.component(k, s.i, s.l)))
            if self.component(k, s.i, s.l).is_zero != other.component(k, s.i, s.l).is_zero:
                return False
            if a != b and not fr_add(a, -b).is_zero:
                return False
        return True

    def __str__(self) -> str:
        vec = ", ".join(format_monomial(m) for m in self.vector)
        return f"{self.scalar} [{vec}]"


@dataclass
class VectorSum:
    terms: List[SimpleVector] = field(default_factory=list)
    routes: List[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "VectorSum") -> "VectorSum":
        return VectorSum(self.terms + other.terms, self.routes + other.routes)

    def __str__(self) -> str:
        return "\n".join(str(t) for t in self.terms) or "0"


def simple(vector: Sequence[Monomial], scalar: FactoredRational = FR_ONE) -> SimpleVector:
    return SimpleVector(scalar, tuple(vector))


INITIAL = (ONE, ZERO, mono(0, 0, 1))          # [1, 0, z2]


def symbolic_vector() -> Triple3:
    return (Monomial.symbol("P"), Monomial.symbol("Q"), Monomial.symbol("R"))


# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------

MACROS = {
    "L": (("C", "D"), ("D",), ("B", "D", "E")),
    "Lbar": (("D",), ("B", "D", "E"), ("C", "D")),
}

_TOKEN = re.compile(r"\s*(?:\(([^()]*)\)|(Lbar|L|[A-E][12]?))(?:\^(\d+))?")


@dataclass(frozen=True)
class OperatorWord:
    """Steps in written order; each step is a sorted tuple of letters."""

    steps: Tuple[Tuple[str, ...], ...] = ()

    def __mul__(self, other: "OperatorWord") -> "OperatorWord":
        return OperatorWord(self.steps + other.steps)

    def __pow__(self, n: int) -> "OperatorWord":
        if n < 0:
            raise ValueError("negative power of a word")
        return OperatorWord(self.steps * n)

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def is_single_letter(self) -> bool:
        return all(len(s) == 1 for s in self.steps)

    def __str__(self) -> str:
        if not self.steps:
            return "1"
        out = []
        for s in self.steps:
            out.append(s[0] if len(s) == 1 else "(" + "+".join(s) + ")")
        return " ".join(out)


def _step(letters: Iterable[str]) -> Tuple[str, ...]:
    letters = tuple(sorted(set(letters)))
    for x in letters:
        if x not in LETTERS and x not in EXTRA_LETTERS:
            raise ValueError(f"unknown operator {x!r}")
    if not letters:
        raise ValueError("empty step")
    return letters


def parse_word(text: str) -> OperatorWord:
    """Parse e.g. ``D^2 (C+D) D (B+D+E)``, ``CBCAE`` or ``A L^2 B``."""
    steps: List[Tuple[str, ...]] = []
    pos = 0
    text = text.strip()
    if text in ("", "1"):
        return OperatorWord()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse word at {text[pos:]!r}")
        group, letter, power = m.groups()
        times = int(power) if power else 1
        if group is not None:
            block = (_step(x.strip() for x in group.split("+")),)
        elif letter in MACROS:
            block = MACROS[letter]
        else:
            block = (_step([letter]),)
        steps.extend(block * times)
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return OperatorWord(tuple(steps))


def word(*parts) -> OperatorWord:
    """Concatenate words, strings and (string, power) pairs."""
    out = OperatorWord()
    for p in parts:
        if isinstance(p, OperatorWord):
            out = out * p
        elif isinstance(p, tuple):
            text, n = p
            out = out * (parse_word(text) ** n)
        else:
            out = out * parse_word(p)
    return out


# ---------------------------------------------------------------------------
# letters
# ---------------------------------------------------------------------------

_ZZ = mono(0, 1, 1)
_IZZ = mono(0, -1, -1)
_QIZ2 = mono(-1, 0, 1)

# factor (1 - const * top / bottom); top/bottom index P, Q, R or None
_FACTORS = {
    "A": (1, [], [(_ZZ, 1, 0), (ONE, 2, 1)], "A"),
    "B": (1, [(ONE, 1, 0)], [(_ZZ, 1, 0), (ONE, 1, 2), (ONE, 2, 0)], "B"),
    "C": (1, [], [(_IZZ, 0, 1), (ONE, 2, 1)], "C"),
    "D": (1, [(_IZZ, None, None)], [(_IZZ, 0, 1), (_IZZ, 2, 1), (ONE, 1, 2)], "D"),
    "E": (1, [], [(_ZZ, 1, 2), (ONE, 0, 2)], "E"),
    "B1": (1, [], [(_ZZ, 1, 0), (ONE, 2, 0)], "B"),
    "B2": (-1, [], [(_ZZ, 1, 0), (ONE, 2, 1)], "B"),
    "D1": (1, [], [(_IZZ, 0, 1), (_IZZ, 2, 1)], "D"),
    "D2": (-1, [], [(_IZZ, 0, 1), (ONE, 2, 1)], "D"),
}


def _new_vector(kind: str, v: Triple3) -> Triple3:
    P, Q, R = v
    third = _QIZ2 * P
    return {
        "A": (P, Q, third),
        "B": (P, R, third),
        "C": (_ZZ * Q, Q, third),
        "D": (_ZZ * Q, R, third),
        "E": (R, R, third),
    }[kind]


_INF = object()


def _ratio(const: Monomial, top: Optional[int], bottom: Optional[int], v: Triple3, name: str):
    t = ONE if top is None else v[top]
    b = ONE if bottom is None else v[bottom]
    if b.is_zero:
        if t.is_zero:
            raise Undefined(name, "0/0", "indeterminate quotient")
        return _INF
    return const * t / b


def apply_letter(G: str, v: SimpleVector, strict: bool = True) -> Optional[SimpleVector]:
    """One extremal operator on a simple vector; None when the result is zero.

    Zero components follow limit rules: X/0 is infinite and a denominator
    (1 - inf) kills the term, 0/X is zero and (1 - 0) = 1.  Factors are
    classified after the shift; a Unit or Indeterminate denominator raises
    Undefined (with ``strict``; symbolic factors are always accepted).
    """
    if G not in _FACTORS:
        raise ValueError(f"unknown operator {G!r}")
    if v.scalar.is_zero:
        return None
    coeff, nums, dens, kind = _FACTORS[G]
    num_ms, den_ms = [], []
    for const, top, bottom in dens:
        x = _ratio(const, top, bottom, v.vector, G)
        if x is _INF:
            return None
        if not x.is_zero:
            den_ms.append(x.shift())
    for const, top, bottom in nums:
        x = _ratio(const, top, bottom, v.vector, G)
        if x is _INF:
            raise Undefined(G, "inf", "infinite numerator")
        if not x.is_zero:
            num_ms.append(x.shift())
    for x in den_ms:
        if x.sym:
            continue
        cls = classify_monomial(x)
        if cls is MonomialClass.UNIT:
            raise Undefined(G, f"(1 - {format_monomial(x)})", "vanishing")
        if strict and cls is MonomialClass.INDETERMINATE:
            raise Undefined(G, f"(1 - {format_monomial(x)})", "indeterminate")
    for x in num_ms:
        if x.is_one:
            return None
    lin: Dict[Monomial, int] = {}
    for x in num_ms:
        lin[x] = lin.get(x, 0) + 1
    for x in den_ms:
        lin[x] = lin.get(x, 0) - 1
    try:
        factor = make_fr(coeff, ONE, lin)
    except DivisionByVanishingFactor as exc:
        raise Undefined(G, "(1 - 1)", "vanishing") from exc
    scalar = fr_mul(fr_shift(v.scalar), factor)
    if scalar.is_zero:
        return None
    vec = tuple(m.shift() for m in _new_vector(kind, v.vector))
    return SimpleVector(scalar, vec, v.group)


_group_ids = itertools.count(1)


def _deform(v: SimpleVector) -> SimpleVector:
    """Move Q and R off the special locus by independent shift-invariant symbols."""
    P, Q, R = v.vector
    t1 = Monomial.symbol(DEFORM[0], None)
    t2 = Monomial.symbol(DEFORM[1], None)
    return SimpleVector(v.scalar, (P, Q * t1, R * t2), next(_group_ids))


def apply_step(step: Sequence[str], v: SimpleVector, position: Optional[int] = None,
               routes: Optional[List[str]] = None) -> List[SimpleVector]:
    """Apply a sum of letters.  If a letter hits a vanishing factor, the step is
    retried on a deformed vector; the poles are then resolved when the deformed
    terms are summed component by component."""
    out = []
    try:
        for G in step:
            r = apply_letter(G, v)
            if r is not None:
                out.append(r)
        return out
    except Undefined as exc:
        exc.position = position
        if len(step) == 1 or exc.reason != "vanishing" or v.group is not None:
            raise Undefined(exc.operator, exc.factor, exc.reason, position) from None
    w = _deform(v)
    out = []
    for G in step:
        r = apply_letter(G, w)
        if r is not None:
            out.append(r)
    if routes is not None:
        routes.append(f"step {position} ({'+'.join(step)}): summed over deformed terms")
    return out


def apply_word(w, v) -> VectorSum:
    """Rightmost step first.  ``v`` may be a SimpleVector, a VectorSum or a triple."""
    if isinstance(w, str):
        w = parse_word(w)
    if isinstance(v, SimpleVector):
        terms = [v]
        routes: List[str] = []
    elif isinstance(v, VectorSum):
        terms = list(v.terms)
        routes = list(v.routes)
    else:
        terms = [simple(v)]
        routes = []
    n = len(w.steps)
    for idx in range(n - 1, -1, -1):
        step = w.steps[idx]
        nxt = []
        for t in terms:
            nxt.extend(apply_step(step, t, idx + 1, routes))
        terms = nxt
    return VectorSum(terms, routes)


# ---------------------------------------------------------------------------
# the tail vector
# ---------------------------------------------------------------------------

def f_scalar(n: int) -> FactoredRational:
    """(-1)^(n-1) q^(n(n-1)/2) (1 - q^2n z1 z2^2)
       / ((q)_inf (q^(n+1) z1 z2^2)_inf (q)_(n-1) (1 - q^n z2))."""
    if n < 1:
        raise ValueError("n >= 1")
    lin = {mono(2 * n, 1, 2): 1, mono(n, 0, 1): -1}
    for j in range(1, n):
        lin[mono(j, 0, 0)] = lin.get(mono(j, 0, 0), 0) - 1
    inf = {mono(1, 0, 0): -1, mono(n + 1, 1, 2): -1}
    return make_fr((-1) ** (n - 1), mono(n * (n - 1) // 2, 0, 0), lin, inf)


def v_vector(n: int) -> Triple3:
    return (ONE, mono(n, 0, 1), mono(0, 0, 1))


def v_term(n: int) -> SimpleVector:
    return SimpleVector(f_scalar(n), v_vector(n))


def vinf_count(qmax: int) -> int:
    """Number of terms n >= 1 with n(n-1)/2 <= qmax."""
    n = 1
    while (n + 1) * n // 2 <= qmax:
        n += 1
    return n


def v_infinity(policy: TruncationPolicy, extra: int = 0) -> VectorSum:
    return VectorSum([v_term(n) for n in range(1, vinf_count(policy.qmax) + extra + 1)])


# ---------------------------------------------------------------------------
# expansion
# ---------------------------------------------------------------------------

def term_bound(t: SimpleVector, k: int) -> Optional[int]:
    """Lower bound on the q-degree of every term t contributes at level k."""
    comps = [t.component(k, s.i, s.l) for s in states(k)]
    comps = [c for c in comps if not c.is_zero]
    if not comps or t.scalar.is_zero:
        return None
    return q_valuation_bound(t.scalar) + min(c.q for c in comps)


def _work_policy(policy: TruncationPolicy, comps: List[Monomial]) -> Optional[TruncationPolicy]:
    qmax = policy.qmax - min(c.q for c in comps)
    if qmax < 0:
        return None
    z1min = None if policy.z1min is None else policy.z1min - max(c.z1 for c in comps)
    z2max = None
    if policy.z2max is not None:
        z2max = policy.z2max - min(c.z2 for c in comps)
        if z2max < 0:
            return None
    return TruncationPolicy(qmax, z1min, z2max)


def _expand_term(t: SimpleVector, k: int, policy: TruncationPolicy,
                 out: Dict) -> None:
    comps = {s: t.component(k, s.i, s.l) for s in states(k)}
    live = [c for c in comps.values() if not c.is_zero]
    if not live:
        return
    if q_valuation_bound(t.scalar) + min(c.q for c in live) > policy.qmax:
        return
    work = _work_policy(policy, live)
    if work is None:
        return
    f = fr_to_series(t.scalar, work)
    for s, c in comps.items():
        if c.is_zero:
            continue
        g = f.times_monomial(c, policy=policy)
        out[s] = out[s] + g


def _resolve_group(terms: List[SimpleVector], k: int, policy: TruncationPolicy, out: Dict) -> None:
    for s in states(k):
        total = FR_ZERO
        for t in terms:
            c = t.component(k, s.i, s.l)
            if c.is_zero:
                continue
            total = fr_add(total, fr_mul(t.scalar, fr_monomial(c)))
        try:
            for name in DEFORM:
                total = fr_substitute_one(total, name)
        except DivisionByVanishingFactor as exc:
            raise Undefined("sum", "(1 - 1)", "vanishing after summation") from exc
        if total.is_zero:
            continue
        if q_valuation_bound(total) > policy.qmax:
            continue
        out[s] = out[s] + fr_to_series(total, policy)


def resolve_groups(vs: VectorSum, k: int) -> Dict[Tuple[int, int], List[FactoredRational]]:
    """Per-component summed scalars of every deformed group, evaluated at t = 1.

    Works for symbolic vectors as well; raises Undefined if a pole survives."""
    groups: Dict[int, List[SimpleVector]] = {}
    for t in vs.terms:
        if t.group is not None:
            groups.setdefault(t.group, []).append(t)
    out: Dict[Tuple[int, int], List[FactoredRational]] = {}
    for gid, terms in groups.items():
        for s in states(k):
            total = FR_ZERO
            for t in terms:
                c = t.component(k, s.i, s.l)
                if not c.is_zero:
                    total = fr_add(total, fr_mul(t.scalar, fr_monomial(c)))
            try:
                for name in DEFORM:
                    total = fr_substitute_one(total, name)
            except DivisionByVanishingFactor as exc:
                raise Undefined("sum", "(1 - 1)", "vanishing after summation") from exc
            out.setdefault((s.i, s.l), []).append(total)
    return out


def to_character(vs, k: int, policy: TruncationPolicy) -> CharacterVector:
    if isinstance(vs, SimpleVector):
        vs = VectorSum([vs])
    out = {s: TruncatedSeries.zero(policy) for s in states(k)}
    groups: Dict[int, List[SimpleVector]] = {}
    for t in vs.terms:
        if t.group is None:
            _expand_term(t, k, policy, out)
        else:
            groups.setdefault(t.group, []).append(t)
    for terms in groups.values():
        _resolve_group(terms, k, policy, out)
    return CharacterVector(k, out, policy)


# ---------------------------------------------------------------------------
# words on the tail vector
# ---------------------------------------------------------------------------

@lru_cache(maxsize=100_000)
def _word_on_vn(steps: Tuple[Tuple[str, ...], ...], n: int) -> Tuple[Tuple[SimpleVector, ...], Tuple[str, ...]]:
    if not steps:
        return (v_term(n),), ()
    inner, routes = _word_on_vn(steps[1:], n)
    routes = list(routes)
    out: List[SimpleVector] = []
    for t in inner:
        out.extend(apply_step(steps[0], t, None, routes))
    return tuple(out), tuple(routes)


def apply_word_vn(w: OperatorWord, n: int) -> VectorSum:
    terms, routes = _word_on_vn(w.steps, n)
    return VectorSum(list(terms), list(routes))


def word_on_vinf(w, k: int, policy: TruncationPolicy, quiet: int = 2) -> CharacterVector:
    """Expand w v_inf.

    Terms f_n v_n are added for n = 1, 2, ... at least up to the count where the
    q^(n(n-1)/2) prefactor alone exceeds qmax, and then until ``quiet``
    consecutive n contribute nothing below qmax (operators can lower q-degrees).
    """
    if isinstance(w, str):
        w = parse_word(w)
    total = CharacterVector.zero(k, policy)
    base = vinf_count(policy.qmax)
    n = 1
    silent = 0
    while True:
        vs = apply_word_vn(w, n)
        bounds = [b for b in (term_bound(t, k) for t in vs.terms) if b is not None]
        live = any(b <= policy.qmax for b in bounds)
        if live:
            total = total + to_character(vs, k, policy)
            silent = 0
        else:
            silent += 1
        if n >= base and silent >= quiet:
            return total
        n += 1
        if n > base + 200:
            raise RuntimeError("tail vector expansion did not settle")


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def initial_closed_form(N: int, k: int, policy: TruncationPolicy,
                        printed: bool = False) -> CharacterVector:
    """chi^(0), chi^(1), chi^(2) from their bracket forms.

    chi^(2) = [1, q z2, z2] / (1 - q z2) + [q z2, q z2, z2] / (1 - (q z2)^-1).
    With ``printed`` the second vector is [q z2, z2, z2], which only agrees
    on the diagonal i = l.
    """
    qz2 = mono(1, 0, 1)
    if N == 0:
        return to_character(simple((ONE, ZERO, ZERO)), k, policy)
    if N == 1:
        return to_character(simple(INITIAL), k, policy)
    if N != 2:
        raise ValueError("closed forms exist for N <= 2 only")
    second = (qz2, mono(0, 0, 1), mono(0, 0, 1)) if printed else (qz2, qz2, mono(0, 0, 1))
    return to_character(VectorSum([
        SimpleVector(make_fr(1, ONE, {qz2: -1}), (ONE, qz2, mono(0, 0, 1))),
        SimpleVector(make_fr(1, ONE, {qz2.inverse(): -1}), second),
    ]), k, policy)


def initial_sum_form(k: int, policy: TruncationPolicy) -> CharacterVector:
    """chi^(2)_(i,l) = sum_{j=0}^{k-l} q^(l-i+j) z2^(l+j)."""
    comps = {}
    for s in states(k):
        comps[s] = TruncatedSeries({(s.l - s.i + j, 0, s.l + j): 1 for j in range(k - s.l + 1)}, policy)
    return CharacterVector(k, comps, policy)


def pentagon_check(v: SimpleVector, k: int, policy: TruncationPolicy) -> bool:
    """M S(v) against (A + B + C + D + E) v, both expanded."""
    lhs = transfer_step(build_matrix(k), to_character(v, k, policy))
    rhs = to_character(apply_word("(A+B+C+D+E)", v), k, policy)
    return lhs == rhs


def split_check(v: SimpleVector, k: int, policy: TruncationPolicy) -> bool:
    """B = B1 + B2 and D = D1 + D2 on v."""
    ok = True
    for whole, parts in (("B", ("B1", "B2")), ("D", ("D1", "D2"))):
        lhs = to_character(apply_word(whole, v), k, policy)
        rhs = CharacterVector.zero(k, policy)
        for p in parts:
            rhs = rhs + to_character(apply_word(p, v), k, policy)
        ok = ok and lhs == rhs
    return ok


__all__ = [
    "Undefined", "SimpleVector", "VectorSum", "OperatorWord", "parse_word", "word",
    "apply_letter", "apply_step", "apply_word", "f_scalar", "v_vector", "v_term",
    "v_infinity", "vinf_count", "to_character", "word_on_vinf", "apply_word_vn",
    "pentagon_check", "split_check", "resolve_groups", "component", "simple",
    "symbolic_vector", "INITIAL", "LETTERS", "MACROS", "term_bound",
]
