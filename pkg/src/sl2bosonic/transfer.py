"""Transfer matrix, recursion for the truncated characters, and the fixed point.

States (i, l) with 0 <= i <= l <= k are ordered lexicographically in (l, i),
so for k = 1 the order is (0,0), (0,1), (1,1).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Tuple

from .series import (
    Monomial,
    ONE,
    TruncatedSeries,
    TruncationPolicy,
    format_monomial,
    mono,
    series_add,
    shift_z2,
)


class StabilizationFailure(RuntimeError):
    """Two consecutive iterates disagree inside the truncation window."""


@dataclass(frozen=True, order=True)
class StateIndex:
    i: int
    l: int

    def __iter__(self):
        yield self.i
        yield self.l


def states(k: int) -> List[StateIndex]:
    if k < 0:
        raise ValueError("level must be non-negative")
    return [StateIndex(i, l) for l in range(k + 1) for i in range(l + 1)]


def check_state(k: int, i: int, l: int) -> StateIndex:
    if not (0 <= i <= l <= k):
        raise ValueError(f"need 0 <= i <= l <= k, got i={i}, l={l}, k={k}")
    return StateIndex(i, l)


def matrix_entry(k: int, i: int, l: int, i2: int, l2: int):
    """Entry M_{i,l}^{i2,l2} as a Monomial, or None when it vanishes."""
    if not (l - i <= l2 <= k - i and i2 <= l2):
        return None
    qzz = mono(1, 1, 1)
    if i2 >= l - i:
        return (qzz ** (l2 - i2)) * (Monomial(0, 0, 1) ** i)
    return (qzz ** (l2 - l + i)) * (Monomial(0, 0, 1) ** i)


@dataclass(frozen=True)
class TransferMatrix:
    k: int
    entries: Mapping[Tuple[StateIndex, StateIndex], Monomial]

    def get(self, row: StateIndex, col: StateIndex):
        return self.entries.get((row, col))

    def rows(self) -> List[List[object]]:
        """Dense rows in state order; 0 marks an absent entry."""
        sts = states(self.k)
        return [[self.entries.get((r, c), 0) for c in sts] for r in sts]

    def at_z2_zero(self) -> "TransferMatrix":
        """M(0): drop every entry carrying a power of z2."""
        return TransferMatrix(self.k, {key: m for key, m in self.entries.items() if m.z2 == 0})

    def z2_graded(self) -> Dict[int, Dict[Tuple[StateIndex, StateIndex], Monomial]]:
        out: Dict[int, Dict] = {}
        for key, m in self.entries.items():
            out.setdefault(m.z2, {})[key] = m
        return out

    def format(self) -> str:
        rows = []
        for row in self.rows():
            rows.append("[" + ", ".join("0" if x == 0 else format_monomial(x) for x in row) + "]")
        return "\n".join(rows)


def build_matrix(k: int) -> TransferMatrix:
    entries = {}
    sts = states(k)
    for r in sts:
        for c in sts:
            m = matrix_entry(k, r.i, r.l, c.i, c.l)
            if m is not None:
                entries[(r, c)] = m
    return TransferMatrix(k, entries)


class CharacterVector:
    """All components chi_{i,l} for one level, sharing a truncation policy."""

    def __init__(self, k: int, components: Mapping[StateIndex, TruncatedSeries],
                 policy: TruncationPolicy):
        self.k = k
        self.policy = policy
        comps = {}
        for s in states(k):
            f = components.get(s)
            if f is None:
                f = TruncatedSeries.zero(policy)
            elif f.policy != policy:
                f = f.truncate(policy) if _narrower(policy, f.policy) else _refuse(f, policy)
            comps[s] = f
        extra = set(components) - set(comps)
        if extra:
            raise ValueError(f"invalid states for k={k}: {sorted(extra)}")
        self.components: Dict[StateIndex, TruncatedSeries] = comps

    @classmethod
    def zero(cls, k: int, policy: TruncationPolicy) -> "CharacterVector":
        return cls(k, {}, policy)

    @classmethod
    def delta(cls, k: int, policy: TruncationPolicy) -> "CharacterVector":
        return cls(k, {StateIndex(0, 0): TruncatedSeries.one(policy)}, policy)

    def __getitem__(self, key) -> TruncatedSeries:
        if not isinstance(key, StateIndex):
            key = StateIndex(*key)
        return self.components[key]

    def items(self) -> Iterator[Tuple[StateIndex, TruncatedSeries]]:
        for s in states(self.k):
            yield s, self.components[s]

    def __add__(self, other: "CharacterVector") -> "CharacterVector":
        self._check(other)
        return CharacterVector(self.k, {s: self.components[s] + other.components[s]
                                        for s in self.components}, self.policy)

    def __sub__(self, other: "CharacterVector") -> "CharacterVector":
        self._check(other)
        return CharacterVector(self.k, {s: self.components[s] - other.components[s]
                                        for s in self.components}, self.policy)

    def __neg__(self) -> "CharacterVector":
        return CharacterVector(self.k, {s: -f for s, f in self.components.items()}, self.policy)

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return all(f.is_zero() for f in self.components.values())
        if not isinstance(other, CharacterVector):
            return NotImplemented
        return self.k == other.k and self.policy == other.policy and self.components == other.components

    def is_zero(self) -> bool:
        return self == 0

    def truncate(self, policy: TruncationPolicy) -> "CharacterVector":
        return CharacterVector(self.k, {s: f.truncate(policy) for s, f in self.components.items()},
                               policy)

    def first_difference(self, other: "CharacterVector"):
        """Smallest (state, exponent triple, mine, theirs) where the two differ."""
        self._check(other)
        for s in states(self.k):
            a, b = self.components[s], other.components[s]
            keys = sorted(set(a.terms) | set(b.terms))
            for key in keys:
                if a.terms.get(key, 0) != b.terms.get(key, 0):
                    return s, key, a.terms.get(key, 0), b.terms.get(key, 0)
        return None

    def _check(self, other: "CharacterVector"):
        if self.k != other.k or self.policy != other.policy:
            raise ValueError("character vectors differ in level or policy")

    def __repr__(self) -> str:
        body = ", ".join(f"({s.i},{s.l}): {f!r}" for s, f in self.items())
        return f"CharacterVector(k={self.k}, {body})"


def _narrower(small: TruncationPolicy, big: TruncationPolicy) -> bool:
    if small.qmax > big.qmax:
        return False
    if big.z1min is not None and (small.z1min is None or small.z1min < big.z1min):
        return False
    if big.z2max is not None and (small.z2max is None or small.z2max > big.z2max):
        return False
    return True


def _refuse(f, policy):
    raise ValueError(f"component policy {f.policy} cannot be narrowed to {policy}")


def transfer_step(M: TransferMatrix, v: CharacterVector) -> CharacterVector:
    """(M . S v)_{i,l} = sum_{i',l'} M_{i,l}^{i',l'} S(v_{i',l'})."""
    if M.k != v.k:
        raise ValueError("matrix and vector levels differ")
    shifted = {s: shift_z2(f) for s, f in v.components.items()}
    out = {s: TruncatedSeries.zero(v.policy) for s in states(v.k)}
    for (row, col), m in M.entries.items():
        f = shifted[col]
        if f.is_zero():
            continue
        out[row] = series_add(out[row], f.times_monomial(m))
    return CharacterVector(v.k, out, v.policy)


def recursion_character(k: int, N: int, policy: TruncationPolicy) -> CharacterVector:
    if N < 0:
        raise ValueError("N must be non-negative")
    M = build_matrix(k)
    v = CharacterVector.delta(k, policy)
    for _ in range(N):
        v = transfer_step(M, v)
    return v


def limit_character(k: int, policy: TruncationPolicy) -> CharacterVector:
    """chi = lim chi^(N); iterates N = qmax+1 and qmax+2 must agree."""
    M = build_matrix(k)
    v = CharacterVector.delta(k, policy)
    for _ in range(policy.qmax + 1):
        v = transfer_step(M, v)
    w = transfer_step(M, v)
    if w != v:
        raise StabilizationFailure(f"iterates disagree at {v.first_difference(w)}")
    return w


def fixed_point_character(k: int, policy: TruncationPolicy) -> CharacterVector:
    """Solve chi(z2) = M(z2) chi(q z2) degree by degree in z2.

    With F_n the z2^n part, F_n = q^n M(0) F_n + sum_{d>=1} M_d S(F_{n-d}), and
    (1 - q^n M(0))^{-1} is a geometric series in q for n >= 1.
    """
    if policy.z2max is None:
        raise ValueError("fixed-point solution needs a z2 window")
    M = build_matrix(k)
    graded = M.z2_graded()
    m0 = graded.get(0, {})
    sts = states(k)
    zero = TruncatedSeries.zero(policy)
    parts: List[Dict[StateIndex, TruncatedSeries]] = []
    parts.append({s: (TruncatedSeries.one(policy) if s == StateIndex(0, 0) else zero) for s in sts})
    for n in range(1, policy.z2max + 1):
        rhs = {s: zero for s in sts}
        for d in range(1, n + 1):
            block = graded.get(d)
            if not block:
                continue
            prev = {s: shift_z2(f) for s, f in parts[n - d].items()}
            for (row, col), m in block.items():
                if not prev[col].is_zero():
                    rhs[row] = rhs[row] + prev[col].times_monomial(m)
        acc = dict(rhs)
        term = rhs
        qn = mono(n, 0, 0)
        while any(not f.is_zero() for f in term.values()):
            nxt = {s: zero for s in sts}
            for (row, col), m in m0.items():
                if not term[col].is_zero():
                    nxt[row] = nxt[row] + term[col].times_monomial(m * qn)
            term = nxt
            for s in sts:
                acc[s] = acc[s] + term[s]
        parts.append(acc)
    total = {s: zero for s in sts}
    for part in parts:
        for s in sts:
            total[s] = total[s] + part[s]
    return CharacterVector(k, total, policy)


def fixed_point_residual(chi: CharacterVector) -> CharacterVector:
    """chi - M . S(chi), which vanishes for the true character."""
    return chi - transfer_step(build_matrix(chi.k), chi)


__all__ = [
    "StabilizationFailure", "StateIndex", "states", "check_state", "matrix_entry",
    "TransferMatrix", "build_matrix", "CharacterVector", "transfer_step",
    "recursion_character", "limit_character", "fixed_point_character", "fixed_point_residual",
    "ONE",
]
