"""Brute-force oracle: integer points of the constraint polytope and their weights.

A configuration is a pair of sequences a = (a_0, a_1, ...), b = (b_0, b_1, ...)
with a_0 = i, b_0 = 0 and finitely many non-zero entries.  Boundary values are
b_{-1} = l, b_inf = k and a_{-1} = a_inf = 0.  The constraints are

    a_r + b_{r+1} + a_{r+1} <= k,      b_r + a_r + b_{r+1} <= k      (r >= 0)
    sum_{s=m}^{n} b_s <= k + sum_{s=m+1}^{n-2} a_s                   (-1 <= m < n <= inf)

For n = inf the b_inf = k term cancels the k on the right, leaving
sum_{s=m}^{R} b_s <= sum_{s=m+1}^{R} a_s with R the last index of the support.
For finite n > R + 2 both sides have stopped changing, so n <= R + 2 suffices;
m > R gives 0 <= k.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

from .series import Monomial, TruncatedSeries, TruncationPolicy, mono, substitute_z, QZSeries


class InvalidConfig(ValueError):
    """Boundary values a_0 = i, b_0 = 0 or non-negativity violated."""


@dataclass(frozen=True)
class PathConfig:
    k: int
    l: int
    i: int
    a: Tuple[int, ...]
    b: Tuple[int, ...]

    def weight(self) -> Monomial:
        return config_weight(self.a, self.b)


def config_weight(a: Sequence[int], b: Sequence[int]) -> Monomial:
    """q^{sum j(a_j+b_j)} z1^{sum b} z2^{sum (a+b)}."""
    qdeg = sum(j * (x + y) for j, (x, y) in enumerate(_pairs(a, b)))
    return mono(qdeg, sum(b), sum(a) + sum(b))


def _pairs(a, b):
    n = max(len(a), len(b))
    for j in range(n):
        yield (a[j] if j < len(a) else 0, b[j] if j < len(b) else 0)


def _interval_ok(a: List[int], b: List[int], k: int, l: int, n: int) -> bool:
    """All finite interval constraints with right end n (index -1 maps to b_{-1} = l)."""
    def bv(s):
        if s == -1:
            return l
        return b[s] if s < len(b) else 0

    def av(s):
        if s < 0:
            return 0
        return a[s] if s < len(a) else 0

    lhs = 0
    rhs = 0
    # walk m downward from n-1 to -1, growing both sums
    lhs = bv(n)
    for m in range(n - 1, -2, -1):
        lhs += bv(m)
        if m + 1 <= n - 2:
            rhs += av(m + 1)
        if lhs > k + rhs:
            return False
    return True


def _tail_ok(a: List[int], b: List[int], l: int) -> bool:
    """The n = inf family: sum_{s=m}^{R} b_s <= sum_{s=m+1}^{R} a_s for m >= -1."""
    R = max(len(a), len(b)) - 1
    lhs = 0
    rhs = 0
    for m in range(R, -2, -1):
        lhs += l if m == -1 else (b[m] if m < len(b) else 0)
        if m + 1 <= R:
            rhs += a[m + 1] if m + 1 < len(a) else 0
        if lhs > rhs:
            return False
    return True


def _pair_ok(a: List[int], b: List[int], k: int, r: int) -> bool:
    def g(seq, s):
        return seq[s] if 0 <= s < len(seq) else 0
    return (g(a, r) + g(b, r + 1) + g(a, r + 1) <= k and
            g(b, r) + g(a, r) + g(b, r + 1) <= k)


def is_admissible(a: Sequence[int], b: Sequence[int], k: int, l: int, i: int) -> bool:
    if not (0 <= i <= l <= k):
        raise InvalidConfig(f"need 0 <= i <= l <= k, got i={i}, l={l}, k={k}")
    a = list(a) or [0]
    b = list(b) or [0]
    if any(x < 0 for x in a) or any(x < 0 for x in b):
        raise InvalidConfig("entries must be non-negative")
    if a[0] != i or b[0] != 0:
        raise InvalidConfig("boundary values must be a_0 = i and b_0 = 0")
    R = max(len(a), len(b)) - 1
    a = a + [0] * (R + 1 - len(a))
    b = b + [0] * (R + 1 - len(b))
    for r in range(0, R + 1):
        if not _pair_ok(a, b, k, r):
            return False
    for n in range(0, R + 3):
        if not _interval_ok(a, b, k, l, n):
            return False
    return _tail_ok(a, b, l)


def enumerate_configs(k: int, l: int, i: int, qmax: int) -> Iterator[Tuple[PathConfig, Monomial]]:
    """Depth-first over j = 1, 2, ... with j (a_j + b_j) bounded by the q budget.

    Constraints whose indices are all fixed are checked as soon as possible;
    the tail family and the last pair/interval constraints at the end.
    """
    if not (0 <= i <= l <= k):
        raise InvalidConfig(f"need 0 <= i <= l <= k, got i={i}, l={l}, k={k}")
    if qmax < 0:
        return
    a = [i]
    b = [0]

    def finish():
        R = len(a) - 1
        aa, bb = list(a), list(b)
        while R > 0 and aa[R] == 0 and bb[R] == 0:
            R -= 1
            aa.pop()
            bb.pop()
        if not _pair_ok(a, b, k, len(a) - 1):
            return None
        for n in (len(a), len(a) + 1):
            if not _interval_ok(a, b, k, l, n):
                return None
        if not _tail_ok(a, b, l):
            return None
        return PathConfig(k, l, i, tuple(aa), tuple(bb))

    def walk(j: int, budget: int):
        if budget < j:
            cfg = finish()
            if cfg is not None:
                yield cfg, cfg.weight()
            return
        cap = budget // j
        for total in range(0, cap + 1):
            for aj in range(0, min(total, k) + 1):
                bj = total - aj
                if bj > k:
                    continue
                a.append(aj)
                b.append(bj)
                if _pair_ok(a, b, k, j - 1) and _interval_ok(a, b, k, l, j):
                    yield from walk(j + 1, budget - j * total)
                a.pop()
                b.pop()

    # j = 0 prefix: pair constraint at r = -1 holds trivially (l <= k); the
    # interval constraints ending at n = 0 involve only b_{-1} + b_0 = l <= k.
    yield from walk(1, qmax)


def oracle_character(k: int, l: int, i: int, policy: TruncationPolicy) -> TruncatedSeries:
    terms = {}
    for _, w in enumerate_configs(k, l, i, policy.qmax):
        key = w.triple
        terms[key] = terms.get(key, 0) + 1
    return TruncatedSeries(terms, policy)


def oracle_vector(k: int, policy: TruncationPolicy):
    from .transfer import CharacterVector, states
    return CharacterVector(k, {s: oracle_character(k, s.l, s.i, policy) for s in states(k)}, policy)


def full_character(k: int, l: int, policy: TruncationPolicy) -> QZSeries:
    """chi_l(q, z) = sum_i chi_{i,l}(q, z, 1/z)."""
    if not (0 <= l <= k):
        raise InvalidConfig(f"need 0 <= l <= k, got l={l}, k={k}")
    total = QZSeries({}, policy.qmax)
    for i in range(l + 1):
        total = total + substitute_z(oracle_character(k, l, i, policy))
    return total
