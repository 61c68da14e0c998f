"""Summation graph: sigma maps, paths of words, arrow groups and DOT export.

Vertices are non-empty subsets of {1, 2, 3}.  A word is read left to right as
a path starting at (1,2,3); letter G sends vertex I to sigma_G(I).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple

from .operators import LETTERS, OperatorWord, parse_word, word

SIGMA: Dict[str, Tuple[int, int, int]] = {
    "A": (1, 2, 1),
    "B": (1, 3, 1),
    "C": (2, 2, 1),
    "D": (2, 3, 1),
    "E": (3, 3, 1),
}

# Vector parts of G[P, Q, R] before the shift; "z" stands for z1 z2 and "x"
# for the common third entry q^-1 z2 P.
TEMPLATES: Dict[str, Tuple[str, str, str]] = {
    "A": ("P", "Q", "x"),
    "B": ("P", "R", "x"),
    "C": ("zQ", "Q", "x"),
    "D": ("zQ", "R", "x"),
    "E": ("R", "R", "x"),
}

Vertex = Tuple[int, ...]
TOP: Vertex = (1, 2, 3)
IDENTITY = (1, 2, 3)


def vertex(items) -> Vertex:
    v = tuple(sorted(set(items)))
    if not v or any(x not in (1, 2, 3) for x in v):
        raise ValueError(f"not a vertex: {items!r}")
    return v


VERTICES: List[Vertex] = sorted((vertex(c) for r in (3, 2, 1)
                                 for c in itertools.combinations((1, 2, 3), r)),
                                key=lambda v: (-len(v), v))


def floor(v: Vertex) -> int:
    return len(v)


def compose(first: Tuple[int, int, int], then: Tuple[int, int, int]) -> Tuple[int, int, int]:
    """The map i -> then(first(i))."""
    return tuple(then[first[i] - 1] for i in range(3))


def _letters(w) -> List[str]:
    if isinstance(w, str):
        w = parse_word(w)
    out = []
    for step in w.steps:
        if len(step) != 1:
            raise ValueError("sigma maps need single-letter steps")
        if step[0] not in SIGMA:
            raise ValueError(f"no sigma map for {step[0]}")
        out.append(step[0])
    return out


def sigma_word(w) -> Tuple[int, int, int]:
    """sigma_{M1 M2} = sigma_{M2} sigma_{M1}: compose left to right."""
    out = IDENTITY
    for G in _letters(w):
        out = compose(out, SIGMA[G])
    return out


def image(sigma: Tuple[int, int, int], I: Vertex) -> Vertex:
    return vertex(sigma[i - 1] for i in I)


def trace_path(w) -> List[Vertex]:
    path = [TOP]
    for G in _letters(w):
        path.append(image(SIGMA[G], path[-1]))
    return path


def arrow_groups(I: Vertex) -> List[Tuple[str, ...]]:
    """Letters whose vector-part templates agree on every component in I."""
    I = vertex(I)
    groups: Dict[Tuple[str, ...], List[str]] = {}
    for G in LETTERS:
        key = tuple(TEMPLATES[G][i - 1] for i in I)
        groups.setdefault(key, []).append(G)
    return sorted((tuple(g) for g in groups.values()), key=lambda g: LETTERS.index(g[0]))


def arrows() -> List[Tuple[Vertex, Tuple[str, ...], Vertex]]:
    """Every grouped arrow as (source, letters, target)."""
    out = []
    for I in VERTICES:
        for g in arrow_groups(I):
            targets = {image(SIGMA[G], I) for G in g}
            assert len(targets) == 1, "grouped letters must share a target"
            out.append((I, g, targets.pop()))
    return out


def _name(v: Vertex) -> str:
    return "(" + "".join(str(x) for x in v) + ")"


def export_dot() -> str:
    lines = ["digraph summation {", "  rankdir=TB;"]
    for f in (3, 2, 1):
        members = " ".join(f'"{_name(v)}";' for v in VERTICES if floor(v) == f)
        lines.append(f"  {{ rank=same; {members} }}")
    for src, g, dst in arrows():
        lines.append(f'  "{_name(src)}" -> "{_name(dst)}" [label="{"+".join(g)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# good words
# ---------------------------------------------------------------------------

SHAPES = {
    1: "D^n A^m B L^s",
    2: "D^n C A^m B L^s",
    3: "D^n E^(m+1) L^s",
    4: "D^n C A^m D (B+D+E) L^s",
    5: "D^n A^(m+1) D (B+D+E) L^s",
}


def shape_word(shape: int, n: int, m: int, s: int) -> OperatorWord:
    if min(n, m, s) < 0:
        raise ValueError("parameters must be non-negative")
    if shape == 1:
        return word(("D", n), ("A", m), "B", ("L", s))
    if shape == 2:
        return word(("D", n), "C", ("A", m), "B", ("L", s))
    if shape == 3:
        return word(("D", n), ("E", m + 1), ("L", s))
    if shape == 4:
        return word(("D", n), "C", ("A", m), "D (B+D+E)", ("L", s))
    if shape == 5:
        return word(("D", n), ("A", m + 1), "D (B+D+E)", ("L", s))
    raise ValueError(f"unknown shape {shape}")


@dataclass(frozen=True)
class GoodFamily:
    shape: int
    n: int
    m: int
    s: int

    @property
    def word(self) -> OperatorWord:
        return shape_word(self.shape, self.n, self.m, self.s)

    def __str__(self) -> str:
        return f"{SHAPES[self.shape]} at (n,m,s)=({self.n},{self.m},{self.s})"


def enumerate_good_words(nmax: int, mmax: int, smax: int) -> List[Tuple[GoodFamily, OperatorWord]]:
    out = []
    for shape in SHAPES:
        for n in range(nmax + 1):
            for m in range(mmax + 1):
                for s in range(smax + 1):
                    fam = GoodFamily(shape, n, m, s)
                    out.append((fam, fam.word))
    return out


def letter_choices(w: OperatorWord) -> Iterator[OperatorWord]:
    """All single-letter words obtained by picking one letter per step."""
    for pick in itertools.product(*w.steps):
        yield OperatorWord(tuple((x,) for x in pick))


def stays_above_floor(w: OperatorWord) -> bool:
    """No choice of letters leads the path to the bottom floor."""
    return all(min(floor(v) for v in trace_path(c)) >= 2 for c in letter_choices(w))


_L_STEPS = (("C", "D"), ("D",), ("B", "D", "E"))


def is_good_path(w) -> bool:
    """Exploratory reading of the informal cycle rules.

    A path is good if it never reaches the bottom floor, ends at (1,3),
    does not contain both A cycles (A at (1,2)) and E cycles (E at (1,3)),
    and no A or E cycle comes after an L cycle (L starting at (1,3)).
    Grouped steps are allowed only as part of L or as a (B+D+E) step.
    """
    if isinstance(w, str):
        w = parse_word(w)
    if not stays_above_floor(w):
        return False
    where = TOP
    seen_a = seen_e = seen_l = False
    idx = 0
    steps = w.steps
    while idx < len(steps):
        if steps[idx:idx + 3] == _L_STEPS and where == (1, 3):
            seen_l = True
            idx += 3
            continue              # L returns to (1,3)
        step = steps[idx]
        nxt = {image(SIGMA[G], where) for G in step}
        if len(nxt) != 1:
            return False
        target = nxt.pop()
        if step == ("A",) and where == target == (1, 2):
            if seen_l:
                return False
            seen_a = True
        if step == ("E",) and where == target == (1, 3):
            if seen_l:
                return False
            seen_e = True
        where = target
        idx += 1
    if seen_a and seen_e:
        return False
    return where == (1, 3)
