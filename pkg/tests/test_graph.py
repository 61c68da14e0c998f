import itertools
import random

import pytest

from sl2bosonic.graph import (
    IDENTITY,
    SIGMA,
    VERTICES,
    arrow_groups,
    arrows,
    compose,
    enumerate_good_words,
    export_dot,
    floor,
    image,
    is_good_path,
    letter_choices,
    shape_word,
    sigma_word,
    stays_above_floor,
    trace_path,
)
from sl2bosonic.operators import LETTERS, parse_word


def test_sigma_basics():
    assert sigma_word("") == IDENTITY
    assert sigma_word("A") == (1, 2, 1)
    assert sigma_word("ACB") == (3, 3, 3)
    with pytest.raises(ValueError):
        sigma_word("(A+B)")


def test_path_acb():
    assert trace_path("ACB") == [(1, 2, 3), (1, 2), (2,), (3,)]
    assert trace_path("") == [(1, 2, 3)]


@pytest.mark.parametrize("length", range(1, 5))
def test_path_endpoint_is_sigma_image(length):
    for letters in itertools.product(LETTERS, repeat=length):
        w = "".join(letters)
        assert trace_path(w)[-1] == image(sigma_word(w), (1, 2, 3))


def test_anti_homomorphism():
    rng = random.Random(3)
    for _ in range(300):
        u = "".join(rng.choice(LETTERS) for _ in range(rng.randint(0, 6)))
        v = "".join(rng.choice(LETTERS) for _ in range(rng.randint(0, 6)))
        # sigma_{uv} = sigma_v o sigma_u, i.e. apply u's map first
        assert sigma_word(u + v) == compose(sigma_word(u), sigma_word(v))


def test_vertices_and_floors():
    assert len(VERTICES) == 7
    for src, _, dst in arrows():
        assert floor(dst) <= floor(src)


def test_arrow_groups():
    assert arrow_groups((1, 2, 3)) == [(x,) for x in LETTERS]
    assert arrow_groups((2, 3)) == [("A", "C"), ("B", "D", "E")]
    assert arrow_groups((3,)) == [tuple(LETTERS)]
    assert arrow_groups((1,)) == [("A", "B"), ("C", "D"), ("E",)]


def test_top_vertex_targets():
    top = {g: dst for src, g, dst in arrows() if src == (1, 2, 3)}
    assert top[("D",)] == (1, 2, 3)
    assert top[("A",)] == top[("C",)] == (1, 2)
    assert top[("B",)] == top[("E",)] == (1, 3)


def test_grouped_letters_share_targets():
    for I in VERTICES:
        for g in arrow_groups(I):
            assert len({image(SIGMA[G], I) for G in g}) == 1


def test_dot_export():
    text = export_dot()
    assert text == export_dot()
    assert text.count("->") == len(arrows())
    assert '"(3)" -> "(1)" [label="A+B+C+D+E"];' in text
    for v in VERTICES:
        assert '"(' + "".join(map(str, v)) + ')"' in text


def test_shape_words():
    assert shape_word(1, 0, 0, 0) == parse_word("B")
    assert shape_word(3, 0, 0, 0) == parse_word("E")
    assert shape_word(5, 1, 0, 1) == parse_word("D A D (B+D+E) L")
    with pytest.raises(ValueError):
        shape_word(6, 0, 0, 0)


def test_good_words_avoid_bottom_floor():
    words = enumerate_good_words(2, 2, 2)
    assert len(words) == 5 * 27
    for fam, w in words:
        assert stays_above_floor(w), str(fam)
        for c in letter_choices(w):
            assert trace_path(c)[-1] == (1, 3)


def test_exploratory_predicate_on_families():
    for fam, w in enumerate_good_words(1, 1, 1):
        assert is_good_path(w), str(fam)
    assert not is_good_path("A")
    assert is_good_path("C B")
    assert not is_good_path("C C")
