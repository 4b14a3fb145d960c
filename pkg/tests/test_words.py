import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import word_terms
from lotl.errors import InfiniteTermError, ParseError, ShapeError
from lotl.words import (
    EMPTY, Concat, Lit, NegOmegaPow, OmegaPow, Shuffle, ap_letter, concat, is_finite, letters,
    parse_letter, parse_term, power_set, project, render_term, reverse_term,
    simplify, to_finite, word, zip_terms,
)


def test_letters():
    assert parse_letter("{}") == frozenset()
    assert parse_letter("{b, a}") == ap_letter("a", "b")
    assert parse_letter("<1,0>") == (1, 0)
    assert parse_letter("1") == 1


def test_power_set_order_is_stable():
    assert power_set(["b", "a"]) == power_set(["a", "b"])
    assert len(power_set(["a", "b", "c"])) == 8
    assert power_set([])[0] == frozenset()


def test_finite_term():
    t = parse_term("{a} {} {a,b}")
    assert is_finite(t)
    assert to_finite(t) == (ap_letter("a"), frozenset(), ap_letter("a", "b"))


def test_empty_term():
    assert parse_term("") == EMPTY
    assert to_finite(EMPTY) == ()


def test_shapes_render():
    assert render_term(parse_term("{a} {}^w {a} {}^w {a}")) == "{a} {}^w {a} {}^w {a}"
    assert render_term(parse_term("sh({a}, {b}^w) {}^-w")) == "sh({a}, {b}^w) {}^-w"


def test_reverse_swaps_powers():
    t = parse_term("sh({a}, {b}^w) {}^-w")
    assert render_term(reverse_term(t)) == "{}^w sh({a}, {b}^-w)"


def test_simplify_rolls_repetitions():
    assert render_term(simplify(parse_term("(0 1)(0 1)^w"))) == "(0 1)^w"


def test_zip_and_project():
    z = zip_terms(parse_term("0 1^w"), parse_term("1 0^w"))
    assert render_term(z) == "<0,1> <1,0>^w"
    assert render_term(project(parse_term("<0,1> <1,1>^w"), 0)) == "0 1^w"


@pytest.mark.parametrize("text", ["()^w", "sh()", "0 ^", "<0", "{A}", "0)"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_term(text)


def test_zip_shape_mismatch():
    with pytest.raises(ShapeError):
        zip_terms(parse_term("0 1^w"), parse_term("1^w"))


def test_to_finite_rejects_infinite():
    with pytest.raises(InfiniteTermError):
        to_finite(parse_term("0^w"))


def test_powers_of_empty_are_rejected():
    with pytest.raises(ShapeError):
        OmegaPow(EMPTY)
    with pytest.raises(ShapeError):
        Shuffle((EMPTY,))


@given(word_terms())
def test_render_parse_roundtrip(t):
    # equal up to the grouping of concatenations
    u = parse_term(render_term(t))
    assert render_term(u) == render_term(t)
    assert parse_term(render_term(u)) == u


@given(word_terms())
def test_reverse_is_an_involution(t):
    assert reverse_term(reverse_term(t)) == t


@given(word_terms())
def test_simplify_is_idempotent(t):
    s = simplify(t)
    assert simplify(s) == s
    assert letters(s) == letters(t)


@given(word_terms())
def test_zip_then_project(t):
    flipped = _map_letters(t, lambda a: 1 - a)
    z = zip_terms(t, flipped)
    assert project(z, 0) == t
    assert project(z, 1) == flipped


@given(st.lists(st.sampled_from([0, 1]), max_size=8))
def test_finite_words_roundtrip(w):
    t = word(w)
    assert to_finite(t) == tuple(w)
    assert to_finite(reverse_term(t)) == tuple(reversed(w))
    assert to_finite(simplify(t)) == tuple(w)


def _map_letters(t, f):
    if isinstance(t, Lit):
        return Lit(f(t.letter))
    return _rebuild(t, lambda s: _map_letters(s, f))


def _rebuild(t, g):
    if isinstance(t, Concat):
        return Concat(g(t.left), g(t.right))
    if isinstance(t, OmegaPow):
        return OmegaPow(g(t.body))
    if isinstance(t, NegOmegaPow):
        return NegOmegaPow(g(t.body))
    if isinstance(t, Shuffle):
        return Shuffle(tuple(g(b) for b in t.bodies))
    return t
