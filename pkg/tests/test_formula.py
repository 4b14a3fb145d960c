import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import core_formulas, finite_ap_words
from lotl.errors import ParseError, UnknownPropositionError
from lotl.formula import (
    FALSE, TRUE, Atom, Next, Not, Or, Since, StaviUntil, Until, atoms, depth,
    desugar, is_core, parse, parse_surface, render, size, subformulas,
    temporal_count,
)
from lotl.oracle import eval_finite


def test_atoms_and_constants():
    assert parse("a") == Atom("a")
    assert parse("true") == TRUE
    assert parse("false") == FALSE
    assert parse("p_1") == Atom("p_1")


def test_stavi_tokens_are_not_swallowed_by_atoms():
    assert parse("a U' b") == StaviUntil(Atom("a"), Atom("b"))
    assert parse("a U b") == Until(Atom("a"), Atom("b"))
    assert parse("a S b") == Since(Atom("a"), Atom("b"))


def test_negation_binds_tightest():
    assert parse("!a | b") == Or(Not(Atom("a")), Atom("b"))
    assert parse("!a U b") == Until(Not(Atom("a")), Atom("b"))


def test_temporal_binds_tighter_than_boolean():
    assert parse_surface("a | b U c") == Or(Atom("a"), Until(Atom("b"), Atom("c")))


def test_temporal_is_right_associative():
    assert parse("a U b U c") == Until(Atom("a"), Until(Atom("b"), Atom("c")))


def test_sugar_is_removed():
    assert parse("X a") == Until(FALSE, Atom("a"))
    assert parse("a & b") == Not(Or(Not(Atom("a")), Not(Atom("b"))))
    assert parse("a -> b") == Or(Not(Atom("a")), Atom("b"))
    assert parse("Y a") == Since(FALSE, Atom("a"))
    assert render(parse("F a")) == "a | true U a"
    assert render(parse("G a")) == "!(!a | true U !a)"


def test_surface_keeps_sugar():
    f = parse_surface("!a & G !(X a)")
    assert isinstance(f.right.child.child, Next)
    assert not is_core(f)
    assert is_core(desugar(f))


@pytest.mark.parametrize("text,offset", [
    ("a U", 3), ("(a", 2), ("a b", 2), ("A", 0), ("a | | b", 4), ("", 0),
])
def test_parse_errors_carry_offsets(text, offset):
    with pytest.raises(ParseError) as e:
        parse(text)
    assert e.value.offset == offset


def test_unknown_proposition():
    with pytest.raises(UnknownPropositionError):
        parse("a U c", props={"a", "b"})
    assert parse("a U b", props={"a", "b"}) == Until(Atom("a"), Atom("b"))


def test_measures():
    f = parse("a U (b S' !c)")
    assert atoms(f) == {"a", "b", "c"}
    assert depth(f) == 3  # negation counts as a level
    assert temporal_count(f) == 2
    assert size(f) == len(list(subformulas(f))) == 6


@given(core_formulas())
def test_render_parse_roundtrip(f):
    assert parse(render(f)) == f


@given(core_formulas())
def test_desugar_is_identity_on_core(f):
    assert desugar(f) == f


_SURFACE = st.sampled_from([
    "X a", "F a", "G a", "Y a", "O a", "H a", "a & b", "a -> b", "a Uns b", "a Sns b",
    "G (a -> F b)", "!a & G !(X a)",
])


@given(_SURFACE)
def test_surface_render_roundtrip(text):
    f = parse_surface(text)
    assert parse_surface(render(f)) == f


def _has(w, i, p):
    return 0 <= i < len(w) and p in w[i]


@given(finite_ap_words())
def test_sugar_semantics(w):
    """Each abbreviation means what its name says, position by position."""
    n = len(w)
    checks = {
        "X a": lambda i: _has(w, i + 1, "a"),
        "Y a": lambda i: _has(w, i - 1, "a"),
        "F a": lambda i: any(_has(w, j, "a") for j in range(i, n)),
        "G a": lambda i: all(_has(w, j, "a") for j in range(i, n)),
        "O a": lambda i: any(_has(w, j, "a") for j in range(0, i + 1)),
        "H a": lambda i: all(_has(w, j, "a") for j in range(0, i + 1)),
        "a & b": lambda i: _has(w, i, "a") and _has(w, i, "b"),
        "a -> b": lambda i: not _has(w, i, "a") or _has(w, i, "b"),
        "a Uns b": lambda i: any(_has(w, j, "b") and all(_has(w, k, "a") for k in range(i, j))
                                 for j in range(i, n)),
    }
    for text, expected in checks.items():
        assert eval_finite(parse(text), w) == tuple(int(expected(i)) for i in range(n)), text
