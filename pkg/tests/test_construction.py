import itertools

import pytest
from hypothesis import given

from conftest import core_formulas, finite_ap_words
from lotl.construction import (
    BITS, PAIRS, atom_automaton, compile_formula, compose, const_automaton,
    elementary_sizes, not_automaton, or_automaton, product, serialize,
    since_automaton, stavi_since_automaton, stavi_until_automaton,
    until_automaton,
)
from lotl.automaton import loads_automaton
from lotl.errors import AlphabetError, SerializationError
from lotl.formula import Atom, parse
from lotl.oracle import eval_finite
from lotl.runs import enumerate_accepting_runs_finite, find_run_term
from lotl.words import ap_letter, parse_term, power_set, render_term, simplify


def _outputs(A, w):
    return [out for _, out in enumerate_accepting_runs_finite(A, w)]


def test_elementary_state_counts():
    assert until_automaton().num_states == 5
    assert since_automaton().num_states == 5
    assert stavi_until_automaton().num_states == 10
    assert stavi_since_automaton().num_states == 10
    for A in (atom_automaton("a", ["a"]), const_automaton(1, ["a"]),
              const_automaton(0, ["a"]), not_automaton(), or_automaton()):
        assert A.num_states == 1


def test_until_transition_count():
    assert sum(1 for _ in until_automaton().transitions()) == 20


def test_single_state_outputs():
    w = [ap_letter("a"), ap_letter(), ap_letter("a", "b")]
    assert _outputs(atom_automaton("a", ["a", "b"]), w) == [(1, 0, 1)]
    assert _outputs(const_automaton(1, ["a", "b"]), w) == [(1, 1, 1)]
    assert _outputs(not_automaton(), [0, 1, 1]) == [(1, 0, 0)]
    assert _outputs(or_automaton(), list(PAIRS)) == [(0, 1, 1, 1)]


def test_atom_must_be_declared():
    with pytest.raises(AlphabetError):
        atom_automaton("c", ["a", "b"])
    with pytest.raises(AlphabetError):
        compile_formula(parse("a U c"), ["a"])


def test_until_hand_cases():
    # position i gets 1 iff psi holds at some j > i with phi strictly between
    assert _outputs(until_automaton(), [(0, 0), (0, 1)]) == [(1, 0)]
    assert _outputs(until_automaton(), [(0, 0), (1, 0), (0, 1)]) == [(1, 1, 0)]
    assert _outputs(until_automaton(), [(0, 0), (0, 0), (0, 1)]) == [(0, 1, 0)]
    assert _outputs(until_automaton(), []) == [()]


def test_since_hand_cases():
    assert _outputs(since_automaton(), [(0, 1), (0, 0)]) == [(0, 1)]
    assert _outputs(since_automaton(), [(0, 1), (1, 0), (0, 0)]) == [(0, 1, 1)]


def test_stavi_is_zero_on_finite_words():
    for n in range(0, 4):
        for w in itertools.product(PAIRS, repeat=n):
            assert _outputs(stavi_until_automaton(), w) == [(0,) * n]
            assert _outputs(stavi_since_automaton(), w) == [(0,) * n]


@pytest.mark.parametrize("term,expected", [
    ("<1,0>^w <0,1>^-w", "1^w 0^-w"),        # psi right after the gap
    ("<1,0>^w <0,0>^-w", "0^w 0^-w"),        # psi never holds
    ("<0,0> <1,0>^w <0,1>^-w", "1^w 0^-w"),
    ("<1,0>^w <1,1>^-w", "0^w 0^-w"),        # phi keeps holding after the gap
    ("<1,0>^w <0,1>", "0^w 0"),              # no gap
])
def test_stavi_until_on_gaps(term, expected):
    _, out = find_run_term(stavi_until_automaton(), parse_term(term))
    assert render_term(simplify(out)) == expected


def test_product_pairs_outputs():
    P = product(atom_automaton("a", ["a", "b"]), atom_automaton("b", ["a", "b"]))
    assert P.num_states == 1
    w = [ap_letter("a"), ap_letter("b"), ap_letter("a", "b")]
    assert _outputs(P, w) == [((1, 0), (0, 1), (1, 1))]


def test_product_alphabet_mismatch():
    with pytest.raises(AlphabetError):
        product(atom_automaton("a", ["a"]), until_automaton())


def test_composition_feeds_output():
    inner = product(atom_automaton("a", ["a", "b"]), atom_automaton("b", ["a", "b"]))
    C = compose(until_automaton(), inner)
    assert C.num_states == 5
    w = [ap_letter(), ap_letter("a"), ap_letter("b")]
    assert _outputs(C, w) == [(1, 1, 0)]


def test_compile_state_counts():
    assert compile_formula(parse("a U (b U c)")).num_states == 25
    assert compile_formula(parse("X a")).num_states == 5
    assert compile_formula(parse("a U' b")).num_states == 10
    assert compile_formula(parse("!a & G !(X a)")).num_states == 125


@given(core_formulas(max_leaves=6))
def test_state_count_is_product_of_elementary_sizes(f):
    assert compile_formula(f, ("a", "b")).num_states == elementary_sizes(f)


def test_compile_default_props():
    A = compile_formula(parse("true U false"))
    assert set(A.alphabet_in) == set(power_set(["p"]))
    A = compile_formula(parse("a"))
    assert set(A.alphabet_in) == set(power_set(["a"]))


def test_compile_is_cached():
    assert compile_formula(parse("a U b")) is compile_formula(parse("a U b"), ["b", "a"])


def test_serialize_small_and_refuse_large():
    text = serialize(compile_formula(parse("a U b")))
    assert "states: q.q.q0," in text
    assert serialize(loads_automaton(text)) == text
    with pytest.raises(SerializationError):
        serialize(compile_formula(parse("a U (b U c)")), cap=12)


@given(core_formulas(max_leaves=7), finite_ap_words(max_len=4))
def test_compiled_output_is_the_truth_word(f, w):
    assert _outputs(compile_formula(f, ("a", "b")), w) == [eval_finite(f, w)]


@given(core_formulas(max_leaves=5), core_formulas(max_leaves=5), finite_ap_words(max_len=4))
def test_product_of_compiled_is_pairwise(f, g, w):
    A, B = compile_formula(f, ("a", "b")), compile_formula(g, ("a", "b"))
    (out,) = _outputs(product(A, B), w)
    assert out == tuple(zip(eval_finite(f, w), eval_finite(g, w)))


def test_bits():
    assert BITS == (0, 1)
    assert Atom("a") == parse("a")
