import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import core_formulas, finite_ap_words
import lotl.oracle as oracle
from lotl.formula import StaviSince, StaviUntil, Until, depth, parse, subformulas
from lotl.oracle import (
    SuiteConfig, UPWord, differential_suite, eval_finite, eval_finite_naive,
    eval_up, finite_words, formula_corpus, formulas_up_to_depth, up_words,
)
from lotl.words import ap_letter, parse_term, power_set

A, E = ap_letter("a"), ap_letter()


def test_truth_word_example():
    f = parse("X a")
    assert eval_finite(f, [A, E, A]) == (0, 1, 0)
    assert eval_finite(parse("a S b"), [ap_letter("b"), E, A]) == (0, 1, 0)


def test_stavi_is_zero():
    for w in finite_words(("a", "b"), 3):
        assert set(eval_finite(parse("a U' b"), w)) <= {0}
    assert str(eval_up(parse("a S' b"), UPWord((A,), (E, A)))) == "0^w"


def test_up_word_normalization():
    w = UPWord((A, E, A), (E, A, E, A))
    n = w.normalized()
    assert n == UPWord((), (A, E))       # the same word as ({a} {})^w
    assert n.normalized() == n
    assert str(n) == "({a} {})^w"
    assert UPWord.from_term(parse_term("{a} {} ({a} {})^w")) == n
    assert UPWord((A, E), (E,)).normalized() == UPWord((A,), (E,))


def test_up_word_needs_a_cycle():
    with pytest.raises(ValueError):
        UPWord((A,), ())
    with pytest.raises(ValueError):
        UPWord.from_term(parse_term("{a}^-w"))


def test_eval_up_examples():
    w = UPWord.from_term(parse_term("{a} {}^w"))
    assert str(eval_up(parse("X a"), w)) == "0^w"
    assert str(eval_up(parse("O a"), w)) == "1^w"
    assert str(eval_up(parse("Y a"), w)) == "0 1 0^w"
    w = UPWord.from_term(parse_term("({a} {})^w"))
    assert str(eval_up(parse("!a & G !(X a)"), w)) == "0^w"
    assert str(eval_up(parse("F a"), w)) == "1^w"


@given(core_formulas(max_leaves=7, stavi=False), finite_ap_words(max_len=6))
def test_dp_agrees_with_naive(f, w):
    assert eval_finite(f, w) == eval_finite_naive(f, w)


@st.composite
def up_word_values(draw):
    letters = st.sampled_from(power_set(("a", "b")))
    return UPWord(tuple(draw(st.lists(letters, max_size=3))),
                  tuple(draw(st.lists(letters, min_size=1, max_size=3))))


@given(core_formulas(max_leaves=6, stavi=False), up_word_values())
def test_eval_up_agrees_with_long_truncations(f, w):
    """Far from the cut-off, a long finite prefix sees the same truth values."""
    n, p = len(w.prefix), len(w.cycle)
    horizon = n + p * (depth(f) + 2) * 3 + p
    finite = eval_finite(f, [w.at(i) for i in range(horizon + n + 2 * p)])
    v = eval_up(f, w)
    for i in range(n + 2 * p):
        assert v.at(i) == finite[i], i


@given(core_formulas(max_leaves=5), up_word_values())
def test_eval_up_is_normalized(f, w):
    v = eval_up(f, w)
    assert v == v.normalized()


def test_corpus_sizes():
    assert len(formulas_up_to_depth(("a", "b"), 1)) == 88
    assert len(formulas_up_to_depth(("a",), 1)) == 51
    assert len(up_words(("a",), 3, 3)) == 210
    assert len(finite_words(("a", "b"), 4)) == 341


def test_corpus_is_deterministic():
    c1 = formula_corpus(("a", "b"), 3, 200, seed=7)
    c2 = formula_corpus(("a", "b"), 3, 200, seed=7)
    assert c1 == c2
    assert len(set(c1)) == 200
    assert all(depth(f) <= 3 for f in c1)
    assert formula_corpus(("a", "b"), 3, 200, seed=8) != c1


def test_small_suite_passes():
    rep = differential_suite(SuiteConfig(depth=1, max_len=2, cap=20))
    assert rep.fail == 0 and rep.ok == 20 * 21     # 21 words of length <= 2
    text = rep.render()
    assert text.splitlines()[-1] == "total 420  ok 420  fail 0"
    assert all(line.startswith("OK ") for line in text.splitlines()[:-1])


def test_up_suite_passes():
    rep = differential_suite(SuiteConfig(props=("a",), depth=1, cap=10, mode="up",
                                         max_prefix=1, max_cycle=2))
    assert rep.fail == 0 and rep.ok > 0


def test_failures_are_reported_and_shrunk(monkeypatch):
    real = oracle._finite_case

    def broken(f, w, props):
        ok, exp, got = real(f, w, props)
        # pretend every Until is wrong on words containing {a}
        if any(isinstance(g, Until) for g in subformulas(f)) and A in w:
            return False, exp, "bogus"
        return ok, exp, got

    monkeypatch.setattr(oracle, "_finite_case", broken)
    rep = differential_suite(SuiteConfig(depth=2, max_len=2, cap=40))
    assert rep.fail > 0
    f, w, exp, got = rep.shrunk
    assert got == "bogus"
    assert " U " in f and "|" not in f and w == "{a}"
    assert any(line.startswith("FAIL ") for line in rep.render(failures_only=True).splitlines())


def test_stavi_subformulas_vanish_on_up_words():
    for f in formula_corpus(("a",), 2, 60, seed=3):
        for g in subformulas(f):
            if isinstance(g, (StaviUntil, StaviSince)):
                assert str(eval_up(g, UPWord((A,), (E,)))) == "0^w"
