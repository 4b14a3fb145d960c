import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lotl.automaton import Transducer
from lotl.formula import (
    FALSE, TRUE, Atom, Not, Or, Since, StaviSince, StaviUntil, Until,
)
from lotl.words import Lit, NegOmegaPow, OmegaPow, Shuffle, concat, power_set

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", deadline=None, max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def core_formulas(props=("a", "b"), max_leaves=8, stavi=True):
    leaves = st.sampled_from([Atom(p) for p in props] + [TRUE, FALSE])
    ops = [Or, Until, Since] + ([StaviUntil, StaviSince] if stavi else [])

    def extend(children):
        return st.one_of(
            children.map(Not),
            st.tuples(st.sampled_from(ops), children, children).map(lambda t: t[0](t[1], t[2])),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def finite_ap_words(props=("a", "b"), max_len=5, min_len=0):
    return st.lists(st.sampled_from(power_set(props)), min_size=min_len, max_size=max_len).map(tuple)


def word_terms(alphabet=(0, 1), max_leaves=6, shuffle=True):
    """Nonempty word terms; powers and shuffles get nonempty bodies."""
    lit = st.sampled_from(alphabet).map(Lit)

    def extend(inner):
        opts = [
            st.lists(inner, min_size=2, max_size=3).map(lambda ts: concat(*ts)),
            inner.map(OmegaPow),
            inner.map(NegOmegaPow),
        ]
        if shuffle:
            opts.append(st.lists(inner, min_size=1, max_size=2).map(lambda ts: Shuffle(tuple(ts))))
        return st.one_of(*opts)

    return st.recursive(lit, extend, max_leaves=max_leaves)


_STATES = ("p", "q", "r")


@st.composite
def explicit_automata(draw):
    trans = draw(st.sets(st.tuples(st.sampled_from(_STATES), st.sampled_from((0, 1)),
                                   st.sampled_from((0, 1)), st.sampled_from(_STATES)),
                         max_size=10))
    init = draw(st.sets(st.sampled_from(_STATES), min_size=1))
    fin = draw(st.sets(st.sampled_from(_STATES), min_size=1))
    ll = draw(st.sets(st.tuples(st.frozensets(st.sampled_from(_STATES), min_size=1),
                                st.sampled_from(_STATES)), max_size=4))
    rl = draw(st.sets(st.tuples(st.sampled_from(_STATES),
                                st.frozensets(st.sampled_from(_STATES), min_size=1)), max_size=4))
    return Transducer(_STATES, (0, 1), (0, 1), sorted(trans), sorted(init), sorted(fin),
                      sorted(ll, key=repr), sorted(rl, key=repr))


# acceptance lines are echoed in the terminal summary so they survive capture
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
