"""Elementary transducers, product, composition and the formula compiler.

``compile(f)`` follows the structure of ``f``: an atom or constant is a
one-state automaton, ``!g`` is ``NOT o A_g`` and a binary connective ``c`` is
``A_c o (A_l x A_r)``.  Products and compositions are lazy: successor
transitions are computed on demand and limit transitions are predicates on
the two projections of the limit set.
"""

from __future__ import annotations

import functools
from typing import Iterable

from .automaton import (
    BaseTransducer, Transducer, dumps_automaton, reverse_automaton,
    DEFAULT_EXPAND_CAP,
)
from .errors import AlphabetError, NoRunError
from .formula import (
    Atom, Const, Formula, Not, Or, Since, StaviSince, StaviUntil, Until, atoms,
    is_core,
)
from .runs import RLit, find_run, _output_unfolded, zip_runs
from .words import power_set

__all__ = [
    "atom_automaton", "const_automaton", "not_automaton", "or_automaton",
    "until_automaton", "since_automaton", "stavi_until_automaton",
    "stavi_since_automaton", "product", "compose", "compile_formula",
    "compile", "serialize", "Product", "Composition", "BITS", "PAIRS",
    "elementary_sizes",
]

BITS = (0, 1)
PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))


def _single_state(alphabet, out_of, name):
    return Transducer(
        ("q",), alphabet, BITS,
        [("q", a, out_of(a), "q") for a in alphabet],
        ["q"], ["q"], [({"q"}, "q")], [("q", {"q"})], name=name,
    )


@functools.lru_cache(maxsize=None)
def _atom(p: str, props: tuple):
    return _single_state(power_set(props), lambda a: int(p in a), f"atom({p})")


def atom_automaton(p: str, props: Iterable[str]) -> Transducer:
    """Outputs 1 exactly where ``p`` holds; input alphabet ``2^props``."""
    props = tuple(sorted(set(props)))
    if p not in props:
        raise AlphabetError(f"proposition {p!r} not in {props}")
    return _atom(p, props)


@functools.lru_cache(maxsize=None)
def _const(bit: int, props: tuple):
    return _single_state(power_set(props), lambda a: bit, "true" if bit else "false")


def const_automaton(bit, props: Iterable[str]) -> Transducer:
    return _const(int(bool(bit)), tuple(sorted(set(props))))


@functools.lru_cache(maxsize=None)
def not_automaton() -> Transducer:
    return _single_state(BITS, lambda a: 1 - a, "not")


@functools.lru_cache(maxsize=None)
def or_automaton() -> Transducer:
    return _single_state(PAIRS, lambda a: int(a != (0, 0)), "or")


# ---------------------------------------------------------------------------
# Until

_U_READS = {"q0": (1, 1), "q1": (0, 1), "q2": (1, 0), "q3": (0, 0), "q4": (1, 0)}
_U_STATES = ("q0", "q1", "q2", "q3", "q4")


def _until_left(P, q):
    if P & {"q0", "q1", "q3"}:
        return True
    if P == {"q2"}:
        return q in ("q0", "q1", "q2")
    if P == {"q4"}:
        return q in ("q3", "q4")
    return False


def _until_right(q, P):
    if q == "q2":
        return P in ({"q0"}, {"q2"}, {"q0", "q2"})
    if q == "q4":
        return bool(P & {"q1", "q3"}) or P == {"q4"}
    return False


@functools.lru_cache(maxsize=None)
def until_automaton() -> Transducer:
    forbidden = {("q2", "q3"), ("q2", "q4"), ("q4", "q0"), ("q4", "q1"), ("q4", "q2")}
    transitions = [
        (p, _U_READS[p], int(q in ("q0", "q1", "q2")), q)
        for p in _U_STATES for q in _U_STATES if (p, q) not in forbidden
    ]
    return Transducer(
        _U_STATES, PAIRS, BITS, transitions, _U_STATES, ["q4"],
        _until_left, _until_right, name="until",
        ll_targets=_U_STATES, rl_sources=("q2", "q4"),
    )


@functools.lru_cache(maxsize=None)
def since_automaton() -> Transducer:
    A = reverse_automaton(until_automaton())
    A.name = "since"
    return A


# ---------------------------------------------------------------------------
# Stavi until
#
# q1 reads (1,0) and q2 reads (1,1), matching the cut labelling that makes
# the run unique; with the opposite reading the right-limit rule of q3 (no
# q1, q4, q6 right after the gap) would not mean "psi holds just after the
# gap".

_SU_STATES = tuple(f"q{i}" for i in range(10))
_SU_READS = {"q1": (1, 0), "q2": (1, 1), "q4": (0, 0), "q5": (0, 1), "q6": (1, 0), "q7": (1, 1)}
_SU_TRUE = frozenset({"q0", "q1", "q2"})
_SU_SUCC = {
    "q1": ("q0", "q1", "q2"),
    "q2": ("q0", "q1", "q2"),
    "q4": ("q0", "q1", "q2", "q4", "q5", "q6", "q7", "q8"),
    "q5": ("q0", "q1", "q2", "q4", "q5", "q6", "q7", "q8"),
    "q6": ("q4", "q5", "q6", "q7", "q8"),
    "q7": ("q4", "q5", "q6", "q7", "q8"),
}
_Q45 = frozenset({"q4", "q5"})
_Q4567 = frozenset({"q4", "q5", "q6", "q7"})
_Q146 = frozenset({"q1", "q4", "q6"})


def _stavi_left(P, q):
    inside = P <= _SU_TRUE
    if q in ("q0", "q1", "q2"):
        return bool(P & _Q45) or inside
    if q == "q3":
        return inside
    if q in ("q4", "q5", "q6", "q7"):
        return not inside
    if q == "q8":
        return bool(P & _Q45)
    if q == "q9":
        return not (P & _Q45) and not inside
    return False


def _stavi_right(q, P):
    if q == "q0":
        return P <= _SU_TRUE
    if q == "q3":
        return not (P & _Q146) and "q5" in P
    if q == "q8":
        return bool(P & _Q4567)
    if q == "q9":
        return bool(P & _Q4567) and (not (P & _Q45) or bool(P & _Q146))
    return False


@functools.lru_cache(maxsize=None)
def stavi_until_automaton() -> Transducer:
    transitions = [
        (p, _SU_READS[p], int(q in _SU_TRUE), q)
        for p, targets in _SU_SUCC.items() for q in targets
    ]
    initial = [q for q in _SU_STATES if q not in ("q3", "q9")]
    return Transducer(
        _SU_STATES, PAIRS, BITS, transitions, initial, ["q8", "q9"],
        _stavi_left, _stavi_right, name="stavi_until",
        ll_targets=_SU_STATES, rl_sources=("q0", "q3", "q8", "q9"),
    )


@functools.lru_cache(maxsize=None)
def stavi_since_automaton() -> Transducer:
    A = reverse_automaton(stavi_until_automaton())
    A.name = "stavi_since"
    return A


# ---------------------------------------------------------------------------
# product and composition

class _Pair(BaseTransducer):
    """Shared machinery: states ``(q1, q2)``, limits through projections."""

    def __init__(self, A1: BaseTransducer, A2: BaseTransducer):
        self.A1, self.A2 = A1, A2
        self._proj: dict = {}
        self._runs: dict = {}

    @property
    def num_states(self):
        return self.A1.num_states * self.A2.num_states

    def iter_states(self):
        s2 = tuple(self.A2.iter_states())
        return ((q1, q2) for q1 in self.A1.iter_states() for q2 in s2)

    def is_initial(self, q):
        return self.A1.is_initial(q[0]) and self.A2.is_initial(q[1])

    def is_final(self, q):
        return self.A1.is_final(q[0]) and self.A2.is_final(q[1])

    def _projections(self, P):
        pr = self._proj.get(P)
        if pr is None:
            if len(self._proj) > 100_000:
                self._proj.clear()
            pr = self._proj[P] = (frozenset(p[0] for p in P), frozenset(p[1] for p in P))
        return pr

    def left_limit(self, P, q):
        if not P:
            return False
        P1, P2 = self._projections(P)
        return self.A1.left_limit(P1, q[0]) and self.A2.left_limit(P2, q[1])

    def right_limit(self, q, P):
        if not P:
            return False
        P1, P2 = self._projections(P)
        return self.A1.right_limit(q[0], P1) and self.A2.right_limit(q[1], P2)

    @property
    def ll_targets(self):
        return frozenset((a, b) for a in self.A1.ll_targets for b in self.A2.ll_targets)

    @property
    def rl_sources(self):
        return frozenset((a, b) for a in self.A1.rl_sources for b in self.A2.rl_sources)

    def accepting_runs(self, w):
        w = tuple(w)
        r = self._runs.get(w)
        if r is None:
            if len(self._runs) > 20_000:
                self._runs.clear()
            r = self._runs[w] = self._accepting_runs(w)
        return r


class Product(_Pair):
    """``A1 x A2``: both read the input, outputs are paired."""

    def __init__(self, A1, A2):
        if set(A1.alphabet_in) != set(A2.alphabet_in):
            raise AlphabetError("product of automata with different input alphabets")
        super().__init__(A1, A2)
        self.alphabet_in = A1.alphabet_in
        self.alphabet_out = tuple((b, c) for b in A1.alphabet_out for c in A2.alphabet_out)
        self.name = f"({_nm(A1)} x {_nm(A2)})"

    def successors(self, q, a):
        return tuple(((b, c), (r1, r2))
                     for b, r1 in self.A1.successors(q[0], a)
                     for c, r2 in self.A2.successors(q[1], a))

    def _accepting_runs(self, w):
        runs2 = self.A2.accepting_runs(w)
        return [(tuple(zip(s1, s2)), tuple(zip(o1, o2)))
                for s1, o1 in self.A1.accepting_runs(w) for s2, o2 in runs2]

    def _find_run(self, x, budget):
        r1 = find_run(self.A1, x, budget)
        r2 = find_run(self.A2, x, budget)
        return zip_runs(r1, r2, lambda l1, l2: RLit(
            (l1.src, l2.src), l1.letter, (l1.out, l2.out), (l1.dst, l2.dst)))


class Composition(_Pair):
    """``A2 o A1``: A2 reads A1's output.  States are ``(q1, q2)``."""

    def __init__(self, A2, A1):
        if set(A1.alphabet_out) != set(A2.alphabet_in):
            raise AlphabetError("composition: inner output alphabet differs from outer input")
        super().__init__(A1, A2)
        self.alphabet_in = A1.alphabet_in
        self.alphabet_out = A2.alphabet_out
        self.name = f"{_nm(A2)} o {_nm(A1)}"

    def successors(self, q, a):
        return tuple((c, (r1, r2))
                     for b, r1 in self.A1.successors(q[0], a)
                     for c, r2 in self.A2.successors(q[1], b))

    def _accepting_runs(self, w):
        out = []
        for s1, o1 in self.A1.accepting_runs(w):
            for s2, o2 in self.A2.accepting_runs(o1):
                out.append((tuple(zip(s1, s2)), o2))
        return out

    def _find_run(self, x, budget):
        # exact when the inner automaton has a single accepting run, which
        # holds for compiled formulas; otherwise fall back to the flat search
        try:
            r1 = find_run(self.A1, x, budget)
            r2 = find_run(self.A2, _output_unfolded(r1), budget)
        except NoRunError:
            if self.num_states > 4 * DEFAULT_EXPAND_CAP ** 2:
                raise
            from .automaton import materialize
            return find_run(materialize(self), x, budget)
        return zip_runs(r1, r2, lambda l1, l2: RLit(
            (l1.src, l2.src), l1.letter, l2.out, (l1.dst, l2.dst)))


def _nm(A):
    return getattr(A, "name", None) or "?"


def product(A1: BaseTransducer, A2: BaseTransducer) -> Product:
    return Product(A1, A2)


def compose(A2: BaseTransducer, A1: BaseTransducer) -> Composition:
    """``A2 o A1``: run ``A2`` over the output of ``A1``."""
    return Composition(A2, A1)


# ---------------------------------------------------------------------------
# compiler

_TEMPORAL = {
    Until: until_automaton, Since: since_automaton,
    StaviUntil: stavi_until_automaton, StaviSince: stavi_since_automaton,
}


@functools.lru_cache(maxsize=8192)
def _compile(f: Formula, props: tuple) -> BaseTransducer:
    if isinstance(f, Atom):
        return atom_automaton(f.name, props)
    if isinstance(f, Const):
        return const_automaton(f.value, props)
    if isinstance(f, Not):
        return compose(not_automaton(), _compile(f.child, props))
    if isinstance(f, Or):
        inner = product(_compile(f.left, props), _compile(f.right, props))
        return compose(or_automaton(), inner)
    ctor = _TEMPORAL.get(type(f))
    if ctor is None:
        raise TypeError(f"not a core formula: {f!r}")
    inner = product(_compile(f.left, props), _compile(f.right, props))
    return compose(ctor(), inner)


def compile_formula(f: Formula, props: Iterable[str] | None = None) -> BaseTransducer:
    """The transducer computing the truth word of ``f`` over ``2^props``.

    ``props`` defaults to the atoms of ``f`` (``{p}`` if there are none,
    so that the input alphabet is never trivial).
    """
    if not is_core(f):
        raise TypeError("compile expects a desugared formula")
    if props is None:
        props = atoms(f) or {"p"}
    props = tuple(sorted(set(props)))
    missing = atoms(f) - set(props)
    if missing:
        raise AlphabetError(f"propositions {sorted(missing)} not declared")
    return _compile(f, props)


compile = compile_formula


def elementary_sizes(f: Formula) -> int:
    """Product of the elementary state counts over the formula tree."""
    own = {Until: 5, Since: 5, StaviUntil: 10, StaviSince: 10}.get(type(f), 1)
    for c in f.children:
        own *= elementary_sizes(c)
    return own


def serialize(A: BaseTransducer, cap: int = DEFAULT_EXPAND_CAP) -> str:
    """Text format with limit transitions expanded; refused above ``cap`` states."""
    return dumps_automaton(A, cap)
