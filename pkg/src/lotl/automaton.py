"""Letter-to-letter transducers over linear orderings.

A transducer has successor transitions ``p --a|b--> q`` read at every
position, left-limit transitions ``P -> q`` taken at cuts without a
predecessor and right-limit transitions ``q -> P`` taken at cuts without a
successor, where ``P`` is the set of states seen arbitrarily close to the cut.

Limit relations are kept as predicates over ``(frozenset, state)`` so that
products and compositions never enumerate the ``2^|Q|`` possible limit sets.
"""

from __future__ import annotations

import itertools
import re
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .errors import AlphabetError, ParseError, SerializationError
from .words import parse_letter, render_letter

__all__ = [
    "BaseTransducer", "Transducer", "LimitRelation", "IndexedView",
    "materialize", "reverse_automaton", "state_name", "load_automaton",
    "loads_automaton", "dumps_automaton", "load_fixture", "fixture_path",
    "FIXTURES", "limit_tables", "same_tables", "DEFAULT_EXPAND_CAP",
]

DEFAULT_EXPAND_CAP = 12


def state_name(q) -> str:
    """Printable name; product states are dotted, e.g. ``q.q.q4``."""
    if isinstance(q, tuple):
        return ".".join(state_name(x) for x in q)
    return str(q)


class LimitRelation:
    """A limit relation given by a predicate ``pred(P, q)``.

    For left limits ``pred(P, q)`` means ``P -> q``; for right limits it
    means ``q -> P``.  ``pairs`` is set when the relation came from an
    explicit table.
    """

    def __init__(self, pred: Callable[[frozenset, object], bool], pairs=None):
        self.pred = pred
        self.pairs = pairs

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[frozenset, object]]):
        table = frozenset((frozenset(P), q) for P, q in pairs)
        return cls(lambda P, q: (P, q) in table, table)

    @classmethod
    def empty(cls):
        return cls.from_pairs(())

    def __call__(self, P, q) -> bool:
        return bool(P) and self.pred(P, q)


class BaseTransducer:
    """Interface shared by explicit transducers and lazy products/compositions."""

    alphabet_in: tuple
    alphabet_out: tuple

    @property
    def num_states(self) -> int:
        raise NotImplementedError

    def iter_states(self) -> Iterator:
        raise NotImplementedError

    def is_initial(self, q) -> bool:
        raise NotImplementedError

    def is_final(self, q) -> bool:
        raise NotImplementedError

    def initial_states(self) -> Iterator:
        return (q for q in self.iter_states() if self.is_initial(q))

    def final_states(self) -> Iterator:
        return (q for q in self.iter_states() if self.is_final(q))

    def successors(self, q, a) -> tuple:
        """Pairs ``(output, target)`` of successor transitions from ``q`` on ``a``."""
        raise NotImplementedError

    def left_limit(self, P: frozenset, q) -> bool:
        raise NotImplementedError

    def right_limit(self, q, P: frozenset) -> bool:
        raise NotImplementedError

    @property
    def ll_targets(self) -> frozenset:
        """States that are the target of at least one left-limit transition."""
        raise NotImplementedError

    @property
    def rl_sources(self) -> frozenset:
        raise NotImplementedError

    def accepting_runs(self, w: tuple) -> list:
        """All accepting runs on the finite word ``w`` as ``(states, output)``."""
        raise NotImplementedError

    def has_transition(self, p, a, b, q) -> bool:
        return (b, q) in self.successors(p, a)


class Transducer(BaseTransducer):
    """Explicitly tabulated transducer.

    ``transitions`` are ``(p, a, b, q)`` tuples.  ``left_limit`` and
    ``right_limit`` are :class:`LimitRelation` objects, bare predicates, or
    iterables of ``(P, q)`` / ``(q, P)`` pairs.
    """

    def __init__(self, states, alphabet_in, alphabet_out, transitions,
                 initial, final, left_limit=(), right_limit=(), name=None,
                 ll_targets=None, rl_sources=None):
        self.states = tuple(states)
        self.index = {q: i for i, q in enumerate(self.states)}
        if len(self.index) != len(self.states):
            raise ValueError("duplicate state")
        self.alphabet_in = tuple(alphabet_in)
        self.alphabet_out = tuple(alphabet_out)
        self.name = name
        ins, outs = set(self.alphabet_in), set(self.alphabet_out)
        succ: dict = {}
        for p, a, b, q in transitions:
            if p not in self.index or q not in self.index:
                raise ValueError(f"transition {p!r} -> {q!r} uses an undeclared state")
            if a not in ins:
                raise AlphabetError(f"input letter {a!r} not in the input alphabet")
            if b not in outs:
                raise AlphabetError(f"output letter {b!r} not in the output alphabet")
            lst = succ.setdefault((p, a), [])
            if (b, q) not in lst:
                lst.append((b, q))
        self._succ = {k: tuple(sorted(v, key=lambda bq: (self.index[bq[1]], repr(bq[0]))))
                      for k, v in succ.items()}
        self.initial = frozenset(initial)
        self.final = frozenset(final)
        for q in self.initial | self.final:
            if q not in self.index:
                raise ValueError(f"undeclared state {q!r}")
        self.left = _as_relation(left_limit, swap=False)
        self.right = _as_relation(right_limit, swap=True)
        self._ll_targets = None if ll_targets is None else frozenset(ll_targets)
        self._rl_sources = None if rl_sources is None else frozenset(rl_sources)
        self._runs_cache: dict = {}

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<Transducer{label}: {len(self.states)} states>"

    @property
    def num_states(self):
        return len(self.states)

    def iter_states(self):
        return iter(self.states)

    def is_initial(self, q):
        return q in self.initial

    def is_final(self, q):
        return q in self.final

    def initial_states(self):
        return (q for q in self.states if q in self.initial)

    def final_states(self):
        return (q for q in self.states if q in self.final)

    def successors(self, q, a):
        return self._succ.get((q, a), ())

    def transitions(self) -> Iterator[tuple]:
        for p in self.states:
            for a in self.alphabet_in:
                for b, q in self._succ.get((p, a), ()):
                    yield p, a, b, q

    def left_limit(self, P, q):
        return self.left(P, q)

    def right_limit(self, q, P):
        return self.right(P, q)

    @property
    def ll_targets(self):
        if self._ll_targets is None:
            self._ll_targets = self._limit_ends(self.left)
        return self._ll_targets

    @property
    def rl_sources(self):
        if self._rl_sources is None:
            self._rl_sources = self._limit_ends(self.right)
        return self._rl_sources

    def _limit_ends(self, rel):
        if rel.pairs is not None:
            return frozenset(q for _, q in rel.pairs)
        if len(self.states) > DEFAULT_EXPAND_CAP:
            return frozenset(self.states)  # over-approximation; used only as a filter
        return frozenset(q for q in self.states
                         if any(rel(P, q) for P in _subsets(self.states)))

    def accepting_runs(self, w):
        w = tuple(w)
        cached = self._runs_cache.get(w)
        if cached is None:
            cached = self._runs_cache[w] = _explicit_runs(self, w)
        return cached

    @cached_property
    def indexed(self) -> IndexedView:
        return IndexedView(self)


def _as_relation(rel, swap):
    # relations are stored keyed (P, q); right limits arrive as (q, P)
    if isinstance(rel, LimitRelation):
        return rel
    if callable(rel):
        if swap:
            return LimitRelation(lambda P, q: rel(q, P))
        return LimitRelation(rel)
    if swap:
        return LimitRelation.from_pairs((P, q) for q, P in rel)
    return LimitRelation.from_pairs(rel)


def _subsets(states):
    """All nonempty subsets, ordered by bitmask over ``states``."""
    n = len(states)
    for mask in range(1, 1 << n):
        yield frozenset(states[i] for i in range(n) if mask >> i & 1)


def _explicit_runs(A: Transducer, w):
    n = len(w)
    # alive[k]: states at cut k from which the rest of w can be read into F
    alive = [None] * (n + 1)
    alive[n] = A.final
    for k in range(n - 1, -1, -1):
        nxt = alive[k + 1]
        alive[k] = frozenset(p for p in A.states
                             if any(q in nxt for _, q in A.successors(p, w[k])))
    runs = []

    def extend(k, states, outs):
        if k == n:
            runs.append((tuple(states), tuple(outs)))
            return
        p = states[-1]
        for b, q in A.successors(p, w[k]):
            if q in alive[k + 1]:
                states.append(q)
                outs.append(b)
                extend(k + 1, states, outs)
                states.pop()
                outs.pop()

    for q in A.initial_states():
        if q in alive[0]:
            extend(0, [q], [])
    return runs


# ---------------------------------------------------------------------------
# materialization, reversal, comparison

def materialize(A: BaseTransducer, max_states: int | None = None) -> Transducer:
    """Tabulate the successor transitions of any transducer.

    Limit relations keep delegating to ``A``'s predicates.
    """
    if isinstance(A, Transducer):
        return A
    if max_states is not None and A.num_states > max_states:
        raise SerializationError(
            f"{A.num_states} states exceed the materialization cap of {max_states}")
    states = tuple(A.iter_states())
    transitions = [(p, a, b, q) for p in states for a in A.alphabet_in
                   for b, q in A.successors(p, a)]
    return Transducer(
        states, A.alphabet_in, A.alphabet_out, transitions,
        [q for q in states if A.is_initial(q)], [q for q in states if A.is_final(q)],
        LimitRelation(A.left_limit), LimitRelation(lambda P, q: A.right_limit(q, P)),
        name=getattr(A, "name", None),
        ll_targets=A.ll_targets, rl_sources=A.rl_sources,
    )


def reverse_automaton(A: BaseTransducer) -> Transducer:
    """Reverse every transition and swap initial and final states."""
    M = materialize(A)
    transitions = [(q, a, b, p) for p, a, b, q in M.transitions()]
    # new left limit P -> q is old right limit q -> P, and vice versa
    left = LimitRelation(M.right.pred, M.right.pairs)
    right = LimitRelation(M.left.pred, M.left.pairs)
    return Transducer(
        M.states, M.alphabet_in, M.alphabet_out, transitions,
        M.final, M.initial, left, right,
        name=f"reverse({M.name})" if M.name else None,
        ll_targets=M.rl_sources, rl_sources=M.ll_targets,
    )


def limit_tables(A: BaseTransducer, cap: int = DEFAULT_EXPAND_CAP):
    """Expanded limit relations as sorted lists of ``(P, q)`` and ``(q, P)``.

    Subsets are enumerated by bitmask over the state order, so the result is
    deterministic.  Refuses automata above ``cap`` states.
    """
    states = tuple(A.iter_states())
    if len(states) > cap:
        raise SerializationError(
            f"{len(states)} states exceed the expansion cap of {cap}; "
            "limit transitions are only kept as predicates")
    subsets = list(_subsets(states))
    left = [(P, q) for P in subsets for q in states if A.left_limit(P, q)]
    right = [(q, P) for q in states for P in subsets if A.right_limit(q, P)]
    return left, right


def same_tables(A: BaseTransducer, B: BaseTransducer, cap: int = DEFAULT_EXPAND_CAP) -> bool:
    """Extensional equality of two small transducers."""
    MA, MB = materialize(A), materialize(B)
    return (
        MA.states == MB.states
        and set(MA.alphabet_in) == set(MB.alphabet_in)
        and set(MA.alphabet_out) == set(MB.alphabet_out)
        and MA.initial == MB.initial
        and MA.final == MB.final
        and set(MA.transitions()) == set(MB.transitions())
        and limit_tables(MA, cap) == limit_tables(MB, cap)
    )


# ---------------------------------------------------------------------------
# bitmask view used by the run search and by saturation

class IndexedView:
    """States as indices ``0..n-1`` and state sets as integer bitmasks."""

    def __init__(self, A: Transducer):
        self.A = A
        self.states = A.states
        self.n = len(A.states)
        idx = A.index
        self.index = idx
        self.succ = [[] for _ in range(self.n)]
        self.succ_on: dict = {}
        for p, a, b, q in A.transitions():
            self.succ[idx[p]].append((a, b, idx[q]))
            self.succ_on.setdefault((idx[p], a), []).append((b, idx[q]))
        self.initial = [idx[q] for q in A.initial_states()]
        self.final = [idx[q] for q in A.final_states()]
        self.initial_mask = _mask(self.initial)
        self.final_mask = _mask(self.final)
        self.ll_targets = sorted(idx[q] for q in A.ll_targets)
        self.rl_sources = sorted(idx[q] for q in A.rl_sources)
        self._sets: dict = {}
        self._ll: dict = {}
        self._rl: dict = {}

    def to_set(self, mask: int) -> frozenset:
        s = self._sets.get(mask)
        if s is None:
            s = self._sets[mask] = frozenset(
                self.states[i] for i in range(self.n) if mask >> i & 1)
        return s

    def ll_targets_of(self, mask: int) -> tuple:
        """Indices ``j`` with a left-limit transition ``mask -> j``."""
        r = self._ll.get(mask)
        if r is None:
            P = self.to_set(mask)
            r = self._ll[mask] = tuple(
                j for j in self.ll_targets if self.A.left_limit(P, self.states[j]))
        return r

    def rl_sources_of(self, mask: int) -> tuple:
        """Indices ``j`` with a right-limit transition ``j -> mask``."""
        r = self._rl.get(mask)
        if r is None:
            P = self.to_set(mask)
            r = self._rl[mask] = tuple(
                j for j in self.rl_sources if self.A.right_limit(self.states[j], P))
        return r

    def ll(self, mask: int, j: int) -> bool:
        return j in self.ll_targets_of(mask)

    def rl(self, j: int, mask: int) -> bool:
        return j in self.rl_sources_of(mask)


def _mask(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


# ---------------------------------------------------------------------------
# text format
#
#   alphabet_in: 0 1            ('*' = instantiated later)
#   alphabet_out: 0 1           ('*' = same as input)
#   states: q0, q1
#   initial: q0
#   final: q0, q1
#   succ: q0 ; - ; 1 ; q1       ('-' input = every letter, '-' output = echo)
#   llim: {q0,q1} ; q1          (also: '*', 'sub{..}', 'disj{..}', 'meet{..}')
#   rlim: q1 ; {q0}

_NAME = re.compile(r"[A-Za-z0-9_'.]+\Z")


def _split_items(s):
    """Split on commas/whitespace outside braces and angle brackets."""
    items, depth, cur = [], 0, []
    for ch in s:
        if ch in "{<":
            depth += 1
        elif ch in "}>":
            depth -= 1
        if depth == 0 and (ch == "," or ch.isspace()):
            if cur:
                items.append("".join(cur))
                cur = []
            continue
        cur.append(ch)
    if cur:
        items.append("".join(cur))
    return items


def _set_pattern(text, states, lineno):
    """Return a predicate over frozensets for a limit-set pattern."""
    text = text.strip()

    def names(inner):
        out = frozenset(_split_items(inner))
        bad = out - set(states)
        if bad:
            raise ParseError(f"line {lineno}: undeclared states {sorted(bad)}")
        return out

    if text == "*":
        return lambda P: True
    m = re.fullmatch(r"(sub|disj|meet)?\{(.*)\}", text)
    if not m:
        raise ParseError(f"line {lineno}: bad state-set pattern {text!r}")
    kind, S = m.group(1), names(m.group(2))
    if kind == "sub":
        return lambda P: P <= S
    if kind == "disj":
        return lambda P: not (P & S)
    if kind == "meet":
        return lambda P: bool(P & S)
    return lambda P: P == S


def loads_automaton(text: str, alphabet=None, name=None) -> Transducer:
    """Parse the text format.

    ``alphabet`` supplies the input letters of alphabet-generic files
    (``alphabet_in: *``) and is otherwise ignored.
    """
    fields: dict = {}
    succ, llim, rlim = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ParseError(f"line {lineno}: expected 'key: value'")
        key, value = key.strip(), value.strip()
        if key == "succ":
            succ.append((lineno, value))
        elif key == "llim":
            llim.append((lineno, value))
        elif key == "rlim":
            rlim.append((lineno, value))
        elif key in ("alphabet_in", "alphabet_out", "states", "initial", "final", "name"):
            fields[key] = value
        else:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
    for key in ("alphabet_in", "alphabet_out", "states", "initial", "final"):
        if key not in fields:
            raise ParseError(f"missing '{key}:' line")

    if fields["alphabet_in"] == "*":
        if alphabet is None:
            raise AlphabetError("alphabet-generic automaton: an input alphabet must be supplied")
        ins = tuple(alphabet)
    else:
        ins = tuple(parse_letter(x) for x in _split_items(fields["alphabet_in"]))
    outs = ins if fields["alphabet_out"] == "*" else tuple(
        parse_letter(x) for x in _split_items(fields["alphabet_out"]))
    states = tuple(_split_items(fields["states"]))
    for q in states:
        if not _NAME.match(q):
            raise ParseError(f"bad state name {q!r}")
    known = set(states)

    def state(q, lineno):
        q = q.strip()
        if q not in known:
            raise ParseError(f"line {lineno}: undeclared state {q!r}")
        return q

    transitions = []
    for lineno, value in succ:
        parts = value.split(";")
        if len(parts) != 4:
            raise ParseError(f"line {lineno}: succ needs 'p ; a ; b ; q'")
        p, a, b, q = (x.strip() for x in parts)
        p, q = state(p, lineno), state(q, lineno)
        for letter in (ins if a == "-" else (parse_letter(a),)):
            out = letter if b == "-" else parse_letter(b)
            transitions.append((p, letter, out, q))

    def limit_rules(lines, set_first):
        rules = []
        for lineno, value in lines:
            parts = value.split(";")
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: limit needs two ';'-separated fields")
            set_text, targets = (parts[0], parts[1]) if set_first else (parts[1], parts[0])
            pat = _set_pattern(set_text, states, lineno)
            for q in _split_items(targets):
                rules.append((pat, state(q, lineno)))
        return rules

    lrules = limit_rules(llim, True)
    rrules = limit_rules(rlim, False)

    def tabulate(rules):
        # explicit table when small, predicate otherwise
        if len(states) <= DEFAULT_EXPAND_CAP:
            return LimitRelation.from_pairs(
                (P, q) for P in _subsets(states) for pat, q in rules if pat(P))
        return LimitRelation(lambda P, q: any(t == q and pat(P) for pat, t in rules))

    name = name or fields.get("name")
    return Transducer(
        states, ins, outs, transitions,
        [state(q, 0) for q in _split_items(fields["initial"])],
        [state(q, 0) for q in _split_items(fields["final"])],
        tabulate(lrules), tabulate(rrules), name=name,
        ll_targets={q for _, q in lrules}, rl_sources={q for _, q in rrules},
    )


def load_automaton(path, alphabet=None) -> Transducer:
    path = Path(path)
    return loads_automaton(path.read_text(), alphabet=alphabet, name=path.stem)


def dumps_automaton(A: BaseTransducer, cap: int = DEFAULT_EXPAND_CAP) -> str:
    """Serialize with limit relations expanded (refused above ``cap`` states)."""
    M = materialize(A)
    left, right = limit_tables(M, cap)
    nm = state_name

    def sset(P):
        return "{" + ",".join(nm(q) for q in M.states if q in P) + "}"

    lines = []
    if M.name:
        lines.append(f"name: {M.name}")
    lines += [
        "alphabet_in: " + " ".join(render_letter(a) for a in M.alphabet_in),
        "alphabet_out: " + " ".join(render_letter(b) for b in M.alphabet_out),
        "states: " + ", ".join(nm(q) for q in M.states),
        "initial: " + ", ".join(nm(q) for q in M.initial_states()),
        "final: " + ", ".join(nm(q) for q in M.final_states()),
    ]
    for p, a, b, q in M.transitions():
        lines.append(f"succ: {nm(p)} ; {render_letter(a)} ; {render_letter(b)} ; {nm(q)}")
    for P, q in left:
        lines.append(f"llim: {sset(P)} ; {nm(q)}")
    for q, P in right:
        lines.append(f"rlim: {nm(q)} ; {sset(P)}")
    return "\n".join(lines) + "\n"


FIXTURES = ("fig1a", "fig1b", "fig4", "until", "finite-words-acceptor", "all-words-acceptor")


def fixture_path(name: str):
    return resources.files("lotl").joinpath("fixtures", f"{name}.aut")


def load_fixture(name: str, alphabet=None) -> Transducer:
    """Load a shipped fixture by name, or any ``.aut`` file by path."""
    if name in FIXTURES:
        return loads_automaton(fixture_path(name).read_text(), alphabet=alphabet, name=name)
    return load_automaton(name, alphabet=alphabet)
