"""Runs of transducers on finite words and on word terms.

A finite run is the tuple of states labelling the ``n + 1`` cuts of a
length-``n`` word.

For word terms the run is a :class:`RunTerm` that follows the term's shape
copy by copy: an omega power is labelled by a finite list of prefix copies
and a list of cycle copies repeated forever, followed by the exit state
entered through a left-limit transition.  A -omega power is the mirror
image.  A run may unroll a power further than the input term does (longer
prefix, cycle a multiple of the input's cycle).

The search works on *unfolded* inputs (:class:`IOmega` / :class:`INegOmega`
carry explicit prefix and cycle copies), which is what lets compositions be
searched component by component: the inner automaton's output, copy by copy,
is the outer automaton's unfolded input.
"""

from __future__ import annotations

import math
import weakref
from collections import deque
from dataclasses import dataclass

from .automaton import BaseTransducer, Transducer, reverse_automaton, state_name
from .errors import AlphabetError, BudgetExceeded, NoRunError, RunError, ShapeError
from .words import (
    Concat, Empty, Lit, NegOmegaPow, OmegaPow, Shuffle, WordTerm, concat,
    letters, render_letter,
)

__all__ = [
    "RunTerm", "RLit", "REmpty", "RConcat", "ROmega", "RNegOmega",
    "validate_finite_run", "enumerate_accepting_runs_finite", "find_run_term",
    "validate_run_term", "find_run", "to_unfolded", "render_run",
    "run_output_term", "zip_runs", "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 200_000


# ---------------------------------------------------------------------------
# finite words

def validate_finite_run(A: BaseTransducer, w, r) -> tuple:
    """Check an accepting run on a finite word and return its output."""
    w, r = tuple(w), tuple(r)
    if len(r) != len(w) + 1:
        raise RunError(f"run has {len(r)} states for a word of length {len(w)}")
    if not A.is_initial(r[0]):
        raise RunError(f"{state_name(r[0])} is not initial", "cut 0")
    out = []
    for i, a in enumerate(w):
        for b, q in A.successors(r[i], a):
            if q == r[i + 1]:
                out.append(b)
                break
        else:
            raise RunError(
                f"no transition {state_name(r[i])} --{render_letter(a)}|?--> "
                f"{state_name(r[i + 1])}", f"position {i}")
    if not A.is_final(r[-1]):
        raise RunError(f"{state_name(r[-1])} is not final", f"cut {len(w)}")
    return tuple(out)


def enumerate_accepting_runs_finite(A: BaseTransducer, w) -> list:
    """Every accepting run on ``w`` with its output, sorted by state names."""
    w = tuple(w)
    alphabet = set(A.alphabet_in)
    for a in w:
        if a not in alphabet:
            raise AlphabetError(f"letter {render_letter(a)} not in the input alphabet")
    runs = A.accepting_runs(w)
    return sorted(runs, key=lambda ro: (tuple(state_name(q) for q in ro[0]),
                                        tuple(map(render_letter, ro[1]))))


# ---------------------------------------------------------------------------
# unfolded inputs

@dataclass(frozen=True)
class IEmpty:
    pass


@dataclass(frozen=True)
class ILit:
    letter: object


@dataclass(frozen=True)
class IConcat:
    left: object
    right: object


@dataclass(frozen=True)
class IOmega:
    """``prefix[0] prefix[1] ... (cycle[0] ... cycle[-1])^w``"""
    prefix: tuple
    cycle: tuple


@dataclass(frozen=True)
class INegOmega:
    """``(cycle[0] ... cycle[-1])^-w suffix[0] ... suffix[-1]``"""
    cycle: tuple
    suffix: tuple


def to_unfolded(t: WordTerm):
    if isinstance(t, Empty):
        return IEmpty()
    if isinstance(t, Lit):
        return ILit(t.letter)
    if isinstance(t, Concat):
        return IConcat(to_unfolded(t.left), to_unfolded(t.right))
    if isinstance(t, OmegaPow):
        return IOmega((), (to_unfolded(t.body),))
    if isinstance(t, NegOmegaPow):
        return INegOmega((to_unfolded(t.body),), ())
    if isinstance(t, Shuffle):
        raise ShapeError("run search does not handle shuffle terms")
    raise TypeError(t)


def _reverse_unfolded(x):
    if isinstance(x, (IEmpty, ILit)):
        return x
    if isinstance(x, IConcat):
        return IConcat(_reverse_unfolded(x.right), _reverse_unfolded(x.left))
    if isinstance(x, IOmega):
        return INegOmega(tuple(map(_reverse_unfolded, reversed(x.cycle))),
                         tuple(map(_reverse_unfolded, reversed(x.prefix))))
    return IOmega(tuple(map(_reverse_unfolded, reversed(x.suffix))),
                  tuple(map(_reverse_unfolded, reversed(x.cycle))))


def _unfolded_term(x) -> WordTerm:
    if isinstance(x, IEmpty):
        return Empty()
    if isinstance(x, ILit):
        return Lit(x.letter)
    if isinstance(x, IConcat):
        return Concat(_unfolded_term(x.left), _unfolded_term(x.right))
    if isinstance(x, IOmega):
        return concat(*map(_unfolded_term, x.prefix),
                      OmegaPow(concat(*map(_unfolded_term, x.cycle))))
    return concat(NegOmegaPow(concat(*map(_unfolded_term, x.cycle))),
                  *map(_unfolded_term, x.suffix))


# ---------------------------------------------------------------------------
# run terms

class RunTerm:
    __slots__ = ()

    @property
    def entry(self):
        raise NotImplementedError

    @property
    def exit(self):
        raise NotImplementedError


@dataclass(frozen=True)
class REmpty(RunTerm):
    state: object

    @property
    def entry(self):
        return self.state

    @property
    def exit(self):
        return self.state


@dataclass(frozen=True)
class RLit(RunTerm):
    src: object
    letter: object
    out: object
    dst: object

    @property
    def entry(self):
        return self.src

    @property
    def exit(self):
        return self.dst


@dataclass(frozen=True)
class RConcat(RunTerm):
    left: RunTerm
    right: RunTerm

    @property
    def entry(self):
        return self.left.entry

    @property
    def exit(self):
        return self.right.exit


@dataclass(frozen=True)
class ROmega(RunTerm):
    prefix: tuple
    cycle: tuple
    exit_state: object

    @property
    def entry(self):
        return (self.prefix or self.cycle)[0].entry

    @property
    def exit(self):
        return self.exit_state


@dataclass(frozen=True)
class RNegOmega(RunTerm):
    entry_state: object
    cycle: tuple
    suffix: tuple

    @property
    def entry(self):
        return self.entry_state

    @property
    def exit(self):
        return (self.suffix or self.cycle)[-1].exit


def _reverse_run(r: RunTerm) -> RunTerm:
    if isinstance(r, REmpty):
        return r
    if isinstance(r, RLit):
        return RLit(r.dst, r.letter, r.out, r.src)
    if isinstance(r, RConcat):
        return RConcat(_reverse_run(r.right), _reverse_run(r.left))
    if isinstance(r, ROmega):
        return RNegOmega(r.exit_state, tuple(map(_reverse_run, reversed(r.cycle))),
                         tuple(map(_reverse_run, reversed(r.prefix))))
    return ROmega(tuple(map(_reverse_run, reversed(r.suffix))),
                  tuple(map(_reverse_run, reversed(r.cycle))), r.entry_state)


def _output_unfolded(r: RunTerm):
    """The output of a run, as an unfolded input for the next automaton."""
    if isinstance(r, REmpty):
        return IEmpty()
    if isinstance(r, RLit):
        return ILit(r.out)
    if isinstance(r, RConcat):
        return IConcat(_output_unfolded(r.left), _output_unfolded(r.right))
    if isinstance(r, ROmega):
        return IOmega(tuple(map(_output_unfolded, r.prefix)),
                      tuple(map(_output_unfolded, r.cycle)))
    return INegOmega(tuple(map(_output_unfolded, r.cycle)),
                     tuple(map(_output_unfolded, r.suffix)))


def run_output_term(r: RunTerm) -> WordTerm:
    """Output word of a run term; powers appear as ``prefix (cycle)^w``."""
    return _unfolded_term(_output_unfolded(r))


def render_run(r: RunTerm) -> str:
    """Compact text form: ``p -a|b-> q`` steps, powers as ``[prefix](cycle)^w->exit``."""
    if isinstance(r, REmpty):
        return f"[{state_name(r.state)}]"
    if isinstance(r, RLit):
        return (f"{state_name(r.src)} -{render_letter(r.letter)}|"
                f"{render_letter(r.out)}-> {state_name(r.dst)}")
    if isinstance(r, RConcat):
        return f"{render_run(r.left)} ; {render_run(r.right)}"
    if isinstance(r, ROmega):
        pre = " , ".join(map(render_run, r.prefix))
        cyc = " , ".join(map(render_run, r.cycle))
        return f"[{pre}]({cyc})^w =>{state_name(r.exit_state)}"
    pre = " , ".join(map(render_run, r.cycle))
    suf = " , ".join(map(render_run, r.suffix))
    return f"{state_name(r.entry_state)}=> ({pre})^-w[{suf}]"


# ---------------------------------------------------------------------------
# aligning two runs over the same input (used by products and compositions)

def _omega_copies(r: ROmega, k, l):
    kr, lr = len(r.prefix), len(r.cycle)

    def copy(i):
        return r.prefix[i] if i < kr else r.cycle[(i - kr) % lr]

    return [copy(i) for i in range(k)], [copy(i) for i in range(k, k + l)]


def _negomega_copies(r: RNegOmega, k, l):
    ks, lc = len(r.suffix), len(r.cycle)

    def copy(i):  # counted from the right
        return r.suffix[-1 - i] if i < ks else r.cycle[-1 - ((i - ks) % lc)]

    return ([copy(i) for i in range(k + l - 1, k - 1, -1)],
            [copy(i) for i in range(k - 1, -1, -1)])


def zip_runs(r1: RunTerm, r2: RunTerm, combine) -> RunTerm:
    """Pair two runs of identical skeleton, unrolling powers as needed.

    ``combine(l1, l2)`` builds the paired :class:`RLit`.
    """
    if isinstance(r1, REmpty) and isinstance(r2, REmpty):
        return REmpty((r1.state, r2.state))
    if isinstance(r1, RLit) and isinstance(r2, RLit):
        return combine(r1, r2)
    if isinstance(r1, RConcat) and isinstance(r2, RConcat):
        return RConcat(zip_runs(r1.left, r2.left, combine),
                       zip_runs(r1.right, r2.right, combine))
    if isinstance(r1, ROmega) and isinstance(r2, ROmega):
        k = max(len(r1.prefix), len(r2.prefix))
        l = math.lcm(len(r1.cycle), len(r2.cycle))
        p1, c1 = _omega_copies(r1, k, l)
        p2, c2 = _omega_copies(r2, k, l)
        return ROmega(tuple(zip_runs(a, b, combine) for a, b in zip(p1, p2)),
                      tuple(zip_runs(a, b, combine) for a, b in zip(c1, c2)),
                      (r1.exit_state, r2.exit_state))
    if isinstance(r1, RNegOmega) and isinstance(r2, RNegOmega):
        k = max(len(r1.suffix), len(r2.suffix))
        l = math.lcm(len(r1.cycle), len(r2.cycle))
        c1, s1 = _negomega_copies(r1, k, l)
        c2, s2 = _negomega_copies(r2, k, l)
        return RNegOmega((r1.entry_state, r2.entry_state),
                         tuple(zip_runs(a, b, combine) for a, b in zip(c1, c2)),
                         tuple(zip_runs(a, b, combine) for a, b in zip(s1, s2)))
    raise ShapeError(f"runs of different shape: {type(r1).__name__} vs {type(r2).__name__}")


# ---------------------------------------------------------------------------
# search on explicit transducers

def _bit(i):
    return 1 << i


class _Search:
    """Bottom-up run summaries ``(entry, exit, content) -> witness``.

    ``content`` is the bitmask of states labelling the cuts of the fragment.
    Limit conditions at the fragment's own boundaries (exit of an omega
    power, entry of a -omega power) are enforced when the summary is built.
    """

    def __init__(self, A: Transducer, budget: int):
        self.A = A
        self.V = A.indexed
        self.budget = budget
        self.memo: dict = {}
        self._rev = None

    def reverse(self):
        if self._rev is None:
            self._rev = _searcher(_reversed(self.A), self.budget)
        return self._rev

    def summaries(self, x) -> dict:
        s = self.memo.get(x)
        if s is None:
            if len(self.memo) > 50_000:
                self.memo.clear()
            s = self.memo[x] = self._compute(x)
        return s

    def _compute(self, x):
        V = self.V
        st = V.states
        out = {}
        if isinstance(x, IEmpty):
            for p in range(V.n):
                out[(p, p, _bit(p))] = REmpty(st[p])
        elif isinstance(x, ILit):
            for p in range(V.n):
                for b, q in V.succ_on.get((p, x.letter), ()):
                    out.setdefault((p, q, _bit(p) | _bit(q)), RLit(st[p], x.letter, b, st[q]))
        elif isinstance(x, IConcat):
            left = self.summaries(x.left)
            right = _by_entry(self.summaries(x.right))
            for (p, m, c1), w1 in left.items():
                for q, c2, w2 in right.get(m, ()):
                    out.setdefault((p, q, c1 | c2), (w1, w2))
            out = {k: RConcat(*v) for k, v in out.items()}
        elif isinstance(x, IOmega):
            out = self._omega(x)
        elif isinstance(x, INegOmega):
            rev = self.reverse().summaries(_reverse_unfolded(x))
            out = {(q, p, c): _reverse_run(w) for (p, q, c), w in rev.items()}
        else:
            raise TypeError(x)
        return out

    def _omega(self, x: IOmega):
        V = self.V
        pre = [_by_entry(self.summaries(c)) for c in x.prefix]
        cyc = [_by_entry(self.summaries(c)) for c in x.cycle]
        k, l = len(pre), len(cyc)
        steps = pre + cyc
        loops_cache: dict = {}
        work = [0]

        def tick():
            work[0] += 1
            if work[0] > self.budget:
                raise BudgetExceeded(f"omega-power search exceeded {self.budget} nodes")

        def path(parent, node):
            ws = []
            while parent[node] is not None:
                node, w = parent[node]
                ws.append(w)
            ws.reverse()
            return ws

        def loops(s):
            # content masks of cycles s -> s over whole input periods
            if s in loops_cache:
                return loops_cache[s]
            start = (0, s, 0)
            parent = {start: None}
            queue = deque([start])
            found = {}
            while queue:
                node = queue.popleft()
                ph, cur, acc = node
                for q, c, w in cyc[ph].get(cur, ()):
                    nph = (ph + 1) % l
                    nxt = (nph, q, acc | c)
                    if nxt not in parent:
                        tick()
                        parent[nxt] = (node, w)
                        queue.append(nxt)
                        if nph == 0 and q == s and nxt[2] not in found:
                            found[nxt[2]] = path(parent, nxt)
            loops_cache[s] = found
            return found

        out = {}
        for p in range(V.n):
            start = (0, p, _bit(p))
            parent = {start: None}
            queue = deque([start])
            ready = []  # nodes at the start of an input period
            while queue:
                node = queue.popleft()
                pos, cur, acc = node
                if pos == k:
                    ready.append(node)
                for q, c, w in steps[pos].get(cur, ()):
                    npos = pos + 1 if pos + 1 < k + l else k
                    nxt = (npos, q, acc | c)
                    if nxt not in parent:
                        tick()
                        parent[nxt] = (node, w)
                        queue.append(nxt)
            for node in ready:
                _, s, acc = node
                for cmask, cws in loops(s).items():
                    for q in V.ll_targets_of(cmask):
                        key = (p, q, acc | cmask | _bit(q))
                        if key not in out:
                            out[key] = ROmega(tuple(path(parent, node)), tuple(cws), V.states[q])
        return out


def _by_entry(summ: dict) -> dict:
    idx: dict = {}
    for (p, q, c), w in summ.items():
        idx.setdefault(p, []).append((q, c, w))
    return idx


_SEARCHERS: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()
_REVERSED: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _reversed(A: Transducer) -> Transducer:
    R = _REVERSED.get(A)
    if R is None:
        R = reverse_automaton(A)
        _REVERSED[A] = R
        _REVERSED[R] = A
    return R


def _searcher(A: Transducer, budget: int) -> _Search:
    s = _SEARCHERS.get(A)
    if s is None or s.budget != budget:
        s = _SEARCHERS[A] = _Search(A, budget)
    return s


def find_run(A: BaseTransducer, x, budget: int = DEFAULT_BUDGET) -> RunTerm:
    """An accepting run on the unfolded input ``x``."""
    if isinstance(A, Transducer):
        S = _searcher(A, budget)
        V = S.V
        for (p, q, _), w in S.summaries(x).items():
            if V.initial_mask >> p & 1 and V.final_mask >> q & 1:
                return w
        raise NoRunError("no accepting eventually periodic run")
    return A._find_run(x, budget)


def find_run_term(A: BaseTransducer, t: WordTerm, budget: int = DEFAULT_BUDGET):
    """Search an accepting run on ``t``; returns ``(RunTerm, output term)``.

    Powers are searched over eventually periodic runs.  ``NoRunError`` means
    no such run exists; ``BudgetExceeded`` means the search gave up.
    """
    alphabet = set(A.alphabet_in)
    bad = [a for a in letters(t) if a not in alphabet]
    if bad:
        raise AlphabetError(f"letter {render_letter(bad[0])} not in the input alphabet")
    r = find_run(A, to_unfolded(t), budget)
    return r, run_output_term(r)


# ---------------------------------------------------------------------------
# validation

def validate_run_term(A: BaseTransducer, t: WordTerm, r: RunTerm) -> WordTerm:
    """Check every run condition and return the output term.

    Raises :class:`RunError` naming the first violated condition and
    :class:`ShapeError` when ``r`` does not follow the shape of ``t``.
    """
    x = to_unfolded(t)
    _check(A, x, r, "root")
    if not A.is_initial(r.entry):
        raise RunError(f"{state_name(r.entry)} is not initial", "first cut")
    if not A.is_final(r.exit):
        raise RunError(f"{state_name(r.exit)} is not final", "last cut")
    return run_output_term(r)


def _fmt_set(P):
    return "{" + ",".join(sorted(map(state_name, P))) + "}"


def _check(A, x, r, loc) -> frozenset:
    """Validate ``r`` against ``x``; return the run's content."""
    if isinstance(x, IEmpty):
        if not isinstance(r, REmpty):
            raise ShapeError(f"{loc}: expected an empty run")
        return frozenset([r.state])
    if isinstance(x, ILit):
        if not isinstance(r, RLit):
            raise ShapeError(f"{loc}: expected a single step")
        if r.letter != x.letter:
            raise RunError(f"step reads {render_letter(r.letter)}, input is "
                           f"{render_letter(x.letter)}", loc)
        if (r.out, r.dst) not in A.successors(r.src, r.letter):
            raise RunError(
                f"missing successor {state_name(r.src)} --{render_letter(r.letter)}|"
                f"{render_letter(r.out)}--> {state_name(r.dst)}", loc)
        return frozenset([r.src, r.dst])
    if isinstance(x, IConcat):
        if not isinstance(r, RConcat):
            raise ShapeError(f"{loc}: expected a concatenation")
        if r.left.exit != r.right.entry:
            raise RunError(f"boundary mismatch {state_name(r.left.exit)} / "
                           f"{state_name(r.right.entry)}", loc)
        return _check(A, x.left, r.left, loc + ".l") | _check(A, x.right, r.right, loc + ".r")
    if isinstance(x, IOmega):
        if not isinstance(r, ROmega):
            raise ShapeError(f"{loc}: expected an omega run")
        kx, lx, kr, lr = len(x.prefix), len(x.cycle), len(r.prefix), len(r.cycle)
        if kr < kx or lr == 0 or lr % lx:
            raise ShapeError(f"{loc}: run copies ({kr}+{lr}) do not unroll input ({kx}+{lx})")
        copies = r.prefix + r.cycle
        content = frozenset([r.exit_state])
        cyc_content = frozenset()
        for i, c in enumerate(copies):
            xi = x.prefix[i] if i < kx else x.cycle[(i - kx) % lx]
            sub = _check(A, xi, c, f"{loc}.copy[{i}]")
            content |= sub
            if i >= kr:
                cyc_content |= sub
            nxt = copies[i + 1] if i + 1 < len(copies) else r.cycle[0]
            if c.exit != nxt.entry:
                raise RunError(f"copy boundary mismatch {state_name(c.exit)} / "
                               f"{state_name(nxt.entry)}", f"{loc}.copy[{i}]")
        if not A.left_limit(cyc_content, r.exit_state):
            raise RunError(f"missing left-limit {_fmt_set(cyc_content)} -> "
                           f"{state_name(r.exit_state)}", loc)
        return content
    if isinstance(x, INegOmega):
        if not isinstance(r, RNegOmega):
            raise ShapeError(f"{loc}: expected a -omega run")
        kx, lx, kr, lr = len(x.suffix), len(x.cycle), len(r.suffix), len(r.cycle)
        if kr < kx or lr == 0 or lr % lx:
            raise ShapeError(f"{loc}: run copies ({lr}+{kr}) do not unroll input ({lx}+{kx})")
        copies = r.cycle + r.suffix
        content = frozenset([r.entry_state])
        cyc_content = frozenset()
        for i, c in enumerate(copies):
            j = len(copies) - 1 - i  # index from the right
            xi = x.suffix[-1 - j] if j < kx else x.cycle[-1 - ((j - kx) % lx)]
            sub = _check(A, xi, c, f"{loc}.copy[{i}]")
            content |= sub
            if i < lr:
                cyc_content |= sub
            prev = copies[i - 1] if i > 0 else r.cycle[-1]
            if prev.exit != c.entry:
                raise RunError(f"copy boundary mismatch {state_name(prev.exit)} / "
                               f"{state_name(c.entry)}", f"{loc}.copy[{i}]")
        if not A.right_limit(r.entry_state, cyc_content):
            raise RunError(f"missing right-limit {state_name(r.entry_state)} -> "
                           f"{_fmt_set(cyc_content)}", loc)
        return content
    raise TypeError(x)
