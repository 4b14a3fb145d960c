"""Reference semantics used as ground truth for the automata.

``eval_finite`` is a linear dynamic program over a finite word,
``eval_finite_naive`` transcribes the quantifiers literally, and ``eval_up``
evaluates formulas on ultimately periodic words ``u v^w``.  Neither uses any
automaton.  On finite and omega words there are no gaps, so the Stavi
connectives are constantly false.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .formula import (
    FALSE, TRUE, Atom, Const, Formula, Not, Or, Since, StaviSince, StaviUntil,
    Until, depth, render,
)
from .words import (
    Lit, OmegaPow, WordTerm, concat, is_finite, power_set, render_finite,
    render_term, simplify, to_finite, word, _factors,
)

__all__ = [
    "eval_finite", "eval_finite_naive", "UPWord", "eval_up", "formula_corpus",
    "formulas_up_to_depth", "finite_words", "up_words", "SuiteConfig",
    "Report", "differential_suite",
]


# ---------------------------------------------------------------------------
# finite words

def eval_finite(f: Formula, w: Sequence) -> tuple:
    """Truth word of ``f`` on the finite word ``w`` (letters are sets of atoms)."""
    w = tuple(w)
    memo: dict = {}

    def ev(g):
        r = memo.get(g)
        if r is not None:
            return r
        n = len(w)
        if isinstance(g, Atom):
            r = [int(g.name in a) for a in w]
        elif isinstance(g, Const):
            r = [int(g.value)] * n
        elif isinstance(g, Not):
            r = [1 - x for x in ev(g.child)]
        elif isinstance(g, Or):
            r = [x | y for x, y in zip(ev(g.left), ev(g.right))]
        elif isinstance(g, Until):
            phi, psi = ev(g.left), ev(g.right)
            r = [0] * n
            for i in range(n - 2, -1, -1):
                r[i] = psi[i + 1] | (phi[i + 1] & r[i + 1])
        elif isinstance(g, Since):
            phi, psi = ev(g.left), ev(g.right)
            r = [0] * n
            for i in range(1, n):
                r[i] = psi[i - 1] | (phi[i - 1] & r[i - 1])
        elif isinstance(g, (StaviUntil, StaviSince)):
            r = [0] * n
        else:
            raise TypeError(f"not a core formula: {g!r}")
        r = tuple(r)
        memo[g] = r
        return r

    return ev(f)


def eval_finite_naive(f: Formula, w: Sequence) -> tuple:
    """Same semantics as :func:`eval_finite`, quantifiers spelled out."""
    w = tuple(w)

    def holds(g, x, i):
        if isinstance(g, Atom):
            return g.name in x[i]
        if isinstance(g, Const):
            return g.value
        if isinstance(g, Not):
            return not holds(g.child, x, i)
        if isinstance(g, Or):
            return holds(g.left, x, i) or holds(g.right, x, i)
        if isinstance(g, Until):
            return any(holds(g.right, x, j)
                       and all(holds(g.left, x, k) for k in range(i + 1, j))
                       for j in range(i + 1, len(x)))
        if isinstance(g, Since):
            # evaluated as Until on the reversed word
            rx = x[::-1]
            return holds(Until(_rev(g.left), _rev(g.right)), rx, len(x) - 1 - i)
        if isinstance(g, (StaviUntil, StaviSince)):
            return False  # no gaps in a finite ordering
        raise TypeError(g)

    return tuple(int(holds(f, w, i)) for i in range(len(w)))


def _rev(g: Formula) -> Formula:
    """Swap past and future connectives (semantics on the reversed word)."""
    if isinstance(g, (Atom, Const)):
        return g
    if isinstance(g, Not):
        return Not(_rev(g.child))
    swap = {Until: Since, Since: Until, StaviUntil: StaviSince, StaviSince: StaviUntil, Or: Or}
    return swap[type(g)](_rev(g.left), _rev(g.right))


# ---------------------------------------------------------------------------
# ultimately periodic words

@dataclass(frozen=True)
class UPWord:
    """The omega word ``prefix cycle cycle cycle ...``."""

    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise ValueError("the cycle of an ultimately periodic word is nonempty")

    def at(self, i: int):
        k = len(self.prefix)
        return self.prefix[i] if i < k else self.cycle[(i - k) % len(self.cycle)]

    def normalized(self) -> "UPWord":
        """Shortest presentation: primitive cycle, prefix rolled into it."""
        cyc = list(self.cycle)
        n = len(cyc)
        for k in range(1, n + 1):
            if n % k == 0 and cyc[:k] * (n // k) == cyc:
                cyc = cyc[:k]
                break
        pre = list(self.prefix)
        while pre and pre[-1] == cyc[-1]:
            pre.pop()
            cyc = cyc[-1:] + cyc[:-1]
        return UPWord(tuple(pre), tuple(cyc))

    def term(self) -> WordTerm:
        return concat(*(Lit(a) for a in self.prefix), OmegaPow(word(self.cycle)))

    @classmethod
    def from_term(cls, t: WordTerm) -> "UPWord":
        """Read ``u v^w`` back from a term of that shape."""
        fs = _factors(simplify(t))
        if not fs or not isinstance(fs[-1], OmegaPow) or not is_finite(fs[-1].body):
            raise ValueError(f"not an ultimately periodic term: {render_term(t)}")
        if not all(isinstance(x, Lit) for x in fs[:-1]):
            raise ValueError(f"not an ultimately periodic term: {render_term(t)}")
        return cls(tuple(x.letter for x in fs[:-1]), to_finite(fs[-1].body)).normalized()

    def __str__(self):
        return render_term(self.term())


def _aligned(words: Iterable[UPWord]):
    words = list(words)
    n = max(len(w.prefix) for w in words)
    p = 1
    for w in words:
        p = math.lcm(p, len(w.cycle))
    return n, p


def _from_values(vals, n, p) -> UPWord:
    return UPWord(tuple(vals[:n]), tuple(vals[n:n + p])).normalized()


def eval_up(f: Formula, w: UPWord) -> UPWord:
    """Truth word of ``f`` on the ultimately periodic word ``w``."""
    memo: dict = {}

    def ev(g) -> UPWord:
        r = memo.get(g)
        if r is None:
            r = memo[g] = _ev(g)
        return r

    def _ev(g):
        if isinstance(g, Atom):
            return UPWord(tuple(int(g.name in a) for a in w.prefix),
                          tuple(int(g.name in a) for a in w.cycle)).normalized()
        if isinstance(g, Const):
            return UPWord((), (int(g.value),))
        if isinstance(g, (StaviUntil, StaviSince)):
            return UPWord((), (0,))
        if isinstance(g, Not):
            c = ev(g.child)
            return UPWord(tuple(1 - x for x in c.prefix), tuple(1 - x for x in c.cycle))
        phi, psi = ev(g.left), ev(g.right)
        n, p = _aligned([phi, psi])
        if isinstance(g, Or):
            return _from_values([phi.at(i) | psi.at(i) for i in range(n + p)], n, p)
        if isinstance(g, Until):
            vals = []
            for i in range(n + p):
                v = 0
                # positions after max(i, n) repeat with period p, so the first
                # psi after i (if any) occurs by max(i, n) + p
                for j in range(i + 1, max(i, n) + p + 1):
                    if psi.at(j):
                        v = int(all(phi.at(k) for k in range(i + 1, j)))
                        break
                vals.append(v)
            return _from_values(vals, n, p)
        if isinstance(g, Since):
            # values settle into period p from n + p on
            vals = []
            for i in range(n + 2 * p):
                v = 0
                for j in range(i - 1, -1, -1):
                    if psi.at(j):
                        v = int(all(phi.at(k) for k in range(j + 1, i)))
                        break
                vals.append(v)
            return _from_values(vals, n + p, p)
        raise TypeError(f"not a core formula: {g!r}")

    return ev(f)


# ---------------------------------------------------------------------------
# corpora

_BINARY = (Or, Until, Since, StaviUntil, StaviSince)


def formulas_up_to_depth(props: Sequence[str], d: int) -> list:
    """Every core formula of depth <= d, in a fixed order."""
    leaves = [Atom(p) for p in sorted(props)] + [TRUE, FALSE]
    levels = [leaves]
    everything = list(leaves)
    for _ in range(d):
        prev = list(everything)
        new = [Not(g) for g in prev if depth(g) == len(levels) - 1]
        new += [op(l, r) for op in _BINARY for l in prev for r in prev
                if max(depth(l), depth(r)) == len(levels) - 1]
        levels.append(new)
        everything += new
    return everything


def _random_formula(rng: random.Random, props, d: int) -> Formula:
    if d == 0 or rng.random() < 0.15:
        leaves = [Atom(p) for p in sorted(props)] + [TRUE, FALSE]
        return rng.choice(leaves)
    if rng.random() < 0.2:
        return Not(_random_formula(rng, props, d - 1))
    op = rng.choice(_BINARY)
    return op(_random_formula(rng, props, d - 1), _random_formula(rng, props, d - 1))


def formula_corpus(props: Sequence[str], max_depth: int, cap: int, seed: int = 0,
                   exhaustive_depth: int = 1) -> list:
    """All formulas of depth <= ``exhaustive_depth``, then seeded random ones.

    The result has at most ``cap`` distinct formulas, all of depth
    <= ``max_depth``, and depends only on the arguments.
    """
    base = formulas_up_to_depth(props, min(exhaustive_depth, max_depth))
    seen = dict.fromkeys(base[:cap])
    rng = random.Random(seed)
    attempts = 0
    while len(seen) < cap and attempts < 100 * cap:
        attempts += 1
        g = _random_formula(rng, props, max_depth)
        seen.setdefault(g)
    return list(seen)


def finite_words(props: Sequence[str], max_len: int, min_len: int = 0) -> list:
    """Every word over ``2^props`` with length in ``[min_len, max_len]``."""
    alphabet = power_set(props)
    return [w for n in range(min_len, max_len + 1)
            for w in itertools.product(alphabet, repeat=n)]


def up_words(props: Sequence[str], max_prefix: int, max_cycle: int) -> list:
    alphabet = power_set(props)
    pres = finite_words(props, max_prefix)
    cycs = finite_words(props, max_cycle, 1)
    return [UPWord(u, v) for u in pres for v in cycs]


# ---------------------------------------------------------------------------
# differential testing

@dataclass
class SuiteConfig:
    props: tuple = ("a", "b")
    depth: int = 3
    max_len: int = 4
    cap: int = 500
    seed: int = 0
    mode: str = "finite"          # "finite" or "up"
    max_prefix: int = 3
    max_cycle: int = 3


@dataclass
class Report:
    lines: list = field(default_factory=list)
    ok: int = 0
    fail: int = 0
    first_failure: tuple | None = None
    shrunk: tuple | None = None

    def render(self, failures_only: bool = False) -> str:
        body = [l for l in self.lines if not failures_only or l.startswith("FAIL")]
        foot = [f"total {self.ok + self.fail}  ok {self.ok}  fail {self.fail}"]
        if self.shrunk is not None:
            f, w, exp, got = self.shrunk
            foot.append(f"shrunk counterexample: {f} on {w}: expected {exp} got {got}")
        return "\n".join(body + foot) + "\n"


def _bits(seq) -> str:
    return "".join(map(str, seq)) if seq else "()"


def _finite_case(f, w, props):
    """``(ok, expected, got)`` for one formula and finite word."""
    from .construction import compile_formula
    from .runs import enumerate_accepting_runs_finite

    expected = eval_finite(f, w)
    runs = enumerate_accepting_runs_finite(compile_formula(f, props), w)
    if len(runs) != 1:
        return False, _bits(expected), f"{len(runs)} runs"
    got = runs[0][1]
    return got == expected, _bits(expected), _bits(got)


def _up_case(f, w: UPWord, props):
    from .construction import compile_formula
    from .runs import find_run_term

    expected = eval_up(f, w)
    A = compile_formula(f, props)
    try:
        _, out = find_run_term(A, w.term())
        got = str(UPWord.from_term(out))
    except Exception as e:  # a failure is reported, never raised
        return False, str(expected), type(e).__name__
    return got == str(expected), str(expected), got


def _shrink(f, w, mode, check):
    """Smaller failing pair: subformulas first, then shorter words."""
    changed = True
    while changed:
        changed = False
        for g in f.children:
            if not check(g, w)[0]:
                f, changed = g, True
                break
        if changed:
            continue
        for cand in _smaller_words(w, mode):
            if not check(f, cand)[0]:
                w, changed = cand, True
                break
    return f, w


def _smaller_words(w, mode):
    if mode == "finite":
        return [w[:i] + w[i + 1:] for i in range(len(w))]
    out = [UPWord(w.prefix[:i] + w.prefix[i + 1:], w.cycle) for i in range(len(w.prefix))]
    if len(w.cycle) > 1:
        out += [UPWord(w.prefix, w.cycle[:i] + w.cycle[i + 1:]) for i in range(len(w.cycle))]
    return out


def _word_text(w, mode):
    return render_finite(w) if mode == "finite" else str(w)


def differential_suite(config: SuiteConfig = SuiteConfig()) -> Report:
    """Compare compiled transducers against the oracle on a fixed corpus."""
    props = tuple(sorted(config.props))
    formulas = formula_corpus(props, config.depth, config.cap, config.seed)
    if config.mode == "finite":
        words, case = finite_words(props, config.max_len), _finite_case
    else:
        words, case = up_words(props, config.max_prefix, config.max_cycle), _up_case

    def check(f, w):
        return case(f, w, props)

    rep = Report()
    for f in formulas:
        for w in words:
            ok, exp, got = check(f, w)
            text = f"{'OK' if ok else 'FAIL'} {render(f)} {_word_text(w, config.mode)} {exp} {got}"
            rep.lines.append(text)
            if ok:
                rep.ok += 1
            else:
                rep.fail += 1
                if rep.first_failure is None:
                    rep.first_failure = (f, w)
    if rep.first_failure is not None:
        f, w = _shrink(*rep.first_failure, config.mode, check)
        _, exp, got = check(f, w)
        rep.shrunk = (render(f), _word_text(w, config.mode), exp, got)
    return rep
