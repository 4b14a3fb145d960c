"""Emptiness and satisfiability by saturation of path items.

An item ``(p, C, q, nonempty)`` records that some run fragment goes from a
cut labelled ``p`` to a cut labelled ``q`` and that ``C`` is exactly the set of
states labelling its cuts.  Rules:

* base      ``(p, {p}, p, False)``
* succ      extend an item by one successor transition
* cat       join two items on a shared state
* omega     iterate a nonempty loop ``(p, C, p)`` omega times, then a left
            limit ``C -> q``
* negomega  mirror image with a right limit ``q -> C``
* shuffle   a dense shuffle of nonempty items whose union ``U`` has limit
            transitions into each item's source and out of each item's
            target, entered by ``p -> U`` and left by ``U -> q``
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field

from .automaton import BaseTransducer, Transducer, materialize, state_name
from .construction import compile_formula, product
from .errors import AlphabetError, ResourceExceeded
from .formula import Formula, atoms
from .words import power_set, render_letter

__all__ = [
    "PathItem", "ALL_RULES", "parse_rules", "saturate", "is_transition_live",
    "is_empty", "satisfiable", "satisfiable_within", "Verdict", "Saturation",
    "default_max_items",
]

ALL_RULES = frozenset({"succ", "cat", "omega", "negomega", "shuffle"})
DEFAULT_MAX_ITEMS = 1_000_000
SHUFFLE_CANDIDATE_CAP = 1 << 14


def default_max_items() -> int:
    env = os.environ.get("LOTL_MAX_ITEMS")
    return int(env) if env else DEFAULT_MAX_ITEMS


def parse_rules(text: str | None) -> frozenset:
    """``"succ,cat,omega"`` -> rule set; ``None``/``"all"`` -> every rule."""
    if text is None or text.strip() == "all":
        return ALL_RULES
    rules = frozenset(r.strip() for r in text.split(",") if r.strip())
    unknown = rules - ALL_RULES
    if unknown:
        raise ValueError(f"unknown rules: {', '.join(sorted(unknown))}")
    return rules


@dataclass(frozen=True, order=True)
class PathItem:
    source: object
    content: frozenset = field(compare=False)
    target: object
    nonempty: bool

    def render(self) -> str:
        c = ",".join(sorted(map(state_name, self.content)))
        mark = "+" if self.nonempty else "e"
        return f"({state_name(self.source)}, {{{c}}}, {state_name(self.target)}, {mark})"


class Saturation:
    """Result of :func:`saturate`: items as ``(p, mask, q, nonempty)`` over indices."""

    def __init__(self, A: Transducer, rules, items, provenance, complete=True):
        self.A = A
        self.V = A.indexed
        self.rules = rules
        self.raw = items
        self.provenance = provenance
        self.complete = complete
        self._src: dict = {}
        self._tgt: dict = {}
        for it in items:
            self._src.setdefault(it[0], []).append(it)
            self._tgt.setdefault(it[2], []).append(it)

    def __len__(self):
        return len(self.raw)

    def items(self) -> list[PathItem]:
        V = self.V
        return sorted(
            (PathItem(V.states[p], V.to_set(c), V.states[q], m) for p, c, q, m in self.raw),
            key=lambda i: (V.index[i.source], V.index[i.target], i.nonempty,
                           sorted(V.index[s] for s in i.content)))

    def has(self, p, C, q, nonempty) -> bool:
        V = self.V
        mask = 0
        for s in C:
            mask |= 1 << V.index[s]
        return (V.index[p], mask, V.index[q], nonempty) in self.raw

    def reaches(self, p: int, q: int, nonempty: bool | None = None):
        """First item from index ``p`` to index ``q``, or None."""
        for it in self._src.get(p, ()):
            if it[2] == q and (nonempty is None or it[3] == nonempty):
                return it
        return None

    def accessible(self, q: int):
        for it in self._tgt.get(q, ()):
            if self.V.initial_mask >> it[0] & 1:
                return it
        return None

    def coaccessible(self, q: int):
        for it in self._src.get(q, ()):
            if self.V.final_mask >> it[2] & 1:
                return it
        return None

    def derivation(self, item) -> list[str]:
        """Rule applications leading to ``item``, leaves first."""
        V = self.V
        seen, lines = set(), []

        def fmt(it):
            p, c, q, m = it
            return PathItem(V.states[p], V.to_set(c), V.states[q], m).render()

        def walk(it):
            if it in seen:
                return
            seen.add(it)
            rule, parents = self.provenance.get(it, ("?", ()))
            for par in parents:
                walk(par)
            lines.append(f"{rule}: {fmt(it)}")

        walk(item)
        return lines


def _acceptor(A: BaseTransducer) -> Transducer:
    return materialize(A)


def saturate(A: BaseTransducer, rules=ALL_RULES, max_items: int | None = None) -> Saturation:
    """Least fixed point of the enabled rules.

    Concatenation is associative, so every item is built left to right:
    an item is only ever extended on the right by a *piece*, i.e. a single
    successor step (rule succ) or an item produced by omega, negomega or
    shuffle (rule cat).  This gives the same closure as joining arbitrary
    pairs, at a fraction of the cost.

    Raises :class:`ResourceExceeded` (carrying the partial
    :class:`Saturation`) when more than ``max_items`` items are derived.
    """
    rules = frozenset(rules)
    if max_items is None:
        max_items = default_max_items()
    M = _acceptor(A)
    V = M.indexed
    n = V.n
    items: set = set()
    prov: dict = {}
    done_by_tgt = [[] for _ in range(n)]
    pieces = [[] for _ in range(n)]       # (piece, rule) by source
    piece_set: set = set()
    queue: deque = deque()

    def add(it, rule, parents, piece=False):
        if it not in items:
            if len(items) >= max_items:
                raise ResourceExceeded(
                    f"saturation exceeded {max_items} items",
                    Saturation(M, rules, frozenset(items), dict(prov), complete=False))
            items.add(it)
            prov[it] = (rule, parents)
            queue.append(it)
        if piece and it not in piece_set:
            piece_set.add(it)
            ext = "succ" if rule == "succ" else "cat"
            if ext in rules:
                pieces[it[0]].append((it, ext))
                _, c2, r, _ = it
                for left in list(done_by_tgt[it[0]]):
                    new = (left[0], left[1] | c2, r, True)
                    if new not in items:
                        add(new, ext, (left, it))

    def drain():
        while queue:
            it = queue.popleft()
            p, c, q, m = it
            done_by_tgt[q].append(it)
            for piece, ext in list(pieces[q]):
                new = (p, c | piece[1], piece[2], True)
                if new not in items:
                    add(new, ext, (it, piece))
            if m and p == q:
                if "omega" in rules:
                    for t in V.ll_targets_of(c):
                        add((p, c | 1 << t, t, True), "omega", (it,), piece=True)
                if "negomega" in rules:
                    for s in V.rl_sources_of(c):
                        add((s, c | 1 << s, p, True), "negomega", (it,), piece=True)

    for p in range(n):
        add((p, 1 << p, p, False), "base", ())
    if "succ" in rules:
        for p in range(n):
            for r in sorted({q for _, _, q in V.succ[p]}):
                add((p, 1 << p | 1 << r, r, True), "succ", (), piece=True)
    drain()
    complete = True
    if "shuffle" in rules:
        while True:
            before = len(items)
            complete &= _shuffle_pass(V, items, add)
            drain()
            if len(items) == before:
                break
    return Saturation(M, rules, frozenset(items), prov, complete)


def _shuffle_pass(V, items, add) -> bool:
    """Apply the shuffle rule for every valid union; False if candidates were capped."""
    ll_t = set(V.ll_targets)
    rl_s = set(V.rl_sources)
    pool = sorted(it for it in items if it[3] and it[0] in ll_t and it[2] in rl_s)
    unions: set = set()
    complete = True
    for c in sorted({it[1] for it in pool}):
        new = {c} | {u | c for u in unions}
        unions |= new
        if len(unions) > SHUFFLE_CANDIDATE_CAP:
            complete = False
            break
    for U in sorted(unions):
        lt = V.ll_targets_of(U)
        rs = V.rl_sources_of(U)
        if not lt or not rs:
            continue
        lt_set, rs_set = set(lt), set(rs)
        used = [it for it in pool
                if it[1] & ~U == 0 and it[0] in lt_set and it[2] in rs_set]
        cover = 0
        for it in used:
            cover |= it[1]
        if cover != U:
            continue
        parents = tuple(used)
        for p in rs:       # p -> U
            for q in lt:   # U -> q
                add((p, U | 1 << p | 1 << q, q, True), "shuffle", parents, piece=True)
    return complete


def is_transition_live(A: BaseTransducer, t, sat: Saturation) -> bool:
    """Accessible and co-accessible: ``I ~> source(t)`` and ``target(t) ~> F``."""
    p, _a, _b, q = t
    V = sat.V
    return (sat.accessible(V.index[p]) is not None
            and sat.coaccessible(V.index[q]) is not None)


def is_empty(A: BaseTransducer, rules=ALL_RULES, max_items=None,
             nonempty_words: bool = False) -> bool:
    """True iff no word is accepted.

    With ``nonempty_words`` the empty word is ignored.
    """
    sat = saturate(A, rules, max_items)
    V = sat.V
    if not nonempty_words and V.initial_mask & V.final_mask:
        return False
    for i in V.initial:
        for it in sat._src.get(i, ()):
            if it[3] and V.final_mask >> it[2] & 1:
                return False
    return True


@dataclass
class Verdict:
    status: str                    # SAT, UNSAT or UNKNOWN
    transition: tuple | None = None
    trace: list = field(default_factory=list)
    items: int = 0
    complete: bool = True

    def __str__(self):
        return self.status


def _live_one(sat: Saturation, is_one) -> tuple | None:
    """First live transition whose output satisfies ``is_one``."""
    M, V = sat.A, sat.V
    for p, a, b, q in M.transitions():
        if not is_one(b):
            continue
        left = sat.accessible(V.index[p])
        if left is None:
            continue
        right = sat.coaccessible(V.index[q])
        if right is None:
            continue
        return (p, a, b, q), left, right
    return None


def _finite_witness(A: BaseTransducer, is_one) -> Verdict | None:
    """Cheap first pass: a live 1-transition on a finite accepted word.

    Plain reachability over successor transitions; content sets play no
    role on finite paths, so this avoids the saturation blow-up whenever a
    finite model exists.
    """
    M = materialize(A)
    fwd = {q: None for q in M.initial_states()}
    todo = deque(fwd)
    while todo:
        p = todo.popleft()
        for a in M.alphabet_in:
            for b, q in M.successors(p, a):
                if q not in fwd:
                    fwd[q] = (p, a, b)
                    todo.append(q)
    pred: dict = {}
    for p, a, b, q in M.transitions():
        pred.setdefault(q, []).append((p, a, b))
    bwd = {q: None for q in M.final_states()}
    todo = deque(bwd)
    while todo:
        q = todo.popleft()
        for p, a, b in pred.get(q, ()):
            if p not in bwd:
                bwd[p] = (a, b, q)
                todo.append(p)
    for p, a, b, q in M.transitions():
        if is_one(b) and p in fwd and q in bwd:
            steps = []
            x = p
            while fwd[x] is not None:
                y, c, d = fwd[x]
                steps.append((y, c, d, x))
                x = y
            steps.reverse()
            steps.append((p, a, b, q))
            x = q
            while bwd[x] is not None:
                c, d, y = bwd[x]
                steps.append((x, c, d, y))
                x = y
            trace = ["finite witness:"] + [
                f"  {state_name(u)} --{render_letter(c)}|{render_letter(d)}--> {state_name(v)}"
                for u, c, d, v in steps]
            trace.append(f"live: {state_name(p)} --{render_letter(a)}|{render_letter(b)}--> "
                         f"{state_name(q)}")
            return Verdict("SAT", (p, a, b, q), trace, 0, True)
    return None


def _decide(A: BaseTransducer, is_one, rules, max_items) -> Verdict:
    if "succ" in rules:
        v = _finite_witness(A, is_one)
        if v is not None:
            return v
    try:
        sat = saturate(A, rules, max_items)
        partial = False
    except ResourceExceeded as e:
        sat, partial = e.partial, True
    hit = _live_one(sat, is_one)
    if hit is None:
        if partial:
            return Verdict("UNKNOWN", items=len(sat), complete=False)
        return Verdict("UNSAT", items=len(sat), complete=sat.complete)
    (p, a, b, q), left, right = hit
    trace = sat.derivation(left) + sat.derivation(right)
    trace.append(f"live: {state_name(p)} --{render_letter(a)}|{render_letter(b)}--> "
                 f"{state_name(q)}")
    return Verdict("SAT", (p, a, b, q), trace, len(sat), sat.complete)


def satisfiable(f: Formula, rules=ALL_RULES, max_items=None, props=None) -> Verdict:
    """SAT iff a transition of ``compile(f)`` with output 1 is live."""
    A = compile_formula(f, props)
    return _decide(A, lambda b: b == 1, frozenset(rules), max_items)


def satisfiable_within(f: Formula, B: BaseTransducer, rules=ALL_RULES,
                       max_items=None) -> Verdict:
    """Satisfiability restricted to the words accepted by ``B``.

    ``B``'s input alphabet must be ``2^AP`` for some ``AP`` containing the
    atoms of ``f``.
    """
    props = frozenset().union(*B.alphabet_in) if B.alphabet_in else frozenset()
    if set(B.alphabet_in) != set(power_set(props)):
        raise AlphabetError("the class automaton must read letters over 2^AP")
    if not atoms(f) <= props:
        raise AlphabetError(f"propositions {sorted(atoms(f) - props)} not in the class alphabet")
    A = product(compile_formula(f, props), B)
    return _decide(A, lambda b: b[0] == 1, frozenset(rules), max_items)
