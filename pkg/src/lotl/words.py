"""Words indexed by finitely presented linear orderings.

A word is given by a term built from letters, concatenation, the
omega power ``t^w`` (order type omega), the reversed power ``t^-w``
(order type -omega) and the shuffle ``sh(t1, ..., tn)``.

Letters are plain hashable values:

* ``frozenset`` of proposition names for words over ``2^AP``,
  written ``{a,b}`` or ``{}``;
* ``0``/``1`` for truth bits;
* tuples for letters of product alphabets, written ``<1,0>``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InfiniteTermError, ParseError, ShapeError

__all__ = [
    "WordTerm", "Empty", "Lit", "Concat", "OmegaPow", "NegOmegaPow", "Shuffle",
    "EMPTY", "concat", "word", "parse_term", "parse_letter", "render_term",
    "render_letter", "reverse_term", "to_finite", "zip_terms", "project",
    "letters", "is_empty_word", "is_finite", "simplify", "power_set",
    "ap_letter", "render_finite",
]


class WordTerm:
    __slots__ = ()

    def __str__(self):
        return render_term(self)


@dataclass(frozen=True)
class Empty(WordTerm):
    pass


EMPTY = Empty()


@dataclass(frozen=True)
class Lit(WordTerm):
    letter: object


@dataclass(frozen=True)
class Concat(WordTerm):
    left: WordTerm
    right: WordTerm


@dataclass(frozen=True)
class OmegaPow(WordTerm):
    body: WordTerm

    def __post_init__(self):
        if is_empty_word(self.body):
            raise ShapeError("omega power of the empty word")


@dataclass(frozen=True)
class NegOmegaPow(WordTerm):
    body: WordTerm

    def __post_init__(self):
        if is_empty_word(self.body):
            raise ShapeError("-omega power of the empty word")


@dataclass(frozen=True)
class Shuffle(WordTerm):
    bodies: tuple

    def __post_init__(self):
        object.__setattr__(self, "bodies", tuple(self.bodies))
        if not self.bodies:
            raise ShapeError("shuffle of no words")
        if any(is_empty_word(b) for b in self.bodies):
            raise ShapeError("shuffle of the empty word")


def is_empty_word(t: WordTerm) -> bool:
    if isinstance(t, Empty):
        return True
    if isinstance(t, Concat):
        return is_empty_word(t.left) and is_empty_word(t.right)
    return False


def concat(*parts: WordTerm) -> WordTerm:
    """Right-nested concatenation; ``concat()`` is the empty word."""
    if not parts:
        return EMPTY
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Concat(p, out)
    return out


def word(letters_: Iterable) -> WordTerm:
    """Term for a finite word."""
    return concat(*(Lit(a) for a in letters_))


def ap_letter(*names: str) -> frozenset:
    return frozenset(names)


def power_set(props: Iterable[str]) -> tuple[frozenset, ...]:
    """All letters over ``2^AP`` in a fixed order (by size, then names)."""
    props = sorted(set(props))
    return tuple(
        frozenset(c)
        for k in range(len(props) + 1)
        for c in itertools.combinations(props, k)
    )


# ---------------------------------------------------------------------------
# structural operations

def reverse_term(t: WordTerm) -> WordTerm:
    if isinstance(t, (Empty, Lit)):
        return t
    if isinstance(t, Concat):
        return Concat(reverse_term(t.right), reverse_term(t.left))
    if isinstance(t, OmegaPow):
        return NegOmegaPow(reverse_term(t.body))
    if isinstance(t, NegOmegaPow):
        return OmegaPow(reverse_term(t.body))
    if isinstance(t, Shuffle):
        return Shuffle(tuple(reverse_term(b) for b in t.bodies))
    raise TypeError(t)


def is_finite(t: WordTerm) -> bool:
    if isinstance(t, (Empty, Lit)):
        return True
    if isinstance(t, Concat):
        return is_finite(t.left) and is_finite(t.right)
    return False


def to_finite(t: WordTerm) -> tuple:
    """The letters of a finite word, left to right."""
    out = []
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Lit):
            out.append(s.letter)
        elif isinstance(s, Concat):
            stack.append(s.right)
            stack.append(s.left)
        elif not isinstance(s, Empty):
            raise InfiniteTermError(f"infinite term: {render_term(s)}")
    return tuple(out)


def letters(t: WordTerm) -> frozenset:
    """Set of letters occurring in ``t``."""
    if isinstance(t, Empty):
        return frozenset()
    if isinstance(t, Lit):
        return frozenset([t.letter])
    if isinstance(t, Concat):
        return letters(t.left) | letters(t.right)
    if isinstance(t, (OmegaPow, NegOmegaPow)):
        return letters(t.body)
    return frozenset().union(*map(letters, t.bodies))


def zip_terms(t1: WordTerm, t2: WordTerm) -> WordTerm:
    """Pair two words of identical shape letter by letter."""
    if type(t1) is not type(t2):
        raise ShapeError(f"shape mismatch: {render_term(t1)} vs {render_term(t2)}")
    if isinstance(t1, Empty):
        return t1
    if isinstance(t1, Lit):
        return Lit((t1.letter, t2.letter))
    if isinstance(t1, Concat):
        return Concat(zip_terms(t1.left, t2.left), zip_terms(t1.right, t2.right))
    if isinstance(t1, (OmegaPow, NegOmegaPow)):
        return type(t1)(zip_terms(t1.body, t2.body))
    if len(t1.bodies) != len(t2.bodies):
        raise ShapeError("shuffles of different arity")
    return Shuffle(tuple(zip_terms(a, b) for a, b in zip(t1.bodies, t2.bodies)))


def project(t: WordTerm, i: int) -> WordTerm:
    """Keep component ``i`` of every tuple letter."""
    if isinstance(t, Empty):
        return t
    if isinstance(t, Lit):
        return Lit(t.letter[i])
    if isinstance(t, Concat):
        return Concat(project(t.left, i), project(t.right, i))
    if isinstance(t, (OmegaPow, NegOmegaPow)):
        return type(t)(project(t.body, i))
    return Shuffle(tuple(project(b, i) for b in t.bodies))


# ---------------------------------------------------------------------------
# normal form used to compare truth words

def _factors(t):
    """Flatten nested concatenations into a list of non-Concat factors."""
    if isinstance(t, Empty):
        return []
    if isinstance(t, Concat):
        return _factors(t.left) + _factors(t.right)
    return [t]


def _primitive_root(seq):
    n = len(seq)
    for k in range(1, n + 1):
        if n % k == 0 and seq[:k] * (n // k) == seq:
            return seq[:k]
    return seq


def simplify(t: WordTerm) -> WordTerm:
    """A canonical presentation of the same word.

    Concatenations are flattened, powers of finite bodies are reduced to
    their primitive root, and letters adjacent to a power that continue its
    period are absorbed into it (``0 0^w`` becomes ``0^w``).
    """
    out = []
    for f in _factors(t):
        if isinstance(f, (OmegaPow, NegOmegaPow)):
            body = simplify(f.body)
            if is_finite(body):
                root = list(_primitive_root(to_finite(body)))
                if isinstance(f, OmegaPow):
                    while out and isinstance(out[-1], Lit) and out[-1].letter == root[-1]:
                        out.pop()
                        root = root[-1:] + root[:-1]
                out.append(type(f)(word(root)))
            else:
                out.append(type(f)(body))
        elif isinstance(f, Shuffle):
            out.append(Shuffle(tuple(simplify(b) for b in f.bodies)))
        elif isinstance(f, Lit) and out and isinstance(out[-1], NegOmegaPow):
            prev = out[-1]
            if is_finite(prev.body):
                root = list(to_finite(prev.body))
                if root[0] == f.letter:
                    out[-1] = NegOmegaPow(word(root[1:] + root[:1]))
                    continue
            out.append(f)
        else:
            out.append(f)
    return concat(*out)


# ---------------------------------------------------------------------------
# concrete syntax

def render_letter(a) -> str:
    if isinstance(a, frozenset):
        return "{" + ",".join(sorted(a)) + "}"
    if isinstance(a, bool):
        return str(int(a))
    if isinstance(a, int):
        return str(a)
    if isinstance(a, tuple):
        return "<" + ",".join(render_letter(x) for x in a) + ">"
    if isinstance(a, str):
        return a
    raise TypeError(f"unsupported letter {a!r}")


def render_finite(seq: Sequence) -> str:
    return " ".join(render_letter(a) for a in seq) if seq else "()"


def _render(t, top):
    if isinstance(t, Empty):
        return "()"
    if isinstance(t, Lit):
        return render_letter(t.letter)
    if isinstance(t, Concat):
        parts = [_render(f, False) for f in _factors(t)]
        text = " ".join(parts) if parts else "()"
        return text if top or len(parts) <= 1 else f"({text})"
    if isinstance(t, (OmegaPow, NegOmegaPow)):
        body = _render(t.body, False)
        if isinstance(t.body, Concat) and not body.startswith("("):
            body = f"({body})"
        return body + ("^w" if isinstance(t, OmegaPow) else "^-w")
    if isinstance(t, Shuffle):
        return "sh(" + ", ".join(_render(b, True) for b in t.bodies) + ")"
    raise TypeError(t)


def render_term(t: WordTerm) -> str:
    """Concrete syntax accepted back by :func:`parse_term`."""
    return _render(t, True)


_LETTER_TOKEN = re.compile(r"\s*(\{[^{}]*\}|<|[01])")
_IDENT = re.compile(r"[a-z][a-z0-9_]*\Z")


class _TermParser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at(self, s):
        self.skip()
        return self.text.startswith(s, self.pos)

    def expect(self, s):
        if not self.at(s):
            what = repr(self.text[self.pos]) if self.pos < len(self.text) else "end of input"
            raise ParseError(f"expected {s!r}, found {what}", self.pos, self.text)
        self.pos += len(s)

    def term(self):
        factors = []
        while True:
            self.skip()
            if self.pos >= len(self.text) or self.text[self.pos] in "),":
                break
            factors.append(self.factor())
        return concat(*factors)

    def factor(self):
        if self.at("sh("):
            self.pos += 3
            bodies = [self.term()]
            while self.at(","):
                self.pos += 1
                bodies.append(self.term())
            self.expect(")")
            base = self._build(Shuffle, tuple(bodies))
        elif self.at("("):
            self.pos += 1
            base = self.term()
            self.expect(")")
        else:
            base = Lit(self.letter())
        while True:
            if self.at("^-w"):
                self.pos += 3
                base = self._build(NegOmegaPow, base)
            elif self.at("^w"):
                self.pos += 2
                base = self._build(OmegaPow, base)
            else:
                return base

    def _build(self, cls, arg):
        start = self.pos
        try:
            return cls(arg)
        except ShapeError as e:
            raise ParseError(str(e), start, self.text) from None

    def letter(self):
        self.skip()
        start = self.pos
        if self.at("{"):
            end = self.text.find("}", self.pos)
            if end < 0:
                raise ParseError("unterminated '{'", start, self.text)
            inner = self.text[self.pos + 1:end]
            self.pos = end + 1
            names = [n.strip() for n in inner.split(",")] if inner.strip() else []
            for n in names:
                if not _IDENT.match(n):
                    raise ParseError(f"bad proposition name {n!r}", start, self.text)
            return frozenset(names)
        if self.at("<"):
            self.pos += 1
            items = [self.letter()]
            while self.at(","):
                self.pos += 1
                items.append(self.letter())
            self.expect(">")
            return tuple(items)
        if self.pos < len(self.text) and self.text[self.pos] in "01":
            self.pos += 1
            return int(self.text[self.pos - 1])
        what = repr(self.text[self.pos]) if self.pos < len(self.text) else "end of input"
        raise ParseError(f"expected a letter, found {what}", start, self.text)


def parse_term(text: str) -> WordTerm:
    """Parse the word-term syntax, e.g. ``{a} {}^w {a} {}^w {a}``."""
    p = _TermParser(text)
    t = p.term()
    p.skip()
    if p.pos != len(text):
        raise ParseError(f"unexpected {text[p.pos]!r}", p.pos, text)
    return t


def parse_letter(text: str):
    p = _TermParser(text)
    a = p.letter()
    p.skip()
    if p.pos != len(text):
        raise ParseError(f"unexpected {text[p.pos]!r}", p.pos, text)
    return a
