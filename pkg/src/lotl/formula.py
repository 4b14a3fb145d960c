"""LTL formulas with strict Until/Since and the Stavi connectives.

Concrete syntax, loosest binding first::

    ->                      right associative
    |                       left associative
    &                       left associative
    U  S  U'  S'  Uns  Sns  right associative, all on one level
    !  X  F  G  Y  O  H     prefix

Atoms are identifiers ``[a-z][a-z0-9_]*``; ``true`` and ``false`` are
constants.  ``Uns``/``Sns`` are the non-strict Until/Since.  Everything
other than atoms, constants, ``!``, ``|``, ``U``, ``S``, ``U'`` and ``S'``
is sugar and is removed by :func:`desugar`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import ParseError, UnknownPropositionError

__all__ = [
    "Formula", "Atom", "Const", "Not", "Or", "Until", "Since", "StaviUntil",
    "StaviSince", "And", "Implies", "UntilNS", "SinceNS", "Next", "Eventually",
    "Globally", "Yesterday", "Once", "Historically", "TRUE", "FALSE",
    "parse", "parse_surface", "desugar", "render", "atoms", "is_core",
    "size", "depth", "temporal_count", "subformulas",
]


class Formula:
    """Base class of the formula AST.  Nodes are frozen dataclasses."""

    __slots__ = ()

    @property
    def children(self) -> tuple[Formula, ...]:
        return ()

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Const(Formula):
    value: bool


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Unary(Formula):
    child: Formula

    @property
    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Binary(Formula):
    left: Formula
    right: Formula

    @property
    def children(self):
        return (self.left, self.right)


class Not(Unary): pass
class Or(Binary): pass
class Until(Binary): pass
class Since(Binary): pass
class StaviUntil(Binary): pass
class StaviSince(Binary): pass

# sugar
class And(Binary): pass
class Implies(Binary): pass
class UntilNS(Binary): pass
class SinceNS(Binary): pass
class Next(Unary): pass
class Eventually(Unary): pass
class Globally(Unary): pass
class Yesterday(Unary): pass
class Once(Unary): pass
class Historically(Unary): pass


CORE_TYPES = (Atom, Const, Not, Or, Until, Since, StaviUntil, StaviSince)
TEMPORAL_TYPES = (Until, Since, StaviUntil, StaviSince)

_BINARY_SYMBOL = {
    Implies: "->", Or: "|", And: "&",
    Until: "U", Since: "S", StaviUntil: "U'", StaviSince: "S'",
    UntilNS: "Uns", SinceNS: "Sns",
}
_UNARY_SYMBOL = {
    Not: "!", Next: "X", Eventually: "F", Globally: "G",
    Yesterday: "Y", Once: "O", Historically: "H",
}
_SYMBOL_BINARY = {v: k for k, v in _BINARY_SYMBOL.items()}
_SYMBOL_UNARY = {v: k for k, v in _UNARY_SYMBOL.items()}

# binding levels; higher binds tighter
_IMPL, _OR, _AND, _TEMP, _UNARY, _ATOM = range(1, 7)
_LEVEL = {Implies: _IMPL, Or: _OR, And: _AND}
for _t in (Until, Since, StaviUntil, StaviSince, UntilNS, SinceNS):
    _LEVEL[_t] = _TEMP
_RIGHT_ASSOC = {_IMPL, _TEMP}


# ---------------------------------------------------------------------------
# tokenizer and parser

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<ident>[a-z][a-z0-9_]*)
  | (?P<binop>U'|S'|Uns|Sns|->|[|&]|[US](?![A-Za-z0-9_']))
  | (?P<unop>!|[XFGYOH](?![A-Za-z0-9_']))
  | (?P<lpar>\()
  | (?P<rpar>\))
""", re.VERBOSE)


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, props):
        self.text = text
        self.props = props
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, tok, expected):
        kind, value, pos = tok
        if kind == "eof":
            raise ParseError(f"unexpected end of input, expected {expected}", pos, self.text)
        raise ParseError(f"unexpected {value!r}, expected {expected}", pos, self.text)

    def parse(self):
        f = self.binary(_IMPL)
        tok = self.peek()
        if tok[0] != "eof":
            self.fail(tok, "end of input")
        return f

    def binary(self, level):
        if level > _TEMP:
            return self.unary()
        left = self.binary(level + 1)
        while True:
            kind, value, _ = self.peek()
            if kind != "binop" or _LEVEL[_SYMBOL_BINARY[value]] != level:
                return left
            self.take()
            cls = _SYMBOL_BINARY[value]
            if level in _RIGHT_ASSOC:
                return cls(left, self.binary(level))
            left = cls(left, self.binary(level + 1))

    def unary(self):
        tok = self.take()
        kind, value, pos = tok
        if kind == "unop":
            return _SYMBOL_UNARY[value](self.unary())
        if kind == "lpar":
            inner = self.binary(_IMPL)
            if self.peek()[0] != "rpar":
                self.fail(self.peek(), "')'")
            self.take()
            return inner
        if kind == "ident":
            if value == "true":
                return TRUE
            if value == "false":
                return FALSE
            if self.props is not None and value not in self.props:
                raise UnknownPropositionError(f"unknown proposition {value!r}", pos, self.text)
            return Atom(value)
        self.fail(tok, "a formula")


def parse_surface(text: str, props: Iterable[str] | None = None) -> Formula:
    """Parse ``text`` keeping the sugar connectives."""
    return _Parser(text, None if props is None else frozenset(props)).parse()


def parse(text: str, props: Iterable[str] | None = None) -> Formula:
    """Parse and desugar.  ``props=None`` accepts any identifier."""
    return desugar(parse_surface(text, props))


# ---------------------------------------------------------------------------
# desugaring

def desugar(f: Formula) -> Formula:
    if isinstance(f, (Atom, Const)):
        return f
    if isinstance(f, Unary):
        c = desugar(f.child)
        if isinstance(f, Not):
            return Not(c)
        if isinstance(f, Next):
            return Until(FALSE, c)
        if isinstance(f, Eventually):
            return Or(c, Until(TRUE, c))
        if isinstance(f, Globally):
            return Not(Or(Not(c), Until(TRUE, Not(c))))
        if isinstance(f, Yesterday):
            return Since(FALSE, c)
        if isinstance(f, Once):
            return Or(c, Since(TRUE, c))
        if isinstance(f, Historically):
            return Not(Or(Not(c), Since(TRUE, Not(c))))
    if isinstance(f, Binary):
        l, r = desugar(f.left), desugar(f.right)
        if isinstance(f, And):
            return Not(Or(Not(l), Not(r)))
        if isinstance(f, Implies):
            return Or(Not(l), r)
        if isinstance(f, UntilNS):
            return Or(r, Not(Or(Not(l), Not(Until(l, r)))))
        if isinstance(f, SinceNS):
            return Or(r, Not(Or(Not(l), Not(Since(l, r)))))
        return type(f)(l, r)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# rendering

def _level(f):
    if isinstance(f, (Atom, Const)):
        return _ATOM
    if isinstance(f, Unary):
        return _UNARY
    return _LEVEL[type(f)]


def _render(f, min_level):
    text = _render_bare(f)
    return f"({text})" if _level(f) < min_level else text


def _render_bare(f):
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Unary):
        sym = _UNARY_SYMBOL[type(f)]
        sep = "" if sym == "!" else " "
        return f"{sym}{sep}{_render(f.child, _UNARY)}"
    level = _LEVEL[type(f)]
    if level in _RIGHT_ASSOC:
        lmin, rmin = level + 1, level
    else:
        lmin, rmin = level, level + 1
    return f"{_render(f.left, lmin)} {_BINARY_SYMBOL[type(f)]} {_render(f.right, rmin)}"


def render(f: Formula) -> str:
    """Concrete syntax with the fewest parentheses that parse back to ``f``."""
    return _render_bare(f)


# ---------------------------------------------------------------------------
# measures

def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal, duplicates included."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(g.children))


def atoms(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def is_core(f: Formula) -> bool:
    return all(isinstance(g, CORE_TYPES) for g in subformulas(f))


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def depth(f: Formula) -> int:
    """Atoms and constants have depth 0."""
    return 1 + max(map(depth, f.children)) if f.children else 0


def temporal_count(f: Formula) -> int:
    return sum(1 for g in subformulas(f) if isinstance(g, TEMPORAL_TYPES))
