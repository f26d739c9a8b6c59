"""CCS-style terms (prefix, choice, parallel) and their translation to structures.

Concrete syntax::

    P ::= "0" | a "." P | a | P "+" P | P "|" P | "(" P ")"

Prefix binds tightest, then ``|``, then ``+``; binary operators associate to
the left.  A bare action ``a`` stands for ``a.0``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import ConfigStructure, InputError, choice, par, prefix


class TermSyntaxError(InputError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Nil:
    def __str__(self):
        return "0"


@dataclass(frozen=True)
class Prefix:
    label: str
    body: "Term"

    def __str__(self):
        if isinstance(self.body, Nil):
            return self.label
        inner = str(self.body)
        if isinstance(self.body, (Choice, Par)):
            inner = f"({inner})"
        return f"{self.label}.{inner}"


@dataclass(frozen=True)
class Choice:
    left: "Term"
    right: "Term"

    def __str__(self):
        return f"{self.left} + {_wrap(self.right, Choice)}"


@dataclass(frozen=True)
class Par:
    left: "Term"
    right: "Term"

    def __str__(self):
        return f"{_wrap(self.left, Choice)} | {_wrap(self.right, (Choice, Par))}"


Term = Nil | Prefix | Choice | Par


def _wrap(t, kinds) -> str:
    return f"({t})" if isinstance(t, kinds) else str(t)


_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[0().+|]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start("name") if m.group("name") else m.start("sym")
        if m.group("name"):
            tokens.append(("name", m.group("name"), start))
        else:
            tokens.append((m.group("sym"), m.group("sym"), start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str):
        tok = self.peek
        if tok[0] != kind:
            what = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise TermSyntaxError(f"expected {kind!r}, found {what}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Term:
        t = self.choice()
        self.take("eof")
        return t

    def choice(self) -> Term:
        t = self.par()
        while self.peek[0] == "+":
            self.i += 1
            t = Choice(t, self.par())
        return t

    def par(self) -> Term:
        t = self.prefix()
        while self.peek[0] == "|":
            self.i += 1
            t = Par(t, self.prefix())
        return t

    def prefix(self) -> Term:
        kind, value, pos = self.peek
        if kind == "0":
            self.i += 1
            return Nil()
        if kind == "(":
            self.i += 1
            t = self.choice()
            self.take(")")
            return t
        if kind == "name":
            self.i += 1
            if self.peek[0] == ".":
                self.i += 1
                return Prefix(value, self.prefix())
            return Prefix(value, Nil())
        what = "end of input" if kind == "eof" else repr(value)
        raise TermSyntaxError(f"expected a term, found {what}", pos)


def parse(text: str) -> Term:
    """Parse a term; raises :class:`TermSyntaxError` carrying the offending position."""
    return _Parser(text).parse()


def translate_with_paths(term: Term) -> tuple[ConfigStructure, dict[str, tuple[str, ...]]]:
    """Translate a term and report each event's occurrence path.

    Events are numbered ``e1, e2, ...`` in left-to-right preorder; the path
    records the branch taken at each node (``L``/``R`` for the operands of
    ``+`` and ``|``, ``P`` for a prefix body).
    """
    paths: dict[str, tuple[str, ...]] = {}
    counter = 0

    def go(t: Term, path: tuple[str, ...]) -> ConfigStructure:
        nonlocal counter
        if isinstance(t, Nil):
            return ConfigStructure([[]], {})
        if isinstance(t, Prefix):
            counter += 1
            e = f"e{counter}"
            paths[e] = path
            return prefix(e, t.label, go(t.body, path + ("P",)))
        left = go(t.left, path + ("L",))
        right = go(t.right, path + ("R",))
        if isinstance(t, Choice):
            return choice(left, right)
        return par(left, right)

    return go(term, ()), paths


def translate(term: Term | str) -> ConfigStructure:
    if isinstance(term, str):
        term = parse(term)
    return translate_with_paths(term)[0]


def size(term: Term) -> int:
    """Number of action occurrences (= events of the translation)."""
    if isinstance(term, Nil):
        return 0
    if isinstance(term, Prefix):
        return 1 + size(term.body)
    return size(term.left) + size(term.right)
