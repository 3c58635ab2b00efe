"""A small ordered-choice parser combinator library with backtracking marks.

Every branch attempt of a :class:`Disj` runs under a ``parser-disj`` mark
whose payload is ``ParserTriple(disjunction_loc, branch_index, offset)``.
Nested disjunctions nest their marks, so a core sample holds one triple per
active disjunction.

    >>> bs = many(char("b"))
    >>> g = disj(seq(bs, char("a")), bs)
    >>> parse(g, "bba").value
    (['b', 'b'], 'a')
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable

from featprof.demo.common import caller_loc, ensure_feature
from featprof.marks import MarkRuntime
from featprof.payloads import ParserTriple, SourceLoc

__all__ = [
    "FEATURE",
    "ParseError",
    "ParseResult",
    "Parser",
    "CharClass",
    "Seq",
    "Many",
    "Disj",
    "Map",
    "char",
    "seq",
    "many",
    "disj",
    "parse",
]

FEATURE = "parser-disj"


class ParseError(ValueError):
    def __init__(self, offset: int):
        super().__init__(f"no parse at offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class ParseResult:
    value: Any
    end: int


class _State:
    __slots__ = ("furthest",)

    def __init__(self):
        self.furthest = 0


class Parser:
    """Base combinator.  ``run(text, pos, state)`` returns ``(value, pos)`` or None."""

    def run(self, text: str, pos: int, state: _State):
        raise NotImplementedError

    def __add__(self, other: "Parser") -> "Seq":
        return Seq((self, other))

    def __rshift__(self, f: Callable) -> "Map":
        return Map(self, f)


class CharClass(Parser):
    def __init__(self, chars: Iterable[str]):
        self.chars = frozenset(chars)

    def run(self, text, pos, state):
        if pos < len(text) and text[pos] in self.chars:
            return text[pos], pos + 1
        if pos > state.furthest:
            state.furthest = pos
        return None

    def __repr__(self):
        return f"char({''.join(sorted(self.chars))!r})"


class Seq(Parser):
    def __init__(self, parts: Iterable[Parser]):
        self.parts = tuple(parts)

    def run(self, text, pos, state):
        values = []
        for p in self.parts:
            r = p.run(text, pos, state)
            if r is None:
                return None
            v, pos = r
            values.append(v)
        return tuple(values), pos


class Many(Parser):
    def __init__(self, inner: Parser):
        self.inner = inner

    def run(self, text, pos, state):
        values = []
        step = self.inner.run
        while True:
            r = step(text, pos, state)
            if r is None or r[1] == pos:
                return values, pos
            v, pos = r
            values.append(v)


class Map(Parser):
    def __init__(self, inner: Parser, f: Callable):
        self.inner = inner
        self.f = f

    def run(self, text, pos, state):
        r = self.inner.run(text, pos, state)
        if r is None:
            return None
        return self.f(r[0]), r[1]


class Disj(Parser):
    """Ordered choice: first branch that succeeds wins; the offset resets in between."""

    def __init__(self, branches: Iterable[Parser], loc: SourceLoc, runtime: MarkRuntime | None = None):
        self.branches = tuple(branches)
        if not self.branches:
            raise ValueError("disjunction needs at least one branch")
        self.loc = loc
        self.runtime = runtime
        self.key = ensure_feature(runtime, FEATURE, False) if runtime is not None else None

    def run(self, text, pos, state):
        rt = self.runtime
        if rt is not None and rt.is_active(self.key):
            key, loc, mark = self.key, self.loc, rt.mark
            for i, branch in enumerate(self.branches):
                with mark(key, ParserTriple(loc, i, pos)):
                    r = branch.run(text, pos, state)
                if r is not None:
                    return r
            return None
        for branch in self.branches:
            r = branch.run(text, pos, state)
            if r is not None:
                return r
        return None


def char(chars: Iterable[str]) -> CharClass:
    return CharClass(chars)


def seq(*parts: Parser) -> Seq:
    return Seq(parts)


def many(inner: Parser) -> Many:
    return Many(inner)


def disj(*branches: Parser, loc: SourceLoc | None = None, runtime: MarkRuntime | None = None) -> Disj:
    """Ordered choice.  ``loc`` defaults to the caller's file and line."""
    return Disj(branches, loc or caller_loc(), runtime)


def parse(grammar: Parser, text: str, start: int = 0) -> ParseResult:
    state = _State()
    r = grammar.run(text, start, state)
    if r is None:
        raise ParseError(max(state.furthest, start))
    return ParseResult(r[0], r[1])
