"""Formal group words over named generators.

Text syntax: whitespace-separated letters ``A^3 B^-1 A'``; ``[u,v]`` expands to
``u v u^-1 v^-1`` for arbitrary words ``u``, ``v``; parentheses group; any of
these may carry an exponent; ``1`` is the empty word.  Generator names are identifiers optionally
followed by primes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import WordSyntaxError

__all__ = ["Word", "parse_word"]

_TOKEN_RE = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*'*)|(\^)|(-?\d+)|([\[\](),]))")


@dataclass(frozen=True)
class Word:
    letters: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        letters = tuple((str(n), int(e)) for n, e in self.letters)
        for name, e in letters:
            if e == 0:
                raise WordSyntaxError(f"zero exponent on {name}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def gen(cls, name: str, exponent: int = 1) -> "Word":
        return cls(((name, exponent),)) if exponent else cls()

    @classmethod
    def parse(cls, text: str) -> "Word":
        return parse_word(text)

    @classmethod
    def coerce(cls, w) -> "Word":
        if isinstance(w, Word):
            return w
        if isinstance(w, str):
            return parse_word(w)
        return cls(tuple(w))

    @staticmethod
    def commutator(u: "Word", v: "Word") -> "Word":
        return u * v * u.inverse() * v.inverse()

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        return Word(self.letters + other.letters)

    def __pow__(self, n: int) -> "Word":
        if n == 0:
            return Word()
        if len(self.letters) == 1:
            name, e = self.letters[0]
            return Word(((name, e * n),))
        if n < 0:
            return self.inverse() ** (-n)
        return Word(self.letters * n)

    def inverse(self) -> "Word":
        return Word(tuple((n, -e) for n, e in reversed(self.letters)))

    def reduced(self) -> "Word":
        """Freely reduced form: merge equal neighbours, drop cancelled letters."""
        stack: list[list] = []
        for name, e in self.letters:
            if stack and stack[-1][0] == name:
                stack[-1][1] += e
                if stack[-1][1] == 0:
                    stack.pop()
            else:
                stack.append([name, e])
        return Word(tuple((n, e) for n, e in stack))

    def cyclically_reduced(self) -> "Word":
        w = self.reduced()
        letters = list(w.letters)
        while len(letters) > 1 and letters[0][0] == letters[-1][0]:
            name = letters[0][0]
            e = letters[0][1] + letters[-1][1]
            letters = letters[1:-1]
            if e:
                letters.insert(0, (name, e))
            letters = list(Word(tuple(letters)).reduced().letters)
        return Word(tuple(letters))

    def rotations(self) -> list["Word"]:
        n = len(self.letters)
        return [Word(self.letters[i:] + self.letters[:i]) for i in range(max(n, 1))]

    def rename(self, mapping: Mapping[str, str]) -> "Word":
        return Word(tuple((mapping.get(n, n), e) for n, e in self.letters))

    def generators(self) -> set[str]:
        return {n for n, _ in self.letters}

    def __len__(self):
        """Length counted with multiplicity: ``A^3`` has length 3."""
        return sum(abs(e) for _, e in self.letters)

    def is_empty(self) -> bool:
        return not self.letters

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(n if e == 1 else f"{n}^{e}" for n, e in self.letters)

    def to_json(self) -> list:
        return [[n, e] for n, e in self.letters]

    @classmethod
    def from_json(cls, data: Iterable) -> "Word":
        return cls(tuple((n, e) for n, e in data))


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise WordSyntaxError(f"unexpected character at position {pos} in {text!r}")
        name, caret, num, punct = m.groups()
        if name:
            tokens.append(("name", name))
        elif caret:
            tokens.append(("^", caret))
        elif num is not None:
            tokens.append(("int", num))
        else:
            tokens.append((punct, punct))
        pos = m.end()
    return tokens


def parse_word(text: str) -> Word:
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos][0] if pos < len(tokens) else None

    def take(kind):
        nonlocal pos
        if peek() != kind:
            got = tokens[pos][1] if pos < len(tokens) else "end of input"
            raise WordSyntaxError(f"expected {kind!r}, got {got!r} in {text!r}")
        pos += 1
        return tokens[pos - 1][1]

    def exponent() -> int:
        if peek() == "^":
            take("^")
            return int(take("int"))
        return 1

    def word(stop: set) -> Word:
        out = Word()
        while peek() is not None and peek() not in stop:
            kind = peek()
            if kind == "name":
                name = take("name")
                item = Word.gen(name, 1)
            elif kind == "[":
                take("[")
                u = word({","})
                take(",")
                v = word({"]"})
                take("]")
                item = Word.commutator(u, v)
            elif kind == "int" and tokens[pos][1] == "1":
                take("int")
                item = Word()
            elif kind == "(":
                take("(")
                item = word({")"})
                take(")")
            else:
                raise WordSyntaxError(f"unexpected {tokens[pos][1]!r} in {text!r}")
            out = out * item ** exponent()
        return out

    result = word(set())
    if pos != len(tokens):
        raise WordSyntaxError(f"trailing input in {text!r}")
    return result
