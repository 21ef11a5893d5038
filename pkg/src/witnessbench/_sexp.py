"""Minimal S-expression reader shared by the parsers.

Atoms are kept as strings; every node remembers the line and column where
it started so parse errors can point at the offending spot.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union


class SexpSyntaxError(SyntaxError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.reason = msg
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Atom:
    text: str
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int = 0
    col: int = 0

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    @property
    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Atom):
            return self.items[0].text
        return None


Sexp = Union[Atom, SList]

_DELIMS = set("()") | set(" \t\r\n;")


def tokenize(text: str):
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            i += 1
            col += 1
        elif ch == ";":
            # comment to end of line
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line, col
            i += 1
            col += 1
        else:
            j = i
            while j < n and text[j] not in _DELIMS:
                j += 1
            yield text[i:j], line, col
            col += j - i
            i = j


def read_all(text: str) -> list[Sexp]:
    """Read every top-level expression in ``text``."""
    stack: list[tuple[list, int, int]] = []
    out: list[Sexp] = []
    for tok, line, col in tokenize(text):
        if tok == "(":
            stack.append(([], line, col))
        elif tok == ")":
            if not stack:
                raise SexpSyntaxError("unbalanced ')'", line, col)
            items, l0, c0 = stack.pop()
            node = SList(tuple(items), l0, c0)
            (stack[-1][0] if stack else out).append(node)
        else:
            node = Atom(tok, line, col)
            (stack[-1][0] if stack else out).append(node)
    if stack:
        _, l0, c0 = stack[-1]
        raise SexpSyntaxError("unclosed '('", l0, c0)
    return out


def read_one(text: str) -> Sexp:
    nodes = read_all(text)
    if len(nodes) != 1:
        if not nodes:
            raise SexpSyntaxError("empty input", 1, 1)
        raise SexpSyntaxError("trailing input after expression", nodes[1].line, nodes[1].col)
    return nodes[0]


def pos(node: Sexp) -> tuple[int, int]:
    return node.line, node.col
