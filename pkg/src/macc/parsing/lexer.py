"""Tokenizer shared by all four model languages."""

from __future__ import annotations

import re
from dataclasses import dataclass

from macc.diagnostics import Location, MaccError

KEYWORDS = frozenset(
    {
        "component", "port", "in", "out", "connect", "automaton", "state", "initial",
        "import", "classdiagram", "enum", "class", "application", "generators",
        "bindings", "map", "to", "library", "rte", "implementation", "implements",
        "kind", "true", "false",
    }
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<float>-?[0-9]+\.[0-9]+)
  | (?P<int>-?[0-9]+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<id>[A-Za-z](?:[A-Za-z0-9_]|-(?=[A-Za-z0-9_]))*)
  | (?P<sym>->|&&|==|!=|<=|>=|[{}()\[\]<>;,.*=/])
    """,
    re.VERBOSE,
)


class ParseError(MaccError):
    code = "SyntaxError"


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "keyword", "int", "float", "string", "sym", "eof"
    text: str
    loc: Location

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else f"'{self.text}'"


def _unescape(raw: str) -> str:
    body = raw[1:-1]
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), body)


def tokenize(text: str, path: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        loc = Location(path, line, pos - line_start + 1)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", loc)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "id" and chunk in KEYWORDS:
            tokens.append(Token("keyword", chunk, loc))
        elif kind == "string":
            tokens.append(Token("string", _unescape(chunk), loc))
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, loc))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", Location(path, line, pos - line_start + 1)))
    return tokens
