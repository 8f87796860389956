"""Lexing helpers shared by the line-oriented file formats."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Iterator

from pci.errors import ParseError


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def quote(text: str) -> str:
    if "\n" in text or "\r" in text:
        raise ValueError(f"line breaks cannot be serialized: {text!r}")
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def read_quoted(line: str, start: int, lineno: int) -> tuple[str, int]:
    """Decode the quoted string opening at ``line[start]``.

    Returns the decoded text and the index just past the closing quote.
    """
    if start >= len(line) or line[start] != '"':
        raise ParseError("expected '\"'", lineno, start + 1)
    out: list[str] = []
    i = start + 1
    while i < len(line):
        ch = line[i]
        if ch == "\\":
            if i + 1 >= len(line) or line[i + 1] not in '"\\':
                raise ParseError("invalid escape (only \\\" and \\\\ are allowed)", lineno, i + 1)
            out.append(line[i + 1])
            i += 2
        elif ch == '"':
            return nfc("".join(out)), i + 1
        else:
            out.append(ch)
            i += 1
    raise ParseError("unterminated string", lineno, start + 1)


@dataclass(frozen=True)
class Token:
    kind: str  # "word", "string", "=", ","
    value: str
    column: int


_PUNCT = "=,"


def tokenize(line: str, lineno: int) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    while i < len(line):
        ch = line[i]
        if ch in " \t":
            i += 1
        elif ch == '"':
            text, end = read_quoted(line, i, lineno)
            tokens.append(Token("string", text, i + 1))
            i = end
        elif ch in _PUNCT:
            tokens.append(Token(ch, ch, i + 1))
            i += 1
        else:
            j = i
            while j < len(line) and line[j] not in ' \t"' + _PUNCT:
                j += 1
            tokens.append(Token("word", line[i:j], i + 1))
            i = j
    return tokens


def content_lines(text: str) -> Iterator[tuple[int, str]]:
    """Yield ``(lineno, line)`` skipping blank lines and ``#`` comments."""
    for lineno, raw in enumerate(text.split("\n"), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, raw.rstrip("\r")
