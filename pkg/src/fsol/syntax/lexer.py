from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Tuple

from ..diagnostics import Diagnostic, error
from .ast import Span

KEYWORDS = frozenset(
    """
    contract is function constructor payback external public private payable
    returns require return if else this transfer balance true false address
    uint uint160 bool msg
    """.split()
)

# Longest operators first.
OPERATORS = (
    "==", "!=", "<=", ">=", "&&", "||",
    "{", "}", "(", ")", ";", ",", ".", "<", ">", "=", "+", "-", "*", "!",
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"0[xX][0-9A-Za-z]*|[0-9][0-9A-Za-z_]*")
_HEX40 = re.compile(r"0x[0-9a-fA-F]{40}")
_MSG = re.compile(r"msg\s*\.\s*(sender|value)\b")


@dataclass(frozen=True)
class Token:
    kind: str  # ident | int | addr | kw | op | eof
    text: str
    span: Span
    value: object = None

    def is_(self, kind: str, text: str | None = None) -> bool:
        return self.kind == kind and (text is None or self.text == text)


def tokenize(source: str, file: str = "<input>") -> Tuple[List[Token], List[Diagnostic]]:
    tokens: List[Token] = []
    diags: List[Diagnostic] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(source)

    def span(start: int, end: int) -> Span:
        return Span(file, line, start - line_start + 1, start, end)

    while pos < n:
        ch = source[pos]
        if ch == "\n":
            pos += 1
            line += 1
            line_start = pos
            continue
        if ch in " \t\r":
            pos += 1
            continue
        if source.startswith("//", pos):
            end = source.find("\n", pos)
            pos = n if end < 0 else end
            continue
        if ch.isdigit():
            m = _NUMBER.match(source, pos)
            assert m
            text = m.group(0)
            sp = span(pos, m.end())
            if text[:2] in ("0x", "0X"):
                if _HEX40.fullmatch(text):
                    tokens.append(Token("addr", text, sp, int(text, 16)))
                else:
                    diags.append(error(
                        "PARSE",
                        f"malformed address literal '{text}' "
                        "(expected 0x followed by exactly 40 hex digits)",
                        sp,
                    ))
            elif text.isdigit():
                tokens.append(Token("int", text, sp, int(text)))
            else:
                diags.append(error("PARSE", f"malformed number '{text}'", sp))
            pos = m.end()
            continue
        if ch.isalpha() or ch == "_":
            m = _MSG.match(source, pos)
            if m:
                kw = "msg." + m.group(1)
                tokens.append(Token("kw", kw, span(pos, m.end())))
                pos = m.end()
                continue
            m = _IDENT.match(source, pos)
            assert m
            text = m.group(0)
            kind = "kw" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, span(pos, m.end())))
            pos = m.end()
            continue
        for op in OPERATORS:
            if source.startswith(op, pos):
                tokens.append(Token("op", op, span(pos, pos + len(op))))
                pos += len(op)
                break
        else:
            diags.append(error("PARSE", f"unexpected character {ch!r}", span(pos, pos + 1)))
            pos += 1
    tokens.append(Token("eof", "", span(n, n)))
    return tokens, diags
