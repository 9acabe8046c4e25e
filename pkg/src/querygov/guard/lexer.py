"""Tokenizer for the SELECT-only grammar.

Comments are rejected outright: the grammar has no use for them and comment
tricks are a standard smuggling channel for statement separators.
"""

from __future__ import annotations

from dataclasses import dataclass

from .verdict import SqlSyntaxError

KEYWORDS = frozenset(
    """
    select from where and or not in like between is null join inner left on
    as group by having order limit asc desc
    """.split()
)


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT KEYWORD STRING NUMBER OP LPAREN RPAREN COMMA DOT STAR SEMI MINUS EOF
    value: str
    pos: int


def tokenize_sql(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "-" and i + 1 < n and text[i + 1] == "-":
            raise SqlSyntaxError("comments are not allowed", i)
        if ch == "/" and i + 1 < n and text[i + 1] == "*":
            raise SqlSyntaxError("comments are not allowed", i)
        if ch == "'":
            j = i + 1
            buf = []
            closed = False
            while j < n:
                if text[j] == "'":
                    if j + 1 < n and text[j + 1] == "'":
                        buf.append("'")
                        j += 2
                        continue
                    closed = True
                    j += 1
                    break
                buf.append(text[j])
                j += 1
            if not closed:
                raise SqlSyntaxError("unterminated string literal", i)
            tokens.append(Token("STRING", "".join(buf), i))
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            tokens.append(Token("NUMBER", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "KEYWORD" if word.lower() in KEYWORDS else "IDENT"
            tokens.append(Token(kind, word, i))
            i = j
            continue
        if ch in "<>!=":
            two = text[i : i + 2]
            if two in ("<=", ">=", "<>", "!="):
                tokens.append(Token("OP", two, i))
                i += 2
                continue
            if ch in "<>=":
                tokens.append(Token("OP", ch, i))
                i += 1
                continue
            raise SqlSyntaxError(f"unexpected character {ch!r}", i)
        simple = {
            "(": "LPAREN",
            ")": "RPAREN",
            ",": "COMMA",
            ".": "DOT",
            "*": "STAR",
            ";": "SEMI",
            "-": "MINUS",
        }.get(ch)
        if simple is not None:
            tokens.append(Token(simple, ch, i))
            i += 1
            continue
        raise SqlSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(Token("EOF", "", n))
    return tokens
