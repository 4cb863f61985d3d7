"""Intervention command language.

Grammar (keywords case-sensitive, whitespace free between tokens):

    command := ("REMOVE" | "FREEZE") "id" "=" int
             | "REPLACE" "id" "=" int "WITH" quoted
             | "SET" "id" "=" int "velocity" "=" "(" num "," num ")"
             | "SET" "id" "=" int "attributes" "=" quoted
             | "NULL"
    suffix  := "AT" "t" "=" int ["FOR" int]

The suffix is required for every command except NULL (which defaults to
frame 0); FOR is only meaningful with FREEZE. The empty string parses as
NULL. Attribute text inside quotes reads "<color> [shape] [WxH]".
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError, UnknownKeyword

KINDS = ("REMOVE", "REPLACE", "SET_MOTION", "SET_ATTRIBUTE", "FREEZE", "NULL")

_SHAPES = ("rectangle", "circle")


@dataclass(frozen=True)
class Intervention:
    kind: str
    target_id: int | None
    at_frame: int
    duration: int | None = None  # FREEZE interval length; None = rest of horizon
    velocity: tuple[float, float] | None = None  # SET_MOTION
    attributes: str | None = None  # REPLACE / SET_ATTRIBUTE

    def __post_init__(self):
        assert self.kind in KINDS, self.kind


NULL_INTERVENTION = Intervention(kind="NULL", target_id=None, at_frame=0)


@dataclass(frozen=True)
class AttributeSpec:
    """Parsed form of quoted attribute text."""

    color: str
    shape: str | None
    size: tuple[int, int] | None
    text: str


_SIZE_RE = re.compile(r"^(\d+)x(\d+)$")


def parse_attributes(text: str) -> AttributeSpec:
    """Split '<color> [shape] [WxH]' attribute text; purely lexical."""
    parts = text.split()
    if not parts:
        raise ParseError("empty attribute text", 0)
    color = parts[0]
    shape = None
    size = None
    rest = parts[1:]
    if rest and rest[0] in _SHAPES:
        shape = rest[0]
        rest = rest[1:]
    if rest:
        m = _SIZE_RE.match(rest[0])
        if not m:
            raise ParseError(f"unrecognized attribute token {rest[0]!r}", 0)
        size = (int(m.group(1)), int(m.group(2)))
        rest = rest[1:]
    if rest:
        raise ParseError(f"unrecognized attribute token {rest[0]!r}", 0)
    return AttributeSpec(color=color, shape=shape, size=size, text=text)


# --- lexer ---

_WORD_RE = re.compile(r"[A-Za-z_]+")
_NUM_RE = re.compile(r"[+-]?\d+(\.\d+)?")
_INT_RE = re.compile(r"\d+$")


@dataclass(frozen=True)
class _Token:
    kind: str  # word | num | punct | quoted | end
    text: str
    offset: int
    end: int


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        c = text[pos]
        if c.isspace():
            pos += 1
            continue
        if c == '"':
            close = text.find('"', pos + 1)
            if close < 0:
                raise ParseError("unterminated quoted string", pos)
            tokens.append(_Token("quoted", text[pos + 1 : close], pos, close + 1))
            pos = close + 1
            continue
        m = _WORD_RE.match(text, pos)
        if m:
            tokens.append(_Token("word", m.group(), pos, m.end()))
            pos = m.end()
            continue
        m = _NUM_RE.match(text, pos)
        if m:
            tokens.append(_Token("num", m.group(), pos, m.end()))
            pos = m.end()
            continue
        if c in "=(),":
            tokens.append(_Token("punct", c, pos, pos + 1))
            pos += 1
            continue
        raise ParseError(f"unexpected character {c!r}", pos)
    tokens.append(_Token("end", "", n, n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _lex(text)
        self.i = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.i]

    def _expected_at(self) -> int:
        # errors point at the byte where the expected token should start:
        # the end of the last consumed token
        if self.i == 0:
            return 0
        return self.tokens[self.i - 1].end

    def take_word(self, word: str) -> None:
        t = self.current
        if t.kind != "word" or t.text != word:
            raise ParseError(f"expected {word!r}", self._expected_at())
        self.i += 1

    def take_punct(self, punct: str) -> None:
        t = self.current
        if t.kind != "punct" or t.text != punct:
            raise ParseError(f"expected {punct!r}", self._expected_at())
        self.i += 1

    def take_int(self, what: str) -> int:
        t = self.current
        if t.kind != "num" or not _INT_RE.match(t.text):
            raise ParseError(f"expected integer {what}", self._expected_at())
        self.i += 1
        return int(t.text)

    def take_num(self, what: str) -> float:
        t = self.current
        if t.kind != "num":
            raise ParseError(f"expected number {what}", self._expected_at())
        self.i += 1
        return float(t.text)

    def take_quoted(self, what: str) -> str:
        t = self.current
        if t.kind != "quoted":
            raise ParseError(f"expected quoted {what}", self._expected_at())
        self.i += 1
        return t.text

    def take_id(self) -> int:
        self.take_word("id")
        self.take_punct("=")
        return self.take_int("id")


def parse_intervention(text: str) -> Intervention:
    """Parse command text into an Intervention; ParseError carries a byte offset."""
    if not text.strip():
        return NULL_INTERVENTION
    p = _Parser(text)
    head = p.current
    if head.kind != "word" or head.text not in ("REMOVE", "REPLACE", "SET", "FREEZE", "NULL"):
        raise UnknownKeyword(f"unknown command {head.text!r}", head.offset)
    p.i += 1

    kind = head.text
    target_id: int | None = None
    velocity: tuple[float, float] | None = None
    attributes: str | None = None

    if kind in ("REMOVE", "FREEZE"):
        target_id = p.take_id()
    elif kind == "REPLACE":
        target_id = p.take_id()
        p.take_word("WITH")
        attributes = p.take_quoted("attribute text")
        parse_attributes(attributes)
    elif kind == "SET":
        target_id = p.take_id()
        sel = p.current
        if sel.kind == "word" and sel.text == "velocity":
            p.i += 1
            p.take_punct("=")
            p.take_punct("(")
            vx = p.take_num("velocity x")
            p.take_punct(",")
            vy = p.take_num("velocity y")
            p.take_punct(")")
            kind = "SET_MOTION"
            velocity = (vx, vy)
        elif sel.kind == "word" and sel.text == "attributes":
            p.i += 1
            p.take_punct("=")
            attributes = p.take_quoted("attribute text")
            parse_attributes(attributes)
            kind = "SET_ATTRIBUTE"
        else:
            raise ParseError("expected 'velocity' or 'attributes'", p._expected_at())

    at_frame = 0
    duration: int | None = None
    if kind == "NULL" and p.current.kind == "end":
        pass
    else:
        p.take_word("AT")
        p.take_word("t")
        p.take_punct("=")
        at_frame = p.take_int("frame")
        if p.current.kind == "word" and p.current.text == "FOR":
            if kind != "FREEZE":
                raise ParseError("FOR is only valid with FREEZE", p.current.offset)
            p.i += 1
            duration = p.take_int("duration")
            if duration < 1:
                raise ParseError("FOR duration must be positive", p._expected_at())
    if p.current.kind != "end":
        raise ParseError(f"unexpected trailing input {p.current.text!r}", p.current.offset)

    return Intervention(
        kind=kind,
        target_id=target_id,
        at_frame=at_frame,
        duration=duration,
        velocity=velocity,
        attributes=attributes,
    )
