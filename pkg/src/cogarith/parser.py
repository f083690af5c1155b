"""Parsing of ``<digits> <op> <digits>`` problems."""

from __future__ import annotations

import enum
from typing import NamedTuple

from .errors import (
    EmptyInput,
    MalformedExpression,
    OperandOverflow,
    UnknownOperator,
)

OPERAND_CAP = 10**9


class Operator(enum.Enum):
    ADD = "+"
    SUB = "-"
    MUL = "*"
    DIV = "/"

    @property
    def symbol(self) -> str:
        return self.value

    @property
    def slug(self) -> str:
        """Lowercase name used in CSV files (``add``, ``sub``, ...)."""
        return self.name.lower()

    @classmethod
    def from_slug(cls, slug: str) -> "Operator":
        return cls[slug.strip().upper()]


SYMBOLS = {
    "+": Operator.ADD,
    "-": Operator.SUB,
    "*": Operator.MUL,
    "x": Operator.MUL,
    "/": Operator.DIV,
    "÷": Operator.DIV,
}


class Problem(NamedTuple):
    lhs: int
    op: Operator
    rhs: int

    def __str__(self) -> str:
        return render(self)


def render(problem: Problem) -> str:
    return f"{problem.lhs} {problem.op.symbol} {problem.rhs}"


def _is_digit(ch: str) -> bool:
    # str.isdigit() would also accept superscripts and other scripts' digits
    return "0" <= ch <= "9"


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif _is_digit(ch):
            start = i
            while i < n and _is_digit(text[i]):
                i += 1
            tokens.append(("num", text[start:i], start))
        else:
            tokens.append(("sym", ch, i))
            i += 1
    return tokens


def _operand(token: tuple[str, str, int], side: str) -> int:
    kind, txt, pos = token
    if kind != "num":
        raise MalformedExpression(f"expected {side} operand", txt, pos)
    digits = txt.lstrip("0") or "0"
    # length check first: int() refuses very long strings
    if len(digits) > len(str(OPERAND_CAP)) or int(digits) > OPERAND_CAP:
        raise OperandOverflow(f"operand exceeds {OPERAND_CAP}", txt, pos)
    return int(digits)


def parse_problem(text: str | bytes) -> Problem:
    """Parse ``text`` such as ``"497 + 38"`` into a :class:`Problem`.

    Accepted operators are ``+ - * /`` plus the aliases ``x`` and ``÷``.
    Operands are unsigned base-10 integers up to ``OPERAND_CAP``.

    Raises one of :class:`EmptyInput`, :class:`MalformedExpression`,
    :class:`UnknownOperator` or :class:`OperandOverflow`.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedExpression(
                "input is not valid UTF-8",
                repr(bytes(text)[exc.start:exc.end]),
                exc.start,
            ) from None
    if not isinstance(text, str):
        raise TypeError(f"expected str or bytes, got {type(text).__name__}")

    tokens = _tokenize(text)
    if not tokens:
        raise EmptyInput("no problem given", "", 0)

    lhs = _operand(tokens[0], "left")
    if len(tokens) < 2:
        raise MalformedExpression("missing operator", "", len(text))
    kind, sym, pos = tokens[1]
    if kind != "sym":
        raise MalformedExpression("expected operator", sym, pos)
    if sym not in SYMBOLS:
        raise UnknownOperator(f"unknown operator {sym!r}", sym, pos)
    if len(tokens) < 3:
        raise MalformedExpression("missing right operand", "", len(text))
    rhs = _operand(tokens[2], "right")
    if len(tokens) > 3:
        _, extra, pos = tokens[3]
        raise MalformedExpression("unexpected trailing input", extra, pos)
    return Problem(lhs, SYMBOLS[sym], rhs)
