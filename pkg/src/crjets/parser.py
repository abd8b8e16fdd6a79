"""Polynomial expressions over a variable space.

Grammar (``^`` binds tighter than ``*`` and ``/``, which bind tighter than
binary ``+`` and ``-``; unary minus applies to a whole power)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := atom ("^" INTEGER)?
    atom    := NUMBER | "i" | NAME | "~" NAME | "(" expr ")" | "(" expr "," expr ")"

``NUMBER`` is an integer or decimal literal; ``p/q`` is ordinary division
by a constant.  ``(re, im)`` builds a complex constant from two constant
expressions.  Division is only allowed by a nonzero constant.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from .errors import ValidationError
from .series import EXACT, FLOAT, TruncatedSeries, VariableSpace, constant, variable

__all__ = [
    "ParseError",
    "Number",
    "Name",
    "Negate",
    "BinaryOp",
    "Power",
    "ComplexLiteral",
    "parse_expression",
    "evaluate",
    "parse_series",
]


class ParseError(ValidationError):
    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Number:
    value: Fraction
    pos: int = 0


@dataclass(frozen=True)
class ImaginaryUnit:
    pos: int = 0


@dataclass(frozen=True)
class Name:
    name: str
    pos: int = 0


@dataclass(frozen=True)
class Negate:
    operand: object
    pos: int = 0


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: object
    right: object
    pos: int = 0


@dataclass(frozen=True)
class Power:
    base: object
    exponent: int
    pos: int = 0


@dataclass(frozen=True)
class ComplexLiteral:
    re: object
    im: object
    pos: int = 0


# ---------------------------------------------------------------------------
# lexer

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)|(?P<name>~?[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


def _tokens(text: str):
    pos = 0
    out = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = match.lastgroup
        start = match.start(kind)
        out.append((kind, match.group(kind), start))
        pos = match.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokens(text)
        self.i = 0

    @property
    def current(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, pos: int | None = None):
        return ParseError(message, self.current[2] if pos is None else pos, self.text)

    def expect(self, value: str):
        kind, text, pos = self.current
        if kind != "op" or text != value:
            found = "end of input" if kind == "end" else repr(text)
            raise self.error(f"expected {value!r}, found {found}")
        self.advance()

    def parse(self):
        if self.current[0] == "end":
            raise self.error("empty expression")
        node = self.expr()
        if self.current[0] != "end":
            raise self.error(f"unexpected {self.current[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.current[0] == "op" and self.current[1] in "+-":
            _, op, pos = self.advance()
            node = BinaryOp(op, node, self.term(), pos)
        return node

    def term(self):
        node = self.unary()
        while self.current[0] == "op" and self.current[1] in "*/":
            _, op, pos = self.advance()
            node = BinaryOp(op, node, self.unary(), pos)
        return node

    def unary(self):
        kind, text, pos = self.current
        if kind == "op" and text in "+-":
            self.advance()
            operand = self.unary()
            return Negate(operand, pos) if text == "-" else operand
        return self.power()

    def power(self):
        base = self.atom()
        kind, text, pos = self.current
        if kind == "op" and text == "^":
            self.advance()
            kind, text, _ = self.current
            if kind == "op" and text == "-":
                raise self.error("negative exponents are not allowed")
            if kind != "num" or not text.isdigit():
                raise self.error("exponent must be a non-negative integer literal")
            self.advance()
            return Power(base, int(text), pos)
        return base

    def atom(self):
        kind, text, pos = self.current
        if kind == "num":
            self.advance()
            return Number(Fraction(text), pos)
        if kind == "name":
            self.advance()
            if text == "i":
                return ImaginaryUnit(pos)
            return Name(text, pos)
        if kind == "op" and text == "(":
            self.advance()
            inner = self.expr()
            if self.current[0] == "op" and self.current[1] == ",":
                self.advance()
                imag = self.expr()
                self.expect(")")
                return ComplexLiteral(inner, imag, pos)
            self.expect(")")
            return inner
        found = "end of input" if kind == "end" else repr(text)
        raise self.error(f"unexpected {found}")


def parse_expression(text: str):
    """Parse ``text`` into an AST; raises :class:`ParseError` with a position."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# evaluation


def _constant_value(node, text):
    """Complex constant ``(re, im)`` as Fractions, or None if ``node`` has variables."""
    if isinstance(node, Number):
        return node.value, Fraction(0)
    if isinstance(node, ImaginaryUnit):
        return Fraction(0), Fraction(1)
    if isinstance(node, Name):
        return None
    if isinstance(node, Negate):
        inner = _constant_value(node.operand, text)
        return None if inner is None else (-inner[0], -inner[1])
    if isinstance(node, ComplexLiteral):
        re_part = _constant_value(node.re, text)
        im_part = _constant_value(node.im, text)
        if re_part is None or im_part is None or re_part[1] or im_part[1]:
            raise ParseError("complex literal parts must be real constants", node.pos, text)
        return re_part[0], im_part[0]
    if isinstance(node, Power):
        base = _constant_value(node.base, text)
        if base is None:
            return None
        out = (Fraction(1), Fraction(0))
        for _ in range(node.exponent):
            out = (out[0] * base[0] - out[1] * base[1], out[0] * base[1] + out[1] * base[0])
        return out
    if isinstance(node, BinaryOp):
        a = _constant_value(node.left, text)
        b = _constant_value(node.right, text)
        if a is None or b is None:
            return None
        if node.op == "+":
            return a[0] + b[0], a[1] + b[1]
        if node.op == "-":
            return a[0] - b[0], a[1] - b[1]
        if node.op == "*":
            return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]
        norm = b[0] ** 2 + b[1] ** 2
        if norm == 0:
            raise ParseError("division by zero", node.pos, text)
        return (a[0] * b[0] + a[1] * b[1]) / norm, (a[1] * b[0] - a[0] * b[1]) / norm
    raise TypeError(f"not an expression node: {node!r}")


def _coefficient(value, mode):
    re_part, im_part = value
    if mode == FLOAT:
        return complex(float(re_part), float(im_part))
    return (mpq(re_part.numerator, re_part.denominator), mpq(im_part.numerator, im_part.denominator))


def evaluate(node, space: VariableSpace, order: int, mode: str = EXACT, text: str | None = None) -> TruncatedSeries:
    """Evaluate an AST in the truncated ring of ``space`` at ``order``."""

    def walk(node) -> TruncatedSeries:
        value = _constant_value(node, text)
        if value is not None:
            return constant(space, _coefficient(value, mode), order, mode)
        if isinstance(node, Name):
            if node.name not in space:
                raise ParseError(
                    f"unknown variable {node.name!r} (expected one of {', '.join(space.names)})",
                    node.pos,
                    text,
                )
            return variable(space, node.name, order, mode)
        if isinstance(node, Negate):
            return -walk(node.operand)
        if isinstance(node, Power):
            return walk(node.base) ** node.exponent
        if isinstance(node, BinaryOp):
            left = walk(node.left)
            if node.op == "/":
                divisor = _constant_value(node.right, text)
                if divisor is None:
                    raise ParseError("can only divide by a constant", node.pos, text)
                if divisor == (0, 0):
                    raise ParseError("division by zero", node.pos, text)
                return left / _coefficient(divisor, mode)
            right = walk(node.right)
            if node.op == "+":
                return left + right
            if node.op == "-":
                return left - right
            return left * right
        if isinstance(node, ComplexLiteral):
            raise ParseError("complex literal parts must be real constants", node.pos, text)
        raise TypeError(f"not an expression node: {node!r}")

    return walk(node)


def parse_series(text: str, space: VariableSpace, order: int, mode: str = EXACT) -> TruncatedSeries:
    """Parse and evaluate ``text`` in one step."""
    return evaluate(parse_expression(text), space, order, mode, text)
