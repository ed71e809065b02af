"""
Recursive-descent parser for Lagrangian expressions.

Grammar (whitespace ignored):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?            right associative, binds tighter than '-'
    atom   := number | 'i' | var | fn '(' expr ')' | '(' expr ')'
    var    := 't' | 'y' | 'v' | 'v' digits  ('v' is v1)
    fn     := sin | cos | exp | log | sqrt

So -v^2 is -(v^2) and 2^3^2 is 2^(3^2).
"""

import re
from dataclasses import dataclass
from typing import FrozenSet, List, Optional

from scale_variations.exceptions import ExpressionSyntaxError, OrderMismatch, UnknownVariable
from scale_variations.lagrangian.expr import (
    FUNCTIONS,
    Add,
    Call,
    Const,
    Div,
    Expr,
    Mul,
    Neg,
    Pow,
    Sub,
    Var,
)

TOKEN_PATTERN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)
VELOCITY_PATTERN = re.compile(r"^v(\d+)$")

CURVE_VARIABLES = frozenset({"t"})


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(src: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        match = TOKEN_PATTERN.match(src, pos)
        if not match or match.end() == pos:
            offending = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise ExpressionSyntaxError(f"unexpected character {src[offending]!r}", offending, src)
        kind = match.lastgroup
        tokens.append(Token(kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(Token("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, order: int, allowed: Optional[FrozenSet[str]]):
        self.src = src
        self.order = order
        self.allowed = allowed
        self.tokens = tokenize(src)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def error(self, message: str, token: Optional[Token] = None) -> ExpressionSyntaxError:
        token = token or self.current
        return ExpressionSyntaxError(message, token.position, self.src)

    def expect(self, text: str) -> None:
        if self.current.text != text:
            found = repr(self.current.text) if self.current.kind != "end" else "end of input"
            raise self.error(f"expected {text!r}, found {found}")
        self.advance()

    # -------------------------------------------------------------------------

    def parse(self) -> Expr:
        if self.current.kind == "end":
            raise self.error("empty expression")
        tree = self.expr()
        if self.current.kind != "end":
            raise self.error(f"unexpected {self.current.text!r}")
        return tree

    def expr(self) -> Expr:
        node = self.term()
        while self.current.text in ("+", "-"):
            op = self.advance().text
            right = self.term()
            node = Add(node, right) if op == "+" else Sub(node, right)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.current.text in ("*", "/"):
            op = self.advance().text
            right = self.unary()
            node = Mul(node, right) if op == "*" else Div(node, right)
        return node

    def unary(self) -> Expr:
        if self.current.text == "-":
            self.advance()
            operand = self.unary()
            if isinstance(operand, Const):
                return Const(-operand.value)
            return Neg(operand)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.current.text == "^":
            self.advance()
            return Pow(base, self.unary())
        return base

    def atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self.advance()
            return Const(float(token.text))
        if token.kind == "name":
            self.advance()
            return self.name(token)
        if token.text == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if token.kind == "end":
            raise self.error("expected an operand, found end of input")
        raise self.error(f"expected an operand, found {token.text!r}")

    def name(self, token: Token) -> Expr:
        text = token.text
        if text in FUNCTIONS:
            if self.current.text != "(":
                raise self.error(f"function {text!r} needs a parenthesised argument")
            self.advance()
            arg = self.expr()
            self.expect(")")
            return Call(text, arg)
        if text == "i":
            return Const(1j)

        var = self.variable(text)
        if self.allowed is not None and var not in self.allowed:
            raise UnknownVariable(f"variable {text!r} at position {token.position} is not allowed here")
        return Var(var)

    def variable(self, text: str) -> str:
        if text in ("t", "y"):
            return text
        if text == "v":
            return "v1"
        match = VELOCITY_PATTERN.match(text)
        if match:
            k = int(match.group(1))
            if k == 0:
                raise UnknownVariable("v0 is not a variable; use y")
            if k > self.order:
                raise OrderMismatch(f"{text} used in a problem of order {self.order}")
            return f"v{k}"
        raise UnknownVariable(f"unknown identifier {text!r}")


def parse_expr(src: str, order: int = 1) -> Expr:
    """
    Parse a Lagrangian over t, y, v1..v_order.

    Raises:
        ExpressionSyntaxError: malformed text (with character position)
        UnknownVariable: identifier that is not t, y, v, vk, i or a function
        OrderMismatch: vk with k > order
    """
    if order < 1:
        raise OrderMismatch(f"order must be >= 1, got {order}")
    return _Parser(src, order, None).parse()


def parse_curve(src: str) -> Expr:
    """Parse an auxiliary curve psi(t); only t may appear."""
    return _Parser(src, 1, CURVE_VARIABLES).parse()
