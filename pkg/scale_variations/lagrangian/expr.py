"""
Expression tree for Lagrangians L(t, y, v1..vn) and auxiliary curves psi(t).

Nodes are frozen dataclasses, so trees are hashable, comparable and safe to
share. Two printers are provided: `to_text` emits the canonical input syntax
(parse -> to_text is a fixed point), `to_display` emits the compact unicode
form used when rendering Euler-Lagrange conditions.
"""

from dataclasses import dataclass
from typing import FrozenSet, Optional

# Binding strength used by both printers
PREC_ADD = 1
PREC_MUL = 2
PREC_NEG = 3
PREC_POW = 4
PREC_ATOM = 5

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")

SUPERSCRIPTS = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")
VULGAR = {0.5: "½", 0.25: "¼", 0.75: "¾", 1.0 / 3.0: "⅓", 2.0 / 3.0: "⅔"}


# =============================================================================
# NODE TYPES
# =============================================================================


class Expr:
    """Base class for expression nodes."""

    precedence = PREC_ATOM

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Const(Expr):
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))

    @property
    def precedence(self) -> int:
        re, im = self.value.real, self.value.imag
        if im == 0.0:
            return PREC_NEG if re < 0 else PREC_ATOM
        if re == 0.0:
            return PREC_MUL if abs(im) != 1.0 else (PREC_NEG if im < 0 else PREC_ATOM)
        return PREC_ADD


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr
    precedence = PREC_NEG


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr


@dataclass(frozen=True)
class Binary(Expr):
    left: Expr
    right: Expr
    symbol = "?"


@dataclass(frozen=True)
class Add(Binary):
    precedence = PREC_ADD
    symbol = "+"


@dataclass(frozen=True)
class Sub(Binary):
    precedence = PREC_ADD
    symbol = "-"


@dataclass(frozen=True)
class Mul(Binary):
    precedence = PREC_MUL
    symbol = "*"


@dataclass(frozen=True)
class Div(Binary):
    precedence = PREC_MUL
    symbol = "/"


@dataclass(frozen=True)
class Pow(Binary):
    precedence = PREC_POW
    symbol = "^"


# =============================================================================
# TREE QUERIES
# =============================================================================


def variables(expr: Expr) -> FrozenSet[str]:
    """Names of all variables occurring in the tree."""
    if isinstance(expr, Var):
        return frozenset({expr.name})
    if isinstance(expr, Binary):
        return variables(expr.left) | variables(expr.right)
    if isinstance(expr, Neg):
        return variables(expr.operand)
    if isinstance(expr, Call):
        return variables(expr.arg)
    return frozenset()


def highest_order(expr: Expr) -> int:
    """Largest k with v_k present (0 if no v appears)."""
    orders = [int(name[1:]) for name in variables(expr) if name.startswith("v")]
    return max(orders, default=0)


def velocity(k: int) -> str:
    return f"v{k}"


# =============================================================================
# CANONICAL TEXT
# =============================================================================


def _number_text(x: float) -> str:
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _const_text(value: complex) -> str:
    re, im = value.real, value.imag
    if im == 0.0:
        return _number_text(re)
    if im == 1.0:
        imag = "i"
    elif im == -1.0:
        imag = "-i"
    else:
        imag = f"{_number_text(im)}*i"
    if re == 0.0:
        return imag
    sign = "-" if im < 0 else "+"
    magnitude = "i" if abs(im) == 1.0 else f"{_number_text(abs(im))}*i"
    return f"{_number_text(re)} {sign} {magnitude}"


def _wrap(text: str, child: Expr, limit: int, strict: bool) -> str:
    tight = child.precedence < limit if strict else child.precedence <= limit
    return f"({text})" if tight else text


def to_text(expr: Expr) -> str:
    """Canonical input syntax; reparsing yields a tree that prints identically."""
    if isinstance(expr, Const):
        return _const_text(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Neg):
        return "-" + _wrap(to_text(expr.operand), expr.operand, PREC_NEG, strict=True)
    if isinstance(expr, Call):
        return f"{expr.fn}({to_text(expr.arg)})"
    if isinstance(expr, Pow):
        left = _wrap(to_text(expr.left), expr.left, PREC_POW, strict=False)
        right = _wrap(to_text(expr.right), expr.right, PREC_NEG, strict=True)
        return f"{left}^{right}"
    if isinstance(expr, Binary):
        left = _wrap(to_text(expr.left), expr.left, expr.precedence, strict=True)
        right = _wrap(to_text(expr.right), expr.right, expr.precedence, strict=False)
        if isinstance(expr, (Mul, Div)):
            return f"{left}{expr.symbol}{right}"
        return f"{left} {expr.symbol} {right}"
    raise TypeError(f"not an expression node: {expr!r}")


# =============================================================================
# DISPLAY FORM
# =============================================================================


def _display_number(x: float) -> str:
    for value, glyph in VULGAR.items():
        if abs(x - value) < 1e-15:
            return glyph
    return _number_text(x)


def _display_var(name: str, order: int, at: Optional[str]) -> str:
    if name == "t":
        return at if at else "t"
    label = "v" if (name == "v1" and order == 1) else name
    return f"{label}({at})" if at else label


def to_display(expr: Expr, order: int = 1, at: Optional[str] = None) -> str:
    """
    Compact unicode rendering: 0.5*v^2 + y -> ½v²+y, or ½v(T)²+y(T) with at="T".

    v1 is shown as v for first-order problems.
    """

    def show(e: Expr) -> str:
        if isinstance(e, Const):
            if e.value.imag == 0.0:
                return _display_number(e.value.real)
            return _const_text(e.value)
        if isinstance(e, Var):
            return _display_var(e.name, order, at)
        if isinstance(e, Neg):
            return "-" + _wrap(show(e.operand), e.operand, PREC_NEG, strict=True)
        if isinstance(e, Call):
            return f"{e.fn}({show(e.arg)})"
        if isinstance(e, Pow):
            left = _wrap(show(e.left), e.left, PREC_POW, strict=False)
            right = e.right
            if isinstance(right, Const) and right.value.imag == 0.0 and right.value.real.is_integer():
                return left + str(int(right.value.real)).translate(SUPERSCRIPTS)
            return f"{left}^{_wrap(show(right), right, PREC_NEG, strict=True)}"
        if isinstance(e, Binary):
            left = _wrap(show(e.left), e.left, e.precedence, strict=True)
            right = _wrap(show(e.right), e.right, e.precedence, strict=False)
            if isinstance(e, Mul):
                numeric_left = isinstance(e.left, Const) and e.left.value.imag == 0.0
                return f"{left}{right}" if numeric_left and not isinstance(e.right, Const) else f"{left}·{right}"
            return f"{left}{e.symbol}{right}"
        raise TypeError(f"not an expression node: {e!r}")

    return show(expr)
