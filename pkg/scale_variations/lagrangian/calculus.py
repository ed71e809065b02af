"""
Symbolic differentiation with light simplification.

The constructors below fold constants and drop neutral elements
(0 + x, 1 * x, x ^ 1, --x); nothing beyond that is attempted.
"""

import cmath
from dataclasses import dataclass
from functools import singledispatch
from typing import Tuple

from scale_variations.lagrangian.expr import (
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
    velocity,
)

ZERO = Const(0)
ONE = Const(1)

_CONST_FUNCTIONS = {"sin": cmath.sin, "cos": cmath.cos, "exp": cmath.exp, "log": cmath.log, "sqrt": cmath.sqrt}


# =============================================================================
# SIMPLIFYING CONSTRUCTORS
# =============================================================================


def _is(e: Expr, x: complex) -> bool:
    return isinstance(e, Const) and e.value == x


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    if isinstance(b, Neg):
        return sub(a, b.operand)
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if _is(b, 0):
        return a
    if _is(a, 0):
        return neg(b)
    if a == b:
        return ZERO
    return Sub(a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if _is(a, 0) or _is(b, 0):
        return ZERO
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    if _is(a, -1):
        return neg(b)
    if _is(b, -1):
        return neg(a)
    # constants to the left, merged with a constant factor of the other side
    if isinstance(b, Const):
        return mul(b, a)
    if isinstance(a, Const) and isinstance(b, Mul) and isinstance(b.left, Const):
        return mul(Const(a.value * b.left.value), b.right)
    if isinstance(a, Const) and isinstance(b, Neg):
        return mul(Const(-a.value), b.operand)
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is(b, 1):
        return a
    if _is(a, 0) and not _is(b, 0):
        return ZERO
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
        return Const(a.value / b.value)
    if isinstance(b, Const) and b.value != 0:
        return mul(Const(1 / b.value), a)
    return Div(a, b)


def power(base: Expr, exponent: Expr) -> Expr:
    if _is(exponent, 0):
        return ONE
    if _is(exponent, 1):
        return base
    if isinstance(base, Const) and isinstance(exponent, Const) and base.value != 0:
        return Const(base.value**exponent.value)
    return Pow(base, exponent)


def call(fn: str, arg: Expr) -> Expr:
    if isinstance(arg, Const) and not (fn == "log" and arg.value == 0):
        return Const(_CONST_FUNCTIONS[fn](arg.value))
    return Call(fn, arg)


# =============================================================================
# DIFFERENTIATION
# =============================================================================


@singledispatch
def _diff(expr: Expr, wrt: str) -> Expr:
    raise NotImplementedError(f"Cannot differentiate a {type(expr).__name__}")


@_diff.register
def _(expr: Const, wrt: str) -> Expr:
    return ZERO


@_diff.register
def _(expr: Var, wrt: str) -> Expr:
    return ONE if expr.name == wrt else ZERO


@_diff.register
def _(expr: Neg, wrt: str) -> Expr:
    return neg(_diff(expr.operand, wrt))


@_diff.register
def _(expr: Add, wrt: str) -> Expr:
    return add(_diff(expr.left, wrt), _diff(expr.right, wrt))


@_diff.register
def _(expr: Sub, wrt: str) -> Expr:
    return sub(_diff(expr.left, wrt), _diff(expr.right, wrt))


@_diff.register
def _(expr: Mul, wrt: str) -> Expr:
    """Product rule."""
    u, w = expr.left, expr.right
    return add(mul(_diff(u, wrt), w), mul(u, _diff(w, wrt)))


@_diff.register
def _(expr: Div, wrt: str) -> Expr:
    """Quotient rule."""
    u, w = expr.left, expr.right
    return div(sub(mul(_diff(u, wrt), w), mul(u, _diff(w, wrt))), power(w, Const(2)))


@_diff.register
def _(expr: Pow, wrt: str) -> Expr:
    base, exponent = expr.left, expr.right
    d_base = _diff(base, wrt)
    if isinstance(exponent, Const):
        return mul(mul(exponent, power(base, Const(exponent.value - 1))), d_base)
    # d(u^w) = u^w (w' log u + w u' / u)
    d_exp = _diff(exponent, wrt)
    return mul(expr, add(mul(d_exp, call("log", base)), div(mul(exponent, d_base), base)))


@_diff.register
def _(expr: Call, wrt: str) -> Expr:
    """Chain rule for the built-in functions."""
    u = expr.arg
    du = _diff(u, wrt)
    if _is(du, 0):
        return ZERO
    if expr.fn == "sin":
        outer = call("cos", u)
    elif expr.fn == "cos":
        outer = neg(call("sin", u))
    elif expr.fn == "exp":
        outer = expr
    elif expr.fn == "log":
        return div(du, u)
    elif expr.fn == "sqrt":
        return div(du, mul(Const(2), expr))
    else:
        raise NotImplementedError(f"no derivative rule for {expr.fn}")
    return mul(outer, du)


def diff_expr(expr: Expr, wrt: str) -> Expr:
    """
    Exact symbolic derivative with basic simplification.

    `wrt` is one of t, y, v (alias of v1) or vk.
    """
    return _diff(expr, "v1" if wrt == "v" else wrt)


# =============================================================================
# GRADIENT OF A LAGRANGIAN
# =============================================================================


@dataclass(frozen=True)
class GradL:
    """Partial derivatives dL/dy and dL/dv_i, i = 1..n."""

    dL_dy: Expr
    dL_dv: Tuple[Expr, ...]

    @property
    def order(self) -> int:
        return len(self.dL_dv)


def gradient(lagrangian: Expr, order: int) -> GradL:
    return GradL(
        dL_dy=diff_expr(lagrangian, "y"),
        dL_dv=tuple(diff_expr(lagrangian, velocity(k)) for k in range(1, order + 1)),
    )
