"""
Vectorised complex evaluation of expression trees.

Variables are bound to scalars or numpy arrays of a common shape; log and
sqrt use principal branches.
"""

from typing import Mapping, Sequence, Union

import numpy as np

from scale_variations.exceptions import DomainError, UnknownVariable
from scale_variations.lagrangian.expr import Add, Binary, Call, Const, Div, Expr, Mul, Neg, Pow, Sub, Var, velocity

ArrayLike = Union[complex, float, np.ndarray]

_FUNCTIONS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "log": np.log, "sqrt": np.sqrt}


def _has_zero(x) -> bool:
    return bool(np.any(np.asarray(x) == 0))


def evaluate(expr: Expr, env: Mapping[str, ArrayLike]):
    """
    Evaluate with variables taken from `env`.

    Raises:
        DomainError: division by zero, log of zero, or zero to a negative power
        UnknownVariable: a variable missing from env
    """
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        try:
            return env[expr.name]
        except KeyError as e:
            raise UnknownVariable(f"no value bound for {expr.name!r}") from e
    if isinstance(expr, Neg):
        return -evaluate(expr.operand, env)
    if isinstance(expr, Call):
        arg = np.asarray(evaluate(expr.arg, env), dtype=complex)
        if expr.fn == "log" and _has_zero(arg):
            raise DomainError("log of zero")
        result = _FUNCTIONS[expr.fn](arg)
        return result if result.ndim else complex(result)
    if isinstance(expr, Binary):
        left = evaluate(expr.left, env)
        right = evaluate(expr.right, env)
        if isinstance(expr, Add):
            return left + right
        if isinstance(expr, Sub):
            return left - right
        if isinstance(expr, Mul):
            return left * right
        if isinstance(expr, Div):
            if _has_zero(right):
                raise DomainError("division by zero")
            return left / right
        if isinstance(expr, Pow):
            return _power(left, right, expr)
    raise TypeError(f"not an expression node: {expr!r}")


def _power(base, exponent, expr: Pow):
    if isinstance(expr.right, Const) and expr.right.value.imag == 0 and expr.right.value.real.is_integer():
        k = int(expr.right.value.real)
        if k < 0 and _has_zero(base):
            raise DomainError("zero raised to a negative power")
        return np.asarray(base, dtype=complex) ** k if np.ndim(base) else complex(base) ** k
    base_c = np.asarray(base, dtype=complex)
    if _has_zero(base_c) and np.any(np.real(np.asarray(exponent, dtype=complex)) <= 0):
        raise DomainError("zero raised to a nonpositive power")
    with np.errstate(all="ignore"):
        result = np.power(base_c, np.asarray(exponent, dtype=complex))
    return result if result.ndim else complex(result)


def bind(t: ArrayLike, y: ArrayLike, v: Sequence[ArrayLike]) -> dict:
    """Environment for L(t, y, v1..vn)."""
    env = {"t": t, "y": y}
    env.update({velocity(k + 1): vk for k, vk in enumerate(v)})
    return env


def eval_expr(expr: Expr, t: float, y: complex, v: Sequence[complex]) -> complex:
    """Scalar complex evaluation of L(t, y, v1..vn)."""
    return complex(evaluate(expr, bind(t, y, v)))


def eval_curve(expr: Expr, t: ArrayLike):
    """Evaluate psi(t)."""
    return evaluate(expr, {"t": t})
