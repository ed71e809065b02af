"""Printable Euler-Lagrange equation and natural conditions of a problem."""

from dataclasses import dataclass
from typing import List, Tuple

from scale_variations.lagrangian.calculus import ZERO
from scale_variations.lagrangian.expr import PREC_ADD, SUPERSCRIPTS, Expr, to_display
from scale_variations.variational.problem import (
    FixedTAB,
    FixedTC,
    HigherOrder,
    RegimeB,
    RegimeC,
    RegimeD,
    VariationalProblem,
)


def _number(x: complex) -> str:
    return f"{x.real:g}" if isinstance(x, complex) and x.imag == 0 else f"{x:g}"


def _scale_op(k: int) -> str:
    if k == 1:
        return "□/□t"
    sup = str(k).translate(SUPERSCRIPTS)
    return f"□{sup}/□t{sup}"


def _factor(expr: Expr, order: int, at: str) -> str:
    text = to_display(expr, order, at)
    return f"({text})" if expr.precedence <= PREC_ADD else text


@dataclass(frozen=True)
class SymbolicConditions:
    euler_lagrange: str
    conditions: Tuple[str, ...]

    def lines(self) -> List[str]:
        return [self.euler_lagrange, *self.conditions]

    def render(self) -> str:
        return "\n".join(self.lines())


def _el_line(problem: VariationalProblem) -> str:
    n = problem.order
    grad = problem.grad
    if n == 1:
        return f"{to_display(grad.dL_dy, 1)} = {_scale_op(1)}({to_display(grad.dL_dv[0], 1)})"

    parts: List[str] = []
    if grad.dL_dy != ZERO:
        parts.append(to_display(grad.dL_dy, n))
    for i, g in enumerate(grad.dL_dv, start=1):
        if g == ZERO:
            continue
        sign = "-" if i % 2 else "+"
        term = f"{_scale_op(i)}({to_display(g, n)})"
        parts.append(f"{sign} {term}" if parts else (f"-{term}" if sign == "-" else term))
    return (" ".join(parts) if parts else "0") + " = 0"


def _natural_chain(problem: VariationalProblem, i: int) -> str:
    n = problem.order
    parts: List[str] = []
    for k in range(i, n + 1):
        g = problem.grad.dL_dv[k - 1]
        if g == ZERO:
            continue
        m = k - i
        term = to_display(g, n, "T") if m == 0 else f"{_scale_op(m)}({to_display(g, n)})(T)"
        sign = "-" if m % 2 else "+"
        parts.append(f"{sign} {term}" if parts else (f"-{term}" if sign == "-" else term))
    return (" ".join(parts) if parts else "0") + "=0"


def el_symbolic(problem: VariationalProblem) -> SymbolicConditions:
    """
    Euler-Lagrange equation in display form plus the regime's natural and
    transversality conditions, e.g. for L = ½v²+y in regime A:

        1 = □/□t(v)
        v(T)=0
        ½v(T)²+y(T)=0
    """
    regime = problem.regime
    n = problem.order
    grad = problem.grad
    L_T = to_display(problem.lagrangian, n, "T")
    G_T = _factor(grad.dL_dv[0], n, "T")
    conditions: List[str] = []

    if isinstance(regime, RegimeB) or (isinstance(regime, FixedTAB) and regime.y_a is None):
        conditions.append(f"{to_display(grad.dL_dv[0], n, 'a')}=0")

    if isinstance(regime, HigherOrder):
        conditions.extend(_natural_chain(problem, i) for i in range(1, n + 1))
        conditions.append(f"{L_T}=0")
    elif isinstance(regime, RegimeC):
        conditions.append(f"{L_T} = {G_T}·□y/□t(T)")
        conditions.append(f"y(T)={_number(complex(regime.y_T))}")
    elif isinstance(regime, RegimeD):
        conditions.append(f"{L_T} = {G_T}·(□y/□t(T)-□ψ/□t(T))")
        conditions.append(f"y(T)=ψ(T), ψ(t)={to_display(regime.psi)}")
    elif isinstance(regime, FixedTC):
        conditions.append(f"y(a)={_number(complex(regime.y_a))}, y({regime.T:g})={_number(complex(regime.y_T))}")
    elif isinstance(regime, FixedTAB):
        conditions.append(f"{to_display(grad.dL_dv[0], n, 'T')}=0")
    else:
        conditions.append(f"{to_display(grad.dL_dv[0], n, 'T')}=0")
        conditions.append(f"{L_T}=0")

    return SymbolicConditions(_el_line(problem), tuple(conditions))
