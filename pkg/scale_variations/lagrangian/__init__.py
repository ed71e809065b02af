"""Lagrangian expressions: parse, differentiate, evaluate and print."""

from scale_variations.lagrangian.calculus import GradL, diff_expr, gradient
from scale_variations.lagrangian.evaluate import bind, eval_curve, eval_expr, evaluate
from scale_variations.lagrangian.expr import Expr, highest_order, to_display, to_text, variables
from scale_variations.lagrangian.parser import parse_curve, parse_expr

__all__ = [
    "Expr",
    "GradL",
    "bind",
    "diff_expr",
    "eval_curve",
    "eval_expr",
    "evaluate",
    "gradient",
    "highest_order",
    "parse_curve",
    "parse_expr",
    "to_display",
    "to_text",
    "variables",
]
