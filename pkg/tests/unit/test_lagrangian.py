"""
Unit tests for the Lagrangian expression language.

Run with:
    pytest tests/unit/test_lagrangian.py -v
"""

import cmath

import numpy as np
import pytest

from scale_variations.exceptions import DomainError, ExpressionSyntaxError, OrderMismatch, UnknownVariable
from scale_variations.lagrangian import (
    bind,
    diff_expr,
    eval_curve,
    eval_expr,
    evaluate,
    gradient,
    highest_order,
    parse_curve,
    parse_expr,
    to_display,
    to_text,
    variables,
)
from scale_variations.lagrangian.expr import Const, Neg, Pow

# =============================================================================
# PARSING
# =============================================================================


class TestParser:
    """Tests for parse_expr and parse_curve."""

    def test_v_is_first_velocity(self):
        assert variables(parse_expr("0.5*v^2 + y")) == frozenset({"v1", "y"})

    def test_unary_minus_binds_looser_than_power(self):
        tree = parse_expr("-v^2")
        assert isinstance(tree, Neg)
        assert isinstance(tree.operand, Pow)

    def test_power_is_right_associative(self):
        tree = parse_expr("2^3^2")
        assert isinstance(tree, Pow)
        assert isinstance(tree.right, Pow)
        assert eval_expr(tree, 0.0, 0, [0]) == pytest.approx(512)

    def test_imaginary_unit(self):
        assert parse_expr("i") == Const(1j)

    def test_highest_order(self):
        assert highest_order(parse_expr("v1*v3 + y", order=3)) == 3
        assert highest_order(parse_expr("t + y")) == 0

    @pytest.mark.parametrize(
        "src,position",
        [("v^ + 1", 3), ("y +", 3), ("(y", 2), ("", 0), ("y $ 1", 2), ("sin y", 4)],
    )
    def test_syntax_errors_carry_position(self, src, position):
        with pytest.raises(ExpressionSyntaxError) as exc:
            parse_expr(src)
        assert exc.value.position == position

    def test_caret_points_at_offending_character(self):
        with pytest.raises(ExpressionSyntaxError) as exc:
            parse_expr("v^ + 1")
        assert exc.value.caret() == "v^ + 1\n   ^"

    @pytest.mark.parametrize("src", ["x", "v0", "foo(y)"])
    def test_unknown_variable(self, src):
        with pytest.raises(UnknownVariable):
            parse_expr(src)

    def test_order_mismatch(self):
        with pytest.raises(OrderMismatch):
            parse_expr("v2^2", order=1)

    def test_curve_allows_only_t(self):
        assert eval_curve(parse_curve("2 - t"), 0.5) == 1.5
        with pytest.raises(UnknownVariable):
            parse_curve("2 - y")


# =============================================================================
# PRINTING
# =============================================================================


class TestPrinting:
    """Tests for to_text and to_display."""

    @pytest.mark.parametrize(
        "src",
        ["0.5*v^2 + y", "-v^2", "(y - t)^2/2", "sin(t)*exp(-y)", "y^(1/2) - 3*i", "2^3^2", "(1 + i)*v"],
    )
    def test_text_reparses_to_same_text(self, src):
        text = to_text(parse_expr(src))
        assert to_text(parse_expr(text)) == text

    def test_display_of_quadratic_lagrangian(self):
        tree = parse_expr("0.5*v^2 + y")
        assert to_display(tree) == "½v²+y"
        assert to_display(tree, at="T") == "½v(T)²+y(T)"

    def test_display_keeps_velocity_index_for_higher_order(self):
        assert to_display(parse_expr("0.5*v2^2", order=2), order=2) == "½v2²"


# =============================================================================
# DIFFERENTIATION
# =============================================================================


class TestCalculus:
    """Tests for diff_expr and gradient."""

    def test_quadratic_lagrangian(self):
        tree = parse_expr("0.5*v^2 + y")
        assert to_text(diff_expr(tree, "v")) == "v1"
        assert to_text(diff_expr(tree, "y")) == "1"

    def test_missing_variable_differentiates_to_zero(self):
        assert to_text(diff_expr(parse_expr("sin(t)*v"), "y")) == "0"

    @pytest.mark.parametrize(
        "src,wrt",
        [
            ("sin(y)*v^3", "y"),
            ("exp(t*y)/(1 + v^2)", "v1"),
            ("log(y)*sqrt(v)", "y"),
            ("y^v", "v1"),
            ("cos(v)^2 - t*y", "v"),
        ],
    )
    def test_symbolic_matches_finite_difference(self, src, wrt):
        tree = parse_expr(src)
        point = {"t": 0.3, "y": 0.7 + 0.1j, "v1": 1.2 - 0.2j}
        eps = 1e-6
        key = "v1" if wrt == "v" else wrt
        up = dict(point, **{key: point[key] + eps})
        down = dict(point, **{key: point[key] - eps})
        numeric = (evaluate(tree, up) - evaluate(tree, down)) / (2 * eps)
        assert evaluate(diff_expr(tree, wrt), point) == pytest.approx(numeric, abs=1e-6)

    def test_gradient_of_second_order_lagrangian(self):
        grad = gradient(parse_expr("0.5*v2^2 + y", order=2), 2)
        assert grad.order == 2
        assert to_text(grad.dL_dy) == "1"
        assert [to_text(d) for d in grad.dL_dv] == ["0", "v2"]


# =============================================================================
# EVALUATION
# =============================================================================


class TestEvaluate:
    """Tests for evaluate and friends."""

    def test_vectorised_over_nodes(self):
        tree = parse_expr("0.5*v^2 + y*t")
        t = np.linspace(0.0, 1.0, 5)
        out = evaluate(tree, bind(t, 2.0 * t, [1j * t]))
        np.testing.assert_allclose(out, -0.5 * t**2 + 2.0 * t**2)

    def test_principal_branch(self):
        assert eval_expr(parse_expr("sqrt(y)"), 0.0, -4.0, [0]) == pytest.approx(2j)
        assert eval_expr(parse_expr("log(y)"), 0.0, -1.0, [0]) == pytest.approx(cmath.log(-1))

    @pytest.mark.parametrize("src", ["1/y", "log(y)", "y^-1", "y^(0 - t)"])
    def test_domain_errors(self, src):
        with pytest.raises(DomainError):
            eval_expr(parse_expr(src), 0.0, 0.0, [1.0])

    def test_unbound_variable(self):
        with pytest.raises(UnknownVariable):
            evaluate(parse_expr("y + v"), {"y": 1.0})


# =============================================================================
# RANDOMISED EXPRESSIONS
# =============================================================================

ATOMS = ("t", "y", "v", "v1")
TRIG = ("sin", "cos")
POINT = {"t": 0.3, "y": 0.7, "v1": 1.2}


def random_source(rng: np.random.Generator, depth: int) -> str:
    """Random well-formed Lagrangian text that stays finite at POINT."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.4:
            return f"{rng.uniform(0.1, 3.0):.3f}"
        return str(rng.choice(ATOMS))
    kind = int(rng.integers(8))
    a = random_source(rng, depth - 1)
    if kind == 0:
        return f"{rng.choice(TRIG)}({a})"
    if kind == 1:
        return f"exp(sin({a}))"
    if kind == 2:
        return f"-{a}"
    if kind == 3:
        return f"({a})^2"
    b = random_source(rng, depth - 1)
    if kind == 4:
        return f"{a} + {b}"
    if kind == 5:
        return f"({a}) - ({b})"
    if kind == 6:
        return f"({a})*({b})"
    return f"({a})/(1 + ({b})^2)"


class TestRandomisedExpressions:
    """Round trips and symbolic derivatives over random expressions."""

    def test_round_trip_and_derivatives(self):
        rng = np.random.default_rng(2024)
        eps = 1e-6
        for _ in range(100):
            src = random_source(rng, 3)
            tree = parse_expr(src)
            text = to_text(tree)
            assert to_text(parse_expr(text)) == text, src
            assert evaluate(parse_expr(text), POINT) == pytest.approx(evaluate(tree, POINT), rel=1e-12, abs=1e-12)

            for wrt in ("y", "v1"):
                up = dict(POINT, **{wrt: POINT[wrt] + eps})
                down = dict(POINT, **{wrt: POINT[wrt] - eps})
                numeric = (evaluate(tree, up) - evaluate(tree, down)) / (2 * eps)
                symbolic = evaluate(diff_expr(tree, wrt), POINT)
                assert symbolic == pytest.approx(numeric, rel=1e-5, abs=1e-7), (src, wrt)
