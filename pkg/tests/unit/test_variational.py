"""
Unit tests for variational problems, residuals, the first variation and
the symbolic conditions.

Run with:
    pytest tests/unit/test_variational.py -v
"""

import math

import numpy as np
import pytest

from scale_variations.exceptions import HaloExhausted, InadmissibleVariation, NonCommensurate, ProblemError
from scale_variations.grid_core import sample
from scale_variations.lagrangian import parse_expr
from scale_variations.models import ResidualOut
from scale_variations.variational import (
    FixedTAB,
    FixedTC,
    HigherOrder,
    RegimeA,
    RegimeB,
    RegimeC,
    VariationalProblem,
    admissible_variation,
    check_admissible,
    el_norm,
    el_residual,
    el_symbolic,
    functional_value,
    gateaux_derivative,
    hypothesis_checks,
    increment_residual,
    natural_residuals,
    regime_d,
    residual_report,
)

H_FAST = 2.0**-8


def extremal_a(h: float):
    """Discrete extremal of the regime A golden problem at T = 1."""
    return lambda t: 0.5 * t**2 - (1.0 + 0.5j * h) * t + 0.5


# =============================================================================
# PROBLEM DEFINITION
# =============================================================================


class TestVariationalProblem:
    """Tests for VariationalProblem validation."""

    def test_verdict_tolerance_adds_step(self, golden_a):
        problem = golden_a()
        assert problem.verdict_tol == pytest.approx(problem.residual_tol + 0.75 * problem.grid_h)

    def test_halos(self, golden_higher):
        assert golden_higher.required_halo == 3
        assert golden_higher.solver_halo == 4

    def test_t_scan_defaults_to_interval(self):
        problem = VariationalProblem.from_text("0.5*v^2", 1, (0.0, 2.0), RegimeB(), 0.25)
        assert problem.t_scan == (0.0, 2.0)

    def test_describe(self, golden_a):
        assert golden_a().describe() == {
            "lagrangian": "0.5*v1^2 + y",
            "order": 1,
            "interval": [0.0, 2.0],
            "regime": "A",
            "h": H_FAST,
        }

    def test_velocity_above_order(self):
        with pytest.raises(ProblemError):
            VariationalProblem(parse_expr("v2^2", order=2), 1, (0.0, 1.0), RegimeA(0.0), 0.25)

    def test_first_order_regime_with_higher_order(self):
        with pytest.raises(ProblemError, match="higher-order"):
            VariationalProblem.from_text("v2^2", 2, (0.0, 1.0), RegimeA(0.0), 0.25)

    def test_initial_derivative_count(self):
        with pytest.raises(ProblemError):
            VariationalProblem.from_text("v2^2", 2, (0.0, 1.0), HigherOrder(0.0, ()), 0.25)

    @pytest.mark.parametrize("T", [0.3, 0.0, 1.25])
    def test_fixed_T_must_be_interior_node(self, T):
        with pytest.raises(ProblemError):
            VariationalProblem.from_text("v^2", 1, (0.0, 1.0), FixedTAB(T, 0.0), 0.25)

    def test_scan_window_inside_interval(self):
        with pytest.raises(ProblemError):
            VariationalProblem.from_text("v^2", 1, (0.0, 1.0), RegimeB(), 0.25, (0.5, 1.5))

    def test_step_must_divide_interval(self):
        with pytest.raises(NonCommensurate):
            VariationalProblem.from_text("v^2", 1, (0.0, 1.0), RegimeB(), 0.3)

    def test_candidate_on_other_step(self, golden_a, candidate_on):
        candidate = candidate_on(golden_a(2.0**-4), extremal_a(2.0**-4), 1.0)
        with pytest.raises(ProblemError):
            candidate.check(golden_a(2.0**-5))


# =============================================================================
# RESIDUALS
# =============================================================================


class TestResiduals:
    """Tests for the Euler-Lagrange residual, natural conditions and functional."""

    def test_golden_extremal_satisfies_everything(self, golden_a, candidate_on):
        problem = golden_a()
        h = problem.grid_h
        report = residual_report(problem, candidate_on(problem, extremal_a(h), 1.0))

        assert report.el_norm < 1e-9
        assert abs(report.condition("y(a) - y_a").value) < 1e-12
        assert abs(report.condition("dL/dv(T)").value) < 1e-12
        assert report.condition("L(T)").value == pytest.approx(-0.5j * h, abs=1e-12)
        assert report.verdict
        assert report.tolerance == problem.verdict_tol

    def test_el_residual_grid(self, golden_a, candidate_on):
        problem = golden_a(2.0**-4)
        el = el_residual(problem, candidate_on(problem, extremal_a(2.0**-4), 1.0))
        assert (el.grid.a, el.grid.b, el.grid.halo) == (0.0, 1.0, 0)
        np.testing.assert_allclose(el.values, 0, atol=1e-10)

    def test_el_residual_needs_halo(self, golden_a, candidate_on):
        problem = golden_a(2.0**-4)
        with pytest.raises(HaloExhausted):
            el_residual(problem, candidate_on(problem, extremal_a(2.0**-4), 1.0, halo=0))

    def test_perturbation_raises_el_norm(self, golden_a, candidate_on):
        problem = golden_a()
        h = problem.grid_h
        bumped = candidate_on(problem, lambda t: extremal_a(h)(t) + 0.05 * np.sin(np.pi * t), 1.0)
        assert el_norm(problem, bumped) > 10 * problem.verdict_tol
        assert not residual_report(problem, bumped).verdict

    def test_functional_value(self, golden_a, candidate_on):
        problem = golden_a()
        h = problem.grid_h
        value = functional_value(problem, candidate_on(problem, extremal_a(h), 1.0))
        assert value == pytest.approx(1.0 / 3.0 - 0.25j * h, abs=1e-5)

    def test_regime_c_labels(self, golden_c, candidate_on):
        T = 1.0 / math.sqrt(2.0)
        conditions = natural_residuals(golden_c, candidate_on(golden_c, lambda t: math.sqrt(2.0) * t, T))
        labels = [c.label for c in conditions]
        assert labels == ["y(a) - y_a", "y(T) - y_T", "L - dL/dv*□y (T)"]
        assert max(c.magnitude for c in conditions) < 1e-9

    def test_regime_d_transversality(self, golden_d, candidate_on):
        T = 2.0 / math.sqrt(3.0)
        c = math.sqrt(3.0) - 1.0
        conditions = natural_residuals(golden_d, candidate_on(golden_d, lambda t: c * t, T))
        assert [x.label for x in conditions][-1] == "L - dL/dv*(□y - □ψ) (T)"
        assert max(x.magnitude for x in conditions) < 1e-9

    def test_free_start_reports_dL_dv_at_a(self, candidate_on):
        problem = VariationalProblem.from_text("0.5*v^2", 1, (0.0, 1.0), RegimeB(), 2.0**-4)
        conditions = natural_residuals(problem, candidate_on(problem, lambda t: 2.0 + 0 * t, 0.5))
        assert [c.label for c in conditions] == ["dL/dv(a)", "dL/dv(T)", "L(T)"]
        assert all(c.magnitude == 0 for c in conditions)

    def test_fixed_T_both_ends_has_no_transversality(self, candidate_on):
        problem = VariationalProblem.from_text("0.5*v^2", 1, (0.0, 1.0), FixedTC(1.0, 0.0, 1.0), 2.0**-4)
        report = residual_report(problem, candidate_on(problem, lambda t: t, 1.0))
        assert [c.label for c in report.natural_conditions] == ["y(a) - y_a", "y(T) - y_T"]
        assert report.verdict

    def test_higher_order_conditions(self, golden_higher, candidate_on):
        y = lambda t: -(t**4) / 24 + t**3 / 6 - t**2 / 4 + 0.125  # noqa: E731
        conditions = natural_residuals(golden_higher, candidate_on(golden_higher, y, 1.0))
        labels = [c.label for c in conditions]
        assert labels == ["y(a) - y_a", "□^1 y(a) - y^1_a", "natural[1](T)", "natural[2](T)", "L(T)"]
        assert abs(conditions[0].value) < 1e-12

    def test_report_serialises(self, golden_a, candidate_on):
        problem = golden_a(2.0**-4)
        data = ResidualOut.of(1.0, residual_report(problem, candidate_on(problem, extremal_a(2.0**-4), 1.0))).model_dump()
        assert set(data) == {"T", "el_norm", "natural_conditions", "functional_value", "verdict", "tolerance"}
        assert data["natural_conditions"][2]["label"] == "L(T)"


# =============================================================================
# FIRST VARIATION
# =============================================================================


class TestGateaux:
    """Tests for gateaux_derivative and admissible variations."""

    def test_linear_trajectory_direction_t(self, golden_a, candidate_on):
        problem = golden_a()
        candidate = candidate_on(problem, lambda t: t, 1.0)
        eta = sample(lambda t: t, candidate.y.grid)
        estimate = gateaux_derivative(problem, candidate, eta, 0.0)
        assert estimate.analytic == pytest.approx(1.5, abs=1e-12)
        assert estimate.numeric == pytest.approx(1.5, abs=1e-8)
        assert estimate.agrees()

    @pytest.mark.parametrize("delta", [-0.1, 0.0, 0.1])
    def test_vanishes_at_golden_extremal(self, golden_a, candidate_on, delta):
        problem = golden_a()
        candidate = candidate_on(problem, extremal_a(problem.grid_h), 1.0)
        eta = admissible_variation(problem, candidate, np.random.default_rng(7), delta=delta)
        estimate = gateaux_derivative(problem, candidate, eta, delta)
        assert estimate.magnitude < 5e-3
        assert estimate.gap < 1e-5

    def test_regime_c_with_moving_end(self, golden_c, candidate_on):
        T = 1.0 / math.sqrt(2.0)
        candidate = candidate_on(golden_c, lambda t: math.sqrt(2.0) * t, T)
        eta = admissible_variation(golden_c, candidate, np.random.default_rng(3), delta=0.1)
        check_admissible(golden_c, candidate, eta, 0.1)
        estimate = gateaux_derivative(golden_c, candidate, eta, 0.1)
        assert estimate.magnitude < 0.05
        assert estimate.gap < 1e-4

    def test_higher_order_variation_is_admissible(self, golden_higher, candidate_on):
        y = lambda t: -(t**4) / 24 + t**3 / 6 - t**2 / 4 + 0.125  # noqa: E731
        candidate = candidate_on(golden_higher, y, 1.0)
        eta = admissible_variation(golden_higher, candidate, np.random.default_rng(0))
        check_admissible(golden_higher, candidate, eta, 0.0)

    def test_variation_moving_fixed_start(self, golden_a, candidate_on):
        problem = golden_a()
        candidate = candidate_on(problem, extremal_a(problem.grid_h), 1.0)
        with pytest.raises(InadmissibleVariation):
            gateaux_derivative(problem, candidate, sample(lambda t: 1.0 + t, candidate.y.grid), 0.0)

    def test_fixed_T_rejects_delta(self, candidate_on):
        problem = VariationalProblem.from_text("0.5*v^2", 1, (0.0, 1.0), FixedTAB(1.0, 0.0), 2.0**-4)
        candidate = candidate_on(problem, lambda t: t, 1.0)
        eta = sample(lambda t: t, candidate.y.grid)
        with pytest.raises(InadmissibleVariation):
            check_admissible(problem, candidate, eta, 0.1)
        with pytest.raises(InadmissibleVariation):
            admissible_variation(problem, candidate, np.random.default_rng(0), delta=0.1)

    def test_regime_c_requires_terminal_value(self, golden_c, candidate_on):
        T = 1.0 / math.sqrt(2.0)
        candidate = candidate_on(golden_c, lambda t: math.sqrt(2.0) * t, T)
        with pytest.raises(InadmissibleVariation, match="eta\\(T\\)"):
            check_admissible(golden_c, candidate, sample(lambda t: t, candidate.y.grid), 0.0)

    def test_increment_residual_is_second_order(self, candidate_on):
        h = 2.0**-4
        problem = VariationalProblem.from_text("0.5*v^2", 1, (0.0, 1.0), RegimeA(0.0), h)
        reference = candidate_on(problem, lambda t: t**2, 0.5)
        delta = 2 * h
        value = increment_residual(problem, reference, reference, delta)
        assert value == pytest.approx(-(delta**2) + 1j * h * delta, abs=1e-14)

    def test_increment_residual_exact_for_linear(self, candidate_on):
        problem = VariationalProblem.from_text("0.5*v^2", 1, (0.0, 1.0), RegimeA(0.0), 2.0**-4)
        reference = candidate_on(problem, lambda t: 3.0 * t, 0.5)
        assert abs(increment_residual(problem, reference, reference, 0.125)) < 1e-14


# =============================================================================
# SYMBOLIC CONDITIONS
# =============================================================================


class TestSymbolic:
    """Tests for el_symbolic."""

    def test_regime_a(self, golden_a):
        assert el_symbolic(golden_a()).lines() == ["1 = □/□t(v)", "v(T)=0", "½v(T)²+y(T)=0"]

    def test_regime_b_adds_start_condition(self):
        problem = VariationalProblem.from_text("0.5*v^2 + y", 1, (0.0, 1.0), RegimeB(), 0.25)
        assert el_symbolic(problem).lines() == ["1 = □/□t(v)", "v(a)=0", "v(T)=0", "½v(T)²+y(T)=0"]

    def test_regime_c(self, golden_c):
        assert el_symbolic(golden_c).lines() == ["0 = □/□t(v)", "½v(T)²+1 = v(T)·□y/□t(T)", "y(T)=1"]

    def test_regime_d(self, golden_d):
        lines = el_symbolic(golden_d).lines()
        assert lines[1] == "½v(T)²+1 = v(T)·(□y/□t(T)-□ψ/□t(T))"
        assert lines[2] == "y(T)=ψ(T), ψ(t)=2-t"

    def test_fixed_T(self):
        problem = VariationalProblem.from_text("0.5*v^2", 1, (0.0, 1.0), FixedTC(1.0, 0.0, 1.0), 0.25)
        assert el_symbolic(problem).conditions == ("y(a)=0, y(1)=1",)

    def test_higher_order(self, golden_higher):
        symbolic = el_symbolic(golden_higher)
        assert symbolic.euler_lagrange == "1 + □²/□t²(v2) = 0"
        assert symbolic.conditions == ("-□/□t(v2)(T)=0", "v2(T)=0", "½v2(T)²+y(T)=0")

    def test_render_joins_lines(self, golden_a):
        assert el_symbolic(golden_a()).render() == "1 = □/□t(v)\nv(T)=0\n½v(T)²+y(T)=0"


# =============================================================================
# REGULARITY HYPOTHESES
# =============================================================================


class TestHypotheses:
    """Tests for hypothesis_checks."""

    def test_smooth_extremal_has_no_warnings(self, golden_a, candidate_on):
        problem = golden_a()
        candidate = candidate_on(problem, extremal_a(problem.grid_h), 1.0)
        assert hypothesis_checks(problem, candidate, draws=2) == []


def test_regime_d_factory_parses_curve():
    regime = regime_d(0.0, "2 - t")
    assert regime.label == "D"
    assert regime.free_T
    assert not FixedTAB(1.0).free_T
    assert RegimeC(0.0, 1.0).y_T == 1.0
