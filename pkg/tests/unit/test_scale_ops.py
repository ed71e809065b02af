"""
Unit tests for the h-scale derivative, ladders and convergence diagnostics.

Run with:
    pytest tests/unit/test_scale_ops.py -v
"""

import numpy as np
import pytest

from scale_variations.grid_core import make_grid, sample

# =============================================================================
# STENCILS
# =============================================================================


class TestHScaleDerivative:
    """Tests for hscale_derivative and its relatives."""

    def test_linear_function_has_real_derivative(self):
        from scale_variations.scale_ops import hscale_derivative

        d = hscale_derivative(sample(lambda t: 3.0 * t - 1.0, make_grid(0.0, 1.0, 0.125, 1)))
        np.testing.assert_allclose(d.values, 3.0 + 0j, atol=1e-13)

    def test_square_picks_up_imaginary_h(self):
        from scale_variations.scale_ops import hscale_derivative

        h = 0.0625
        d = hscale_derivative(sample(lambda t: t**2, make_grid(0.0, 1.0, h, 1)))
        np.testing.assert_allclose(d.values, 2.0 * d.grid.nodes + 1j * h, atol=1e-12)

    def test_halo_shrinks_by_one(self):
        from scale_variations.scale_ops import hscale_derivative

        f = sample(np.sin, make_grid(0.0, 1.0, 0.125, 3))
        d = hscale_derivative(f)
        assert d.grid.halo == 2
        assert d.values.shape == (f.values.size - 2,)

    def test_real_part_is_mean_of_forward_and_backward(self):
        from scale_variations.scale_ops import backward_diff, forward_diff, hscale_derivative

        f = sample(np.exp, make_grid(0.0, 1.0, 0.125, 1))
        d = hscale_derivative(f)
        mean = 0.5 * (forward_diff(f).values + backward_diff(f).values)
        half_gap = 0.5 * (forward_diff(f).values - backward_diff(f).values)
        np.testing.assert_allclose(d.values.real, mean.real, atol=1e-13)
        np.testing.assert_allclose(d.values.imag, half_gap.real, atol=1e-13)

    def test_complex_linear(self):
        from scale_variations.scale_ops import hscale_derivative

        g = make_grid(0.0, 1.0, 0.125, 1)
        u = sample(np.sin, g)
        w = sample(np.cos, g)
        combined = hscale_derivative(sample(lambda t: np.sin(t) + 1j * np.cos(t), g))
        expected = hscale_derivative(u).values + 1j * hscale_derivative(w).values
        np.testing.assert_allclose(combined.values, expected, atol=1e-13)

    def test_iterated_matches_raw_stencil(self):
        from scale_variations.scale_ops import hscale_derivative, hscale_derivative_n, hscale_values_n

        f = sample(np.sin, make_grid(0.0, 1.0, 0.125, 2))
        twice = hscale_derivative(hscale_derivative(f))
        np.testing.assert_array_equal(hscale_derivative_n(f, 2).values, twice.values)
        np.testing.assert_array_equal(hscale_values_n(f.values, 0.125, 2), twice.values)

    def test_order_zero_is_identity(self):
        from scale_variations.scale_ops import hscale_derivative_n

        f = sample(np.sin, make_grid(0.0, 1.0, 0.125, 0))
        assert hscale_derivative_n(f, 0) is f

    def test_halo_exhausted(self):
        from scale_variations.exceptions import HaloExhausted
        from scale_variations.scale_ops import hscale_derivative, hscale_derivative_n

        f = sample(np.sin, make_grid(0.0, 1.0, 0.125, 1))
        with pytest.raises(HaloExhausted):
            hscale_derivative_n(f, 2)
        with pytest.raises(HaloExhausted):
            hscale_derivative(hscale_derivative(f))


# =============================================================================
# LADDERS AND EXTRAPOLATION
# =============================================================================


class TestLadders:
    """Tests for Richardson ladders."""

    def test_h_values_are_geometric(self):
        from scale_variations.scale_ops import LadderConfig

        cfg = LadderConfig(h0=0.25, ratio=0.5, rungs=4)
        assert cfg.h_values == [0.25, 0.125, 0.0625, 0.03125]

    def test_richardson_removes_polynomial_terms(self):
        from scale_variations.scale_ops import richardson_levels

        values = [1.0 + h + h**2 for h in (1.0, 0.5, 0.25)]
        levels = richardson_levels(values, 0.5)
        assert levels[-1][0] == pytest.approx(1.0, abs=1e-14)

    def test_ladder_rejects_increasing_steps(self):
        from scale_variations.scale_ops import Ladder

        s1 = sample(np.sin, make_grid(0.0, 1.0, 0.125, 1))
        s2 = sample(np.sin, make_grid(0.0, 1.0, 0.25, 1))
        with pytest.raises(ValueError):
            Ladder((0.125, 0.25), (s1, s2))

    def test_limit_of_square_is_classical_derivative(self):
        from scale_variations.scale_ops import LadderConfig, limit_ladder

        est = limit_ladder(lambda t: t**2, 0.0, 1.0, LadderConfig(h0=0.125, ratio=0.5, rungs=4, tol=1e-8))
        np.testing.assert_allclose(est.value, 2.0 * est.nodes, atol=1e-10)
        assert est.all_converged

    def test_limit_of_sine(self):
        from scale_variations.scale_ops import LadderConfig, limit_ladder

        est = limit_ladder(np.sin, 0.0, 1.0, LadderConfig(h0=2.0**-4, ratio=0.5, rungs=5, tol=1e-6))
        np.testing.assert_allclose(est.value, np.cos(est.nodes), atol=1e-7)

    def test_too_few_rungs(self):
        from scale_variations.exceptions import InsufficientLadder
        from scale_variations.scale_ops import LadderConfig, integral_limit, limit_ladder

        cfg = LadderConfig(h0=0.125, ratio=0.5, rungs=2)
        with pytest.raises(InsufficientLadder):
            limit_ladder(np.sin, 0.0, 1.0, cfg)
        with pytest.raises(InsufficientLadder):
            integral_limit(np.sin, 0.0, 1.0, cfg)

    def test_integral_limit_drops_imaginary_part(self):
        from scale_variations.scale_ops import LadderConfig, integral_limit

        est = integral_limit(lambda t: t**2, 0.0, 1.0, LadderConfig(h0=2.0**-4, ratio=0.5, rungs=4, tol=1e-8))
        assert est.value == pytest.approx(1.0 + 0j, abs=1e-10)
        assert est.converged
        for h, value in est.per_h:
            assert value.imag == pytest.approx(h, abs=1e-12)


# =============================================================================
# CONVERGENCE DIAGNOSTICS
# =============================================================================


class TestDiagnostics:
    """Tests for convergence orders and Hoelder fits."""

    def test_smooth_defect_is_first_order(self):
        from scale_variations.scale_ops import convergence_order

        errors, order = convergence_order(np.sin, np.cos, 0.0, 1.0, [2.0**-k for k in range(4, 9)])
        assert np.all(np.diff(errors) < 0)
        assert order == pytest.approx(1.0, abs=0.1)

    def test_blowup_of_square_root_cusp(self):
        from scale_variations.scale_ops import blowup_slope

        slope = blowup_slope(lambda t: np.sqrt(np.abs(t)), 0.0, 1.0, [2.0**-k for k in range(3, 8)])
        assert slope == pytest.approx(-0.5, abs=1e-6)

    def test_holder_fit_of_square_root(self):
        from scale_variations.scale_ops import estimate_holder_exponent

        est = estimate_holder_exponent(np.sqrt, (0.0, 1.0))
        assert est.alpha_hat == pytest.approx(0.5, abs=1e-6)
        assert est.fit_r2 == pytest.approx(1.0, abs=1e-9)

    def test_holder_fit_is_clamped_to_one(self):
        from scale_variations.scale_ops import estimate_holder_exponent

        est = estimate_holder_exponent(lambda t: 2.0 * t, (0.0, 1.0))
        assert est.alpha_hat == pytest.approx(1.0, abs=1e-9)
        assert est.c_hat == pytest.approx(2.0, rel=1e-9)

    def test_constant_function_is_degenerate(self):
        from scale_variations.exceptions import DegenerateFit
        from scale_variations.scale_ops import estimate_holder_exponent

        with pytest.raises(DegenerateFit):
            estimate_holder_exponent(lambda t: np.ones_like(t), (0.0, 1.0))

    def test_too_few_scales(self):
        from scale_variations.exceptions import InsufficientLadder
        from scale_variations.scale_ops import estimate_holder_exponent

        with pytest.raises(InsufficientLadder):
            estimate_holder_exponent(np.sqrt, (0.0, 1.0), scales=[0.5, 0.25, 0.125])

    @pytest.mark.parametrize("name", ["sin", "exp", "poly_3"])
    def test_catalogue_converges_at_first_order(self, name):
        from scale_variations.holder_gen import smooth_catalogue
        from scale_variations.scale_ops import convergence_order

        fn = smooth_catalogue(name)
        h_values = [2.0**-k for k in range(6, 13)]
        errors, order = convergence_order(fn.f, fn.df, 0.0, 1.0, h_values)
        assert order >= 0.95
        assert np.all(errors <= 5.0 * np.array(h_values))


# =============================================================================
# WEIERSTRASS INPUTS
# =============================================================================


class TestNondifferentiable:
    """Tests for the h-scale derivative of a Weierstrass series."""

    @pytest.fixture
    def params(self):
        from scale_variations.holder_gen import WeierstrassParams

        return WeierstrassParams(0.5, 3.0, 20)

    def test_blowup_slope_tracks_exponent(self, params):
        from scale_variations.holder_gen import weierstrass
        from scale_variations.scale_ops import blowup_slope

        slope = blowup_slope(weierstrass(params), 0.0, 1.0, [3.0**-k for k in range(3, 9)])
        assert slope == pytest.approx(params.exponent - 1.0, abs=0.15)

    def test_limit_ladder_does_not_converge(self, params):
        from scale_variations.holder_gen import weierstrass
        from scale_variations.scale_ops import LadderConfig, limit_ladder

        est = limit_ladder(weierstrass(params), 0.0, 1.0, LadderConfig(h0=2.0**-4, ratio=0.5, rungs=5, tol=1e-6))
        assert not est.all_converged
