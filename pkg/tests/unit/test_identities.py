"""
Unit tests for the finite-h calculus rules.

Run with:
    pytest tests/unit/test_identities.py -v
"""

import numpy as np
import pytest

from scale_variations.holder_gen import WeierstrassParams, weierstrass
from scale_variations.identities import (
    IdentityReport,
    _decay_report,
    barrow_residual,
    default_ladder,
    default_offsets,
    holder_ladder,
    leibniz_residual,
    parts_residual,
    taylor_order_fit,
)
from scale_variations.models import IdentityOut
from scale_variations.scale_ops import LadderConfig


def identity(t):
    return np.asarray(t, dtype=float)


def square(t):
    return np.asarray(t, dtype=float) ** 2


# =============================================================================
# LEIBNIZ
# =============================================================================


class TestLeibniz:
    """Tests for leibniz_residual."""

    def test_residual_equals_step_for_identity(self):
        report = leibniz_residual(identity, identity, (0.0, 1.0))
        for h, r in report.residual_per_h:
            assert r == pytest.approx(h, abs=1e-13)
        assert report.fitted_order == pytest.approx(1.0, abs=1e-6)
        assert report.passed

    def test_symmetric_in_its_arguments(self):
        fg = leibniz_residual(np.sin, np.exp, (0.0, 1.0))
        gf = leibniz_residual(np.exp, np.sin, (0.0, 1.0))
        assert fg.residual_per_h == gf.residual_per_h

    def test_constant_factor_is_exact(self):
        report = leibniz_residual(lambda t: np.full_like(t, 2.0), np.sin, (0.0, 1.0))
        assert np.all(report.residuals == 0.0)
        assert report.fitted_order is None
        assert report.passed


# =============================================================================
# BARROW AND PARTS
# =============================================================================


class TestBarrowAndParts:
    """Tests for barrow_residual and parts_residual."""

    def test_barrow_square_on_coarse_step(self):
        report = barrow_residual(square, (0.0, 1.0), LadderConfig(h0=0.1, ratio=0.5, rungs=2))
        assert report.residual_per_h[0][1] == pytest.approx(abs(-0.1 + 0.1j), abs=1e-12)

    def test_barrow_decays_for_smooth_function(self):
        report = barrow_residual(np.sin, (0.0, 1.0))
        assert report.passed
        assert report.fitted_order == pytest.approx(1.0, abs=0.1)

    def test_parts_decays_for_smooth_functions(self):
        report = parts_residual(np.sin, np.cos, (0.0, 1.0))
        assert report.passed
        assert np.all(np.diff(report.residuals) < 0)

    def test_tolerance_controls_pass(self):
        report = barrow_residual(np.sin, (0.0, 1.0), tol=1e-12)
        assert not report.passed


# =============================================================================
# TAYLOR
# =============================================================================


class TestTaylor:
    """Tests for taylor_order_fit."""

    def test_square_has_second_order_remainder(self):
        report = taylor_order_fit(square, 0.0, [2.0**-k for k in range(1, 6)])
        assert report.fitted_order == pytest.approx(2.0, abs=1e-9)
        assert report.passed

    def test_affine_remainder_vanishes(self):
        report = taylor_order_fit(lambda t: 3.0 * np.asarray(t) + 1.0, 0.0, default_offsets())
        assert report.fitted_order is None
        assert report.passed
        assert np.all(report.residuals == 0.0)

    def test_scalar_valued_function(self):
        report = taylor_order_fit(lambda t: 2.5, 0.3, [0.5, 0.25, 0.125])
        assert report.passed

    def test_offsets_must_be_positive(self):
        with pytest.raises(ValueError):
            taylor_order_fit(square, 0.0, [0.5, -0.25])

    def test_default_offsets_follow_ladder(self):
        ladder = default_ladder()
        assert default_offsets(ladder) == [8 * h for h in ladder.h_values]


class TestIdentityReport:
    """Tests for IdentityReport."""

    def test_serialises_with_pass_key(self):
        report = IdentityReport("barrow", ((0.1, 0.2), (0.05, 0.1)), 1.0, True)
        data = IdentityOut.of(report).model_dump(by_alias=True)
        assert data["pass"] is True
        assert data["residual_per_h"] == [{"h": 0.1, "residual": 0.2}, {"h": 0.05, "residual": 0.1}]
        assert data["note"] is None

    def test_empty_residuals_rejected(self):
        with pytest.raises(ValueError):
            IdentityReport("barrow", (), None, True)


# =============================================================================
# HOELDER INPUTS
# =============================================================================


class TestWeierstrassIdentities:
    """Tests for the identities on a Weierstrass series with exponent ln 2 / ln 3."""

    @pytest.fixture
    def w(self):
        return weierstrass(WeierstrassParams(0.5, 3.0, 20))

    def test_holder_ladder_matches_frequency(self):
        ladder = holder_ladder(3.0, rungs=5)
        np.testing.assert_allclose(ladder.h_values, [3.0**-k for k in range(3, 8)], rtol=1e-12)

    def test_leibniz_decays_monotonically(self, w):
        report = leibniz_residual(w, w, (0.0, 1.0), holder_ladder(3.0, rungs=5), holder=True)
        assert np.all(np.diff(report.residuals) < 0)
        assert report.passed

    def test_barrow_decays_monotonically(self, w):
        report = barrow_residual(w, (0.0, 1.0), holder_ladder(3.0, rungs=5), holder=True)
        assert np.all(np.diff(report.residuals) < 0)
        assert report.passed
        assert report.fitted_order == pytest.approx(np.log(2.0) / np.log(3.0), abs=0.1)

    def test_holder_pass_ignores_final_size(self):
        per_h = ((0.1, 9.0), (0.05, 7.0), (0.025, 6.0))
        assert _decay_report("leibniz", per_h, 0.5, holder=True).passed
        assert not _decay_report("leibniz", per_h, 0.5).passed
