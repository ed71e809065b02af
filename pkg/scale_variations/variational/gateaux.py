"""First variation of the discrete functional and the variations it is taken along."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from scale_variations.config import settings
from scale_variations.exceptions import InadmissibleVariation
from scale_variations.grid_core import SampledFn, interp_linear, quad_to
from scale_variations.logging_config import get_logger
from scale_variations.scale_ops import hscale_values, hscale_values_n
from scale_variations.variational.problem import (
    Candidate,
    FixedTC,
    HigherOrder,
    RegimeC,
    RegimeD,
    VariationalProblem,
)
from scale_variations.variational.residuals import (
    curve_scale_derivative,
    functional_value,
    integrand,
    terms_for,
)

logger = get_logger(__name__)

ADMISSIBLE_ATOL = 1e-8


@dataclass(frozen=True)
class GateauxEstimate:
    """Numeric and analytic values of dI[y + e eta, T + e delta]/de at e = 0."""

    numeric: complex
    analytic: complex
    eps: float

    @property
    def gap(self) -> float:
        return abs(self.numeric - self.analytic)

    @property
    def magnitude(self) -> float:
        return max(abs(self.numeric), abs(self.analytic))

    def agrees(self) -> bool:
        return self.gap <= max(1e-6, 1e-3 * self.magnitude)


# =============================================================================
# ADMISSIBILITY
# =============================================================================


def _scale_derivative_at(values: SampledFn, t: float) -> complex:
    g = values.grid
    return interp_linear(SampledFn(g.shrink(), hscale_values(values.values, g.h)), t)


def terminal_target(problem: VariationalProblem, candidate: Candidate, delta: float) -> Optional[complex]:
    """Required eta(T), or None when eta(T) is free."""
    regime = problem.regime
    T = candidate.T
    if isinstance(regime, RegimeC):
        return -_scale_derivative_at(candidate.y, T) * delta
    if isinstance(regime, RegimeD):
        return (curve_scale_derivative(problem, T) - _scale_derivative_at(candidate.y, T)) * delta
    if isinstance(regime, FixedTC):
        return 0j
    return None


def check_admissible(problem: VariationalProblem, candidate: Candidate, eta: SampledFn, delta: float) -> None:
    """
    Raises:
        InadmissibleVariation: eta or delta violates the regime's endpoint constraints
    """
    regime = problem.regime
    if not eta.grid.same_nodes(candidate.y.grid):
        raise InadmissibleVariation("variation must live on the candidate grid")
    if not regime.free_T and delta != 0:
        raise InadmissibleVariation(f"T is fixed in this regime; delta must be 0, got {delta}")

    scale = max(1.0, float(np.max(np.abs(eta.values))))
    a = problem.a
    if regime.y_a is not None and abs(interp_linear(eta, a)) > ADMISSIBLE_ATOL * scale:
        raise InadmissibleVariation(f"eta(a) = {interp_linear(eta, a):.3g}, must vanish")
    if isinstance(regime, HigherOrder):
        for k in range(1, problem.order):
            d = hscale_values_n(eta.values, eta.grid.h, k)
            value = interp_linear(SampledFn(eta.grid.shrink(k), d), a)
            if abs(value) > ADMISSIBLE_ATOL * scale / eta.grid.h**k:
                raise InadmissibleVariation(f"□^{k} eta(a) = {value:.3g}, must vanish")

    target = terminal_target(problem, candidate, delta)
    if target is not None:
        eta_T = interp_linear(eta, candidate.T)
        if abs(eta_T - target) > ADMISSIBLE_ATOL * max(scale, abs(target)):
            raise InadmissibleVariation(f"eta(T) = {eta_T:.6g}, regime requires {target:.6g}")


# =============================================================================
# FIRST VARIATION
# =============================================================================


def gateaux_derivative(
    problem: VariationalProblem,
    candidate: Candidate,
    eta: SampledFn,
    delta: float,
    eps: Optional[float] = None,
) -> GateauxEstimate:
    """
    Derivative of I[y + e*eta, T + e*delta] at e = 0, estimated two ways.

    The numeric value is a central difference in e (one-sided when T + e*delta
    would leave the sampled span). The analytic value integrates
    dL/dy*eta + sum_i dL/dv_i * Q^i eta and adds L(T)*delta.
    """
    check_admissible(problem, candidate, eta, delta)
    eps = eps or settings.gateaux_eps
    y = candidate.y
    g = y.grid
    T = candidate.T
    n = problem.order

    def value_at(e: float) -> complex:
        shifted = Candidate(y.with_values(y.values + e * eta.values), T + e * delta)
        return functional_value(problem, shifted)

    span_end = g.b + (g.halo - n) * g.h
    if T + eps * abs(delta) <= span_end:
        numeric = (value_at(eps) - value_at(-eps)) / (2.0 * eps)
    else:
        numeric = (3.0 * value_at(0.0) - 4.0 * value_at(-eps) + value_at(-2.0 * eps)) / (2.0 * eps)

    terms = terms_for(problem, candidate)
    width = len(terms.L)
    first_variation = terms.dL_dy * eta.values[n : n + width]
    for i in range(1, n + 1):
        d = hscale_values_n(eta.values, g.h, i)
        first_variation = first_variation + terms.dL_dv[i - 1] * d[n - i : n - i + width]
    analytic = quad_to(integrand(problem, terms, first_variation, problem.a), T)
    analytic += terms.at(terms.L, n, T) * delta

    logger.debug("Gateaux derivative", numeric=abs(numeric), analytic=abs(analytic), delta=delta)
    return GateauxEstimate(complex(numeric), complex(analytic), float(eps))


def admissible_variation(
    problem: VariationalProblem,
    candidate: Candidate,
    rng: np.random.Generator,
    amplitude: float = 0.1,
    delta: float = 0.0,
) -> SampledFn:
    """
    Random smooth variation meeting the regime's endpoint constraints.

    eta = q(t) * (t - a_s)_+^(n+1) with a_s = a + (n-1)h vanishes together with
    its first n - 1 scale derivatives at a; q mixes a constant and three sine
    modes. For C, D and FixedT_C a ramp of the same shape moves eta(T) onto
    the required terminal value.
    """
    regime = problem.regime
    if not regime.free_T and delta != 0:
        raise InadmissibleVariation("T is fixed in this regime; delta must be 0")

    g = candidate.y.grid
    n = problem.order
    a, b = problem.a, problem.b
    t = g.nodes
    a_s = a + (n - 1) * g.h

    coeffs = rng.normal(size=4)
    q = coeffs[0] + sum(c * np.sin((m + 1) * np.pi * (t - a) / (b - a)) for m, c in enumerate(coeffs[1:]))
    base = q * np.clip(t - a_s, 0.0, None) ** (n + 1)
    peak = float(np.max(np.abs(base)))
    eta = base * (amplitude / peak) if peak > 0 else base
    eta = eta.astype(complex)

    target = terminal_target(problem, candidate, delta)
    if target is not None:
        ramp = np.clip(t - a_s, 0.0, None) ** (n + 1)
        ramp_T = interp_linear(SampledFn(g, ramp), candidate.T)
        eta_T = interp_linear(SampledFn(g, eta), candidate.T)
        eta = eta + (target - eta_T) * ramp / ramp_T
    return SampledFn(g, eta)


def increment_residual(problem: VariationalProblem, reference: Candidate, perturbed: Candidate, delta: float) -> complex:
    """
    eta(T) - (dy_T - Qy(T) * delta) for two neighbouring candidates.

    eta = y_pert - y_ref and dy_T = y_pert(T + delta) - y_ref(T). The value is
    O(delta^2) for smooth neighbouring extremals.
    """
    T = reference.T
    eta_T = interp_linear(perturbed.y, T) - interp_linear(reference.y, T)
    dy_T = interp_linear(perturbed.y, T + delta) - interp_linear(reference.y, T)
    return complex(eta_T - (dy_T - _scale_derivative_at(reference.y, T) * delta))

