"""
A posteriori checks of the regularity hypotheses on a solved extremal.

The limit of the integral of Q_h(dL/dv_i * eta) is extrapolated across a
ladder for a few random admissible eta. A ladder that does not settle means
the non-differentiable part of dL/dv_i * eta does not integrate away; that is
reported as a warning, never as a failure.
"""

from typing import List, Optional

import numpy as np

from scale_variations.config import settings
from scale_variations.exceptions import ScaleCalculusError
from scale_variations.logging_config import get_logger
from scale_variations.scale_ops import LadderConfig, integral_limit
from scale_variations.variational.gateaux import admissible_variation
from scale_variations.variational.problem import Candidate, VariationalProblem
from scale_variations.variational.residuals import terms_for

logger = get_logger(__name__)


def _interpolant(nodes: np.ndarray, values: np.ndarray):
    def f(t):
        return np.interp(t, nodes, values.real) + 1j * np.interp(t, nodes, values.imag)

    return f


def hypothesis_checks(
    problem: VariationalProblem,
    candidate: Candidate,
    draws: Optional[int] = None,
    seed: int = 0,
) -> List[str]:
    """Warnings for every (draw, i) whose ladder for int Q_h(dL/dv_i * eta) fails to converge."""
    draws = draws if draws is not None else settings.hypothesis_draws
    rng = np.random.default_rng(seed)
    terms = terms_for(problem, candidate)
    n = problem.order
    h = problem.grid_h
    nodes = terms.start + (np.arange(len(terms.L)) + n) * h
    tol = problem.verdict_tol
    config = LadderConfig(h0=min(16 * h, 0.5 * (candidate.T - problem.a)), ratio=0.5, rungs=5, tol=tol)

    warnings: List[str] = []
    for draw in range(draws):
        eta = admissible_variation(problem, candidate, rng)
        eta_on_nodes = eta.values[n : n + len(terms.L)]
        for i in range(1, n + 1):
            product = terms.dL_dv[i - 1] * eta_on_nodes
            try:
                estimate = integral_limit(_interpolant(nodes, product), problem.a, candidate.T, config)
            except ScaleCalculusError as e:
                warnings.append(f"draw {draw}: dL/dv{i}*eta ladder failed: {e}")
                continue
            if not estimate.converged:
                warnings.append(
                    f"draw {draw}: limit of int □(dL/dv{i}*eta) not settled (gap {estimate.e_residual:.3g} > {tol:.3g})"
                )
    if warnings:
        logger.warning("Regularity hypotheses not confirmed", count=len(warnings))
    return warnings
