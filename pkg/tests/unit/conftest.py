"""
Fixtures for unit tests: golden variational problems with closed-form
extremals and helpers to build candidates on the problem lattice.
"""

import numpy as np
import pytest

from scale_variations.grid_core import make_grid, sample
from scale_variations.variational import (
    Candidate,
    HigherOrder,
    RegimeA,
    RegimeC,
    VariationalProblem,
    regime_d,
)

H_FAST = 2.0**-8


@pytest.fixture
def golden_a():
    """L = 1/2 v^2 + y, y(0) = 1/2, free T: extremal 1/2 (t - 1)^2 with T = 1."""

    def build(h: float = H_FAST) -> VariationalProblem:
        return VariationalProblem.from_text("0.5*v^2 + y", 1, (0.0, 2.0), RegimeA(0.5), h, (0.5, 1.5))

    return build


@pytest.fixture
def golden_c():
    """L = 1/2 v^2 + 1, y(0) = 0, y(T) = 1: y = sqrt(2) t with T = 1/sqrt(2)."""
    return VariationalProblem.from_text("0.5*v^2 + 1", 1, (0.0, 2.0), RegimeC(0.0, 1.0), H_FAST, (0.3, 1.5))


@pytest.fixture
def golden_d():
    """L = 1/2 v^2 + 1, y(0) = 0, y(T) = 2 - T: T = 2/sqrt(3)."""
    return VariationalProblem.from_text("0.5*v^2 + 1", 1, (0.0, 2.0), regime_d(0.0, "2 - t"), H_FAST, (0.5, 1.8))


@pytest.fixture
def golden_higher():
    """L = 1/2 v2^2 + y, y(0) = 1/8, Qy(0) = 0: T = 1."""
    return VariationalProblem.from_text(
        "0.5*v2^2 + y", 2, (0.0, 2.0), HigherOrder(0.125, (0j,)), H_FAST, (0.5, 1.5)
    )


@pytest.fixture
def candidate_on():
    """Candidate with samples of f on the problem lattice, core [a, T], halo 2n."""

    def build(problem: VariationalProblem, f, T: float, halo: int = None) -> Candidate:
        halo = problem.solver_halo if halo is None else halo
        cells = int(np.ceil((T - problem.a) / problem.grid_h - 1e-9))
        grid = make_grid(problem.a, problem.a + cells * problem.grid_h, problem.grid_h, halo)
        return Candidate(sample(f, grid), T)

    return build
