"""
Euler-Lagrange and natural-condition residuals of a candidate.

Everything here works on raw node arrays so the Newton solver can reuse the
same code on its unknowns. Array conventions for a trajectory of K nodes
starting at `start`:

    Q^m y       length K - 2m, entry idx sits on node idx + m
    L, dL/dy,   length K - 2n, entry idx sits on node idx + n
    dL/dv_i
    EL          length K - 4n, entry idx sits on node idx + 2n

Terminal quantities are evaluated by interpolating these arrays at T.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from scale_variations.exceptions import HaloExhausted
from scale_variations.grid_core import NODE_SNAP, SampledFn, interp_values, make_grid, quad_to
from scale_variations.lagrangian import bind, eval_curve, evaluate
from scale_variations.scale_ops import hscale_values, hscale_values_n
from scale_variations.variational.problem import (
    Candidate,
    Condition,
    FixedTC,
    HigherOrder,
    RegimeC,
    RegimeD,
    ResidualReport,
    VariationalProblem,
)

Labelled = List[Tuple[str, complex]]


def _broadcast(value, size: int) -> np.ndarray:
    return np.broadcast_to(np.asarray(value, dtype=complex), (size,)).copy()


# =============================================================================
# SAMPLED TERMS
# =============================================================================


@dataclass
class Terms:
    """Scale derivatives of y and the Lagrangian partials sampled along it."""

    start: float
    h: float
    order: int
    derivs: List[np.ndarray]
    L: np.ndarray
    dL_dy: np.ndarray
    dL_dv: List[np.ndarray]

    @property
    def size(self) -> int:
        return len(self.derivs[0])

    def index_of(self, t: float) -> int:
        return int(round((t - self.start) / self.h))

    def at(self, values: np.ndarray, offset: int, t: float) -> complex:
        """Interpolate an array whose first entry sits on node `offset`."""
        return interp_values(values, self.start + offset * self.h, self.h, t)

    def chain(self, k: int, m: int) -> np.ndarray:
        """Q^m applied to dL/dv_k; first entry on node n + m."""
        return hscale_values_n(self.dL_dv[k - 1], self.h, m)

    def natural(self, i: int, T: float) -> complex:
        """sum_{k=i}^{n} (-1)^{k-i} Q^{k-i}(dL/dv_k) at T."""
        n = self.order
        total = 0j
        for k in range(i, n + 1):
            m = k - i
            total += (-1) ** m * self.at(self.chain(k, m), n + m, T)
        return total

    def el(self) -> np.ndarray:
        """dL/dy + sum_i (-1)^i Q^i(dL/dv_i); first entry on node 2n."""
        n = self.order
        width = self.size - 4 * n
        if width < 1:
            raise HaloExhausted("trajectory too short for the Euler-Lagrange residual")
        out = self.dL_dy[n : n + width].copy()
        for i in range(1, n + 1):
            out += (-1) ** i * self.chain(i, i)[n - i : n - i + width]
        return out


def sample_terms(problem: VariationalProblem, values: np.ndarray, start: float) -> Terms:
    """Evaluate Q^m y and L with its partials on every node where all are defined."""
    n = problem.order
    h = problem.grid_h
    values = np.asarray(values, dtype=complex)
    size = len(values)
    if size - 2 * n < 1:
        raise HaloExhausted(f"need more than {2 * n} nodes for order {n}")

    derivs = [values]
    for _ in range(n):
        derivs.append(hscale_values(derivs[-1], h))

    width = size - 2 * n
    t = start + (np.arange(width) + n) * h
    v = [derivs[m][n - m : n - m + width] for m in range(1, n + 1)]
    env = bind(t, values[n : n + width], v)
    grad = problem.grad
    return Terms(
        start=start,
        h=h,
        order=n,
        derivs=derivs,
        L=_broadcast(evaluate(problem.lagrangian, env), width),
        dL_dy=_broadcast(evaluate(grad.dL_dy, env), width),
        dL_dv=[_broadcast(evaluate(g, env), width) for g in grad.dL_dv],
    )


def terms_for(problem: VariationalProblem, candidate: Candidate) -> Terms:
    return sample_terms(problem, candidate.y.values, candidate.y.grid.start)


def curve_scale_derivative(problem: VariationalProblem, T: float) -> complex:
    """Q psi at T from psi(T - h), psi(T), psi(T + h)."""
    h = problem.grid_h
    psi = np.asarray(eval_curve(problem.regime.psi, np.array([T - h, T, T + h])), dtype=complex)
    return complex(hscale_values(psi, h)[0])


# =============================================================================
# CONDITIONS
# =============================================================================


def start_conditions(problem: VariationalProblem, terms: Terms) -> Labelled:
    """n conditions at t = a: initial data, or dL/dv(a) = 0 where y(a) is free."""
    regime = problem.regime
    a = problem.a
    ia = terms.index_of(a)
    out: Labelled = []
    if regime.y_a is None:
        out.append(("dL/dv(a)", complex(terms.dL_dv[0][ia - terms.order])))
        return out
    out.append(("y(a) - y_a", complex(terms.derivs[0][ia]) - regime.y_a))
    if isinstance(regime, HigherOrder):
        for k, target in enumerate(regime.derivs_a, start=1):
            out.append((f"□^{k} y(a) - y^{k}_a", complex(terms.derivs[k][ia - k]) - complex(target)))
    return out


def terminal_conditions(problem: VariationalProblem, terms: Terms, T: float) -> Labelled:
    """n conditions at T that hold for every fixed T."""
    regime = problem.regime
    if isinstance(regime, (RegimeC, FixedTC)):
        return [("y(T) - y_T", terms.at(terms.derivs[0], 0, T) - regime.y_T)]
    if isinstance(regime, RegimeD):
        psi_T = complex(eval_curve(regime.psi, T))
        return [("y(T) - ψ(T)", terms.at(terms.derivs[0], 0, T) - psi_T)]
    if isinstance(regime, HigherOrder):
        return [(f"natural[{i}](T)", terms.natural(i, T)) for i in range(1, problem.order + 1)]
    return [("dL/dv(T)", terms.natural(1, T))]


def transversality(problem: VariationalProblem, terms: Terms, T: float) -> Labelled:
    """The extra condition that selects T; empty for fixed-T regimes."""
    regime = problem.regime
    if not regime.free_T:
        return []
    n = problem.order
    L_T = terms.at(terms.L, n, T)
    if isinstance(regime, RegimeC):
        G_T = terms.at(terms.dL_dv[0], n, T)
        dy_T = terms.at(terms.derivs[1], 1, T)
        return [("L - dL/dv*□y (T)", L_T - G_T * dy_T)]
    if isinstance(regime, RegimeD):
        G_T = terms.at(terms.dL_dv[0], n, T)
        dy_T = terms.at(terms.derivs[1], 1, T)
        return [("L - dL/dv*(□y - □ψ) (T)", L_T - G_T * (dy_T - curve_scale_derivative(problem, T)))]
    return [("L(T)", L_T)]


def transversality_value(problem: VariationalProblem, terms: Terms, T: float) -> complex:
    return transversality(problem, terms, T)[0][1]


# =============================================================================
# PUBLIC OPERATIONS
# =============================================================================


def el_residual(problem: VariationalProblem, candidate: Candidate) -> SampledFn:
    """
    Euler-Lagrange residual on the nodes where it is defined.

    Raises:
        HaloExhausted: candidate halo below 2n - 1
    """
    g = candidate.y.grid
    n = problem.order
    if g.halo < problem.required_halo:
        raise HaloExhausted(f"need {problem.required_halo} halo layers, candidate has {g.halo}")
    values = terms_for(problem, candidate).el()
    trim = max(2 * n - g.halo, 0)
    grid = make_grid(g.a + trim * g.h, g.a + (g.cells - trim) * g.h, g.h, max(g.halo - 2 * n, 0))
    return SampledFn(grid, values)


def el_norm(problem: VariationalProblem, candidate: Candidate) -> float:
    """max |EL| over nodes strictly between a and T."""
    el = el_residual(problem, candidate)
    nodes = el.grid.nodes
    eps = NODE_SNAP * problem.grid_h
    inside = (nodes > problem.a + eps) & (nodes < candidate.T - eps)
    if not np.any(inside):
        return 0.0
    return float(np.max(np.abs(el.values[inside])))


def natural_residuals(problem: VariationalProblem, candidate: Candidate) -> List[Condition]:
    """
    Initial-data mismatch plus the natural and transversality conditions of the regime.

    FixedT_C has no natural condition; only its boundary mismatches are returned.
    """
    candidate.check(problem)
    terms = terms_for(problem, candidate)
    T = candidate.T
    conditions = start_conditions(problem, terms) + terminal_conditions(problem, terms, T)
    conditions += transversality(problem, terms, T)
    return [Condition(label, complex(value)) for label, value in conditions]


def integrand(problem: VariationalProblem, terms: Terms, samples: np.ndarray, a: float) -> SampledFn:
    """Re-anchor an L-aligned array at a so quad_to can integrate it."""
    n = terms.order
    first = terms.index_of(a) - n
    tail = samples[first:]
    cells = len(tail) - 1
    return SampledFn(make_grid(a, a + cells * terms.h, terms.h, 0), tail)


def functional_value(problem: VariationalProblem, candidate: Candidate) -> complex:
    """I[y, T] = int_a^T L(t, y, Qy, ..., Q^n y) dt by the trapezoid rule."""
    candidate.check(problem)
    terms = terms_for(problem, candidate)
    return quad_to(integrand(problem, terms, terms.L, problem.a), candidate.T)


def residual_report(problem: VariationalProblem, candidate: Candidate) -> ResidualReport:
    """Everything the verdict needs, bundled."""
    conditions = tuple(natural_residuals(problem, candidate))
    norm = el_norm(problem, candidate)
    tol = problem.verdict_tol
    verdict = norm <= tol and all(c.magnitude <= tol for c in conditions)
    return ResidualReport(
        el_norm=norm,
        natural_conditions=conditions,
        functional_value=functional_value(problem, candidate),
        verdict=bool(verdict),
        tolerance=tol,
    )
