"""
Problem definition: constraint regimes, the variational problem itself,
candidate extremals and residual reports.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from scale_variations.config import settings
from scale_variations.exceptions import ProblemError
from scale_variations.grid_core import Grid, SampledFn, make_grid
from scale_variations.lagrangian import Expr, GradL, gradient, highest_order, parse_curve, parse_expr, to_text

# =============================================================================
# CONSTRAINT REGIMES
# =============================================================================


@dataclass(frozen=True)
class RegimeA:
    """y(a) fixed; T and y(T) free."""

    y_a: float
    label = "A"
    free_T = True


@dataclass(frozen=True)
class RegimeB:
    """Everything free: y(a), T and y(T)."""

    label = "B"
    free_T = True

    @property
    def y_a(self) -> None:
        return None


@dataclass(frozen=True)
class RegimeC:
    """Both ends fixed, T free."""

    y_a: float
    y_T: float
    label = "C"
    free_T = True


@dataclass(frozen=True)
class RegimeD:
    """y(a) fixed, terminal point constrained to the curve y(T) = psi(T)."""

    y_a: float
    psi: Expr
    label = "D"
    free_T = True


@dataclass(frozen=True)
class FixedTAB:
    """T fixed, free terminal value; y(a) fixed unless y_a is None."""

    T: float
    y_a: Optional[float] = None
    label = "fixedT"
    free_T = False


@dataclass(frozen=True)
class FixedTC:
    """T fixed, both end values fixed."""

    T: float
    y_a: float
    y_T: float
    label = "fixedT"
    free_T = False


@dataclass(frozen=True)
class HigherOrder:
    """y(a) and Q^k y(a), k = 1..n-1, fixed; T and the terminal data free."""

    y_a: float
    derivs_a: Tuple[complex, ...] = ()
    label = "higher"
    free_T = True


Regime = Union[RegimeA, RegimeB, RegimeC, RegimeD, FixedTAB, FixedTC, HigherOrder]

FIRST_ORDER_REGIMES = (RegimeA, RegimeB, RegimeC, RegimeD, FixedTAB, FixedTC)


# =============================================================================
# PROBLEM
# =============================================================================


@dataclass(frozen=True)
class VariationalProblem:
    """
    Minimise-or-stationarise I[y, T] = int_a^T L(t, y, Qy, ..., Q^n y) dt.

    The grid halo needed for the Euler-Lagrange residual is 2n - 1 layers:
    n for Q^n y plus up to n - 1 more for the Q chains of dL/dv_i.
    """

    lagrangian: Expr
    order: int
    interval: Tuple[float, float]
    regime: Regime
    grid_h: float
    t_scan: Optional[Tuple[float, float]] = None
    residual_tol: float = field(default_factory=lambda: settings.residual_tol)
    newton_step_tol: float = field(default_factory=lambda: settings.newton_step_tol)
    grad: GradL = field(init=False, repr=False)

    def __post_init__(self):
        a, b = self.interval
        if self.order < 1:
            raise ProblemError(f"order must be >= 1, got {self.order}")
        if highest_order(self.lagrangian) > self.order:
            raise ProblemError(f"lagrangian uses v{highest_order(self.lagrangian)} but order is {self.order}")
        if self.order > 1 and not isinstance(self.regime, HigherOrder):
            raise ProblemError(f"regime {self.regime.label} is first order; use the higher-order regime for n > 1")
        if isinstance(self.regime, HigherOrder) and len(self.regime.derivs_a) != self.order - 1:
            raise ProblemError(f"higher-order regime needs {self.order - 1} initial scale derivatives")

        # validates h and commensurability
        self.grid(self.required_halo)

        if isinstance(self.regime, (FixedTAB, FixedTC)):
            T = self.regime.T
            cells = (T - a) / self.grid_h
            if not (a < T <= b) or abs(cells - round(cells)) > 1e-9 * max(1.0, cells):
                raise ProblemError(f"fixed T={T} must be a grid node inside ({a}, {b}]")

        scan = self.t_scan if self.t_scan is not None else (a, b)
        if not (a <= scan[0] < scan[1] <= b):
            raise ProblemError(f"t_scan {scan} must lie within [{a}, {b}]")
        object.__setattr__(self, "t_scan", (float(scan[0]), float(scan[1])))
        object.__setattr__(self, "grad", gradient(self.lagrangian, self.order))

    @classmethod
    def from_text(
        cls,
        lagrangian: str,
        order: int,
        interval: Tuple[float, float],
        regime: Regime,
        grid_h: float,
        t_scan: Optional[Tuple[float, float]] = None,
        **tolerances,
    ) -> "VariationalProblem":
        return cls(parse_expr(lagrangian, order), order, tuple(interval), regime, grid_h, t_scan, **tolerances)

    @property
    def a(self) -> float:
        return self.interval[0]

    @property
    def b(self) -> float:
        return self.interval[1]

    @property
    def required_halo(self) -> int:
        return 2 * self.order - 1

    @property
    def solver_halo(self) -> int:
        """Halo used for solved candidates: one guard layer beyond the requirement."""
        return 2 * self.order

    @property
    def verdict_tol(self) -> float:
        """Residual bound: the configured tolerance plus the O(h) consistency allowance."""
        return self.residual_tol + settings.consistency_slack * self.grid_h

    def grid(self, halo: Optional[int] = None) -> Grid:
        return make_grid(self.a, self.b, self.grid_h, self.required_halo if halo is None else halo)

    def describe(self) -> dict:
        return {
            "lagrangian": to_text(self.lagrangian),
            "order": self.order,
            "interval": list(self.interval),
            "regime": self.regime.label,
            "h": self.grid_h,
        }


def regime_d(y_a: float, psi_src: str) -> RegimeD:
    return RegimeD(y_a=y_a, psi=parse_curve(psi_src))


# =============================================================================
# CANDIDATES AND REPORTS
# =============================================================================


@dataclass(frozen=True)
class Candidate:
    """Trajectory samples paired with a terminal point T."""

    y: SampledFn
    T: float

    def check(self, problem: VariationalProblem) -> None:
        g = self.y.grid
        if not math.isclose(g.h, problem.grid_h, rel_tol=1e-9):
            raise ProblemError(f"candidate step {g.h} differs from problem step {problem.grid_h}")
        if abs(g.a - problem.a) > 1e-9 * g.h:
            raise ProblemError(f"candidate starts at {g.a}, problem at {problem.a}")
        if g.halo < problem.required_halo:
            raise ProblemError(f"candidate halo {g.halo} below the required {problem.required_halo}")
        if not (problem.a < self.T <= g.end + 1e-9 * g.h):
            raise ProblemError(f"T={self.T} outside the candidate span")


@dataclass(frozen=True)
class Condition:
    label: str
    value: complex

    @property
    def magnitude(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class ResidualReport:
    """Euler-Lagrange norm, natural conditions, functional value and verdict."""

    el_norm: float
    natural_conditions: Tuple[Condition, ...]
    functional_value: complex
    verdict: bool
    tolerance: float

    def condition(self, label: str) -> Condition:
        for c in self.natural_conditions:
            if c.label == label:
                return c
        raise KeyError(label)

    @property
    def max_natural(self) -> float:
        return max((c.magnitude for c in self.natural_conditions), default=0.0)
