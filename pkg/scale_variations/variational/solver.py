"""
Discrete extremal solver.

For a fixed T the unknowns are y on the nodes a - 2n*h .. T_M + 2n*h, where
T_M is the first node at or beyond T. The square system collects

    - the Euler-Lagrange residual at nodes strictly between a and T_M
    - n start conditions at a and n terminal conditions at T
    - n + 1 vanishing (2n+1)-th differences at each end of the array

The closures remove the spurious i^j kernel modes of the Q stencil that the
boundary conditions alone leave undetermined. The system is solved by damped
Newton with a finite-difference Jacobian assembled column group by column
group (every equation only touches nodes within 2n + 1 of its anchor).
Newton stops on a small step, or once the row-weighted residual is below
the rounding floor and no longer shrinks.

Free T is found by scanning the transversality residual over t_scan and
bisecting sign changes of its real part.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import bisect
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import splu

from scale_variations.config import settings
from scale_variations.exceptions import (
    DomainError,
    IndeterminateT,
    NoConvergence,
    NoRoot,
    ProblemError,
    SingularJacobian,
)
from scale_variations.grid_core import NODE_SNAP, SampledFn, make_grid
from scale_variations.lagrangian import eval_curve
from scale_variations.logging_config import get_logger, log_function_call
from scale_variations.variational.problem import (
    Candidate,
    FixedTAB,
    FixedTC,
    RegimeC,
    RegimeD,
    ResidualReport,
    VariationalProblem,
)
from scale_variations.variational.residuals import (
    residual_report,
    sample_terms,
    start_conditions,
    terminal_conditions,
    transversality_value,
)

logger = get_logger(__name__)


# =============================================================================
# RESULTS
# =============================================================================


@dataclass(frozen=True)
class Extremal:
    """A solved candidate with its residual report."""

    candidate: Candidate
    report: ResidualReport
    iterations: int

    @property
    def T(self) -> float:
        return self.candidate.T


@dataclass(frozen=True)
class SolveResult:
    """Every refined root of the transversality residual plus the scan behind them."""

    roots: Tuple[Extremal, ...]
    scan_T: np.ndarray = field(repr=False)
    scan_residual: np.ndarray = field(repr=False)

    @property
    def verified(self) -> Tuple[Extremal, ...]:
        return tuple(r for r in self.roots if r.report.verdict)


# =============================================================================
# DISCRETE SYSTEM AT FIXED T
# =============================================================================


class FixedTSystem:
    """Residual map and sparse Jacobian of the discrete extremal equations at one T."""

    def __init__(self, problem: VariationalProblem, T: float):
        self.problem = problem
        self.T = float(T)
        n = problem.order
        h = problem.grid_h
        self.halo = problem.solver_halo
        self.M = max(int(math.ceil((T - problem.a) / h - NODE_SNAP)), 0)
        if self.M < 2:
            raise ProblemError(f"T={T} is closer than two steps to a={problem.a}")
        self.size = self.M + 1 + 2 * self.halo
        self.start = problem.a - self.halo * h
        self.radius = 2 * n + 1
        self.anchors = self._anchors()

    def _anchors(self) -> np.ndarray:
        """Node each complex equation is centred on, repeated for its real and imaginary rows."""
        n = self.problem.order
        ia = self.halo
        nodes = list(range(ia + 1, ia + self.M))
        nodes += [ia] * n
        nodes += [ia + self.M] * n
        nodes += [s + n for s in range(n + 1)]
        nodes += [self.size - 2 - n - s for s in range(n + 1)]
        if len(nodes) != self.size:
            raise ProblemError(f"system has {len(nodes)} equations for {self.size} unknowns")
        return np.repeat(np.asarray(nodes), 2)

    # -------------------------------------------------------------------------

    def to_complex(self, x: np.ndarray) -> np.ndarray:
        return x[0::2] + 1j * x[1::2]

    def to_real(self, y: np.ndarray) -> np.ndarray:
        x = np.empty(2 * len(y))
        x[0::2] = y.real
        x[1::2] = y.imag
        return x

    def residual(self, x: np.ndarray) -> np.ndarray:
        p = self.problem
        n = p.order
        y = self.to_complex(x)
        terms = sample_terms(p, y, self.start)

        # EL entry idx sits on node idx + 2n = idx + halo
        el = terms.el()[1 : self.M]
        ends = [v for _, v in start_conditions(p, terms)]
        ends += [v for _, v in terminal_conditions(p, terms, self.T)]
        closure = np.diff(y, 2 * n + 1)
        eqs = np.concatenate([el, np.asarray(ends, dtype=complex), closure[: n + 1], closure[-(n + 1) :][::-1]])
        return self.to_real(eqs)

    def jacobian(self, x: np.ndarray, f0: np.ndarray):
        """Forward-difference Jacobian, one residual evaluation per column group."""
        R = self.radius
        period = 2 * R + 1
        rows_all = np.arange(len(f0))
        rows, cols, vals = [], [], []
        for g in range(period):
            nodes = np.arange(g, self.size, period)
            # nearest perturbed node of this group to each row anchor
            owner = g + np.round((self.anchors - g) / period).astype(int) * period
            touched = (owner >= 0) & (owner < self.size) & (np.abs(owner - self.anchors) <= R)
            for comp in (0, 1):
                col_idx = 2 * nodes + comp
                step = settings.jacobian_step * np.maximum(1.0, np.abs(x[col_idx]))
                xp = x.copy()
                xp[col_idx] += step
                df = self.residual(xp) - f0
                step_of_node = np.zeros(self.size)
                step_of_node[nodes] = step
                r = rows_all[touched]
                owners = owner[touched]
                rows.append(r)
                cols.append(2 * owners + comp)
                vals.append(df[r] / step_of_node[owners])
        n = len(f0)
        return coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)).tocsc()

    def initial_guess(self) -> np.ndarray:
        p = self.problem
        regime = p.regime
        y0 = complex(regime.y_a) if regime.y_a is not None else 0j
        t = self.start + np.arange(self.size) * p.grid_h
        if isinstance(regime, (RegimeC, FixedTC, RegimeD)):
            target = regime.y_T if not isinstance(regime, RegimeD) else complex(eval_curve(regime.psi, self.T))
            y = y0 + (target - y0) * (t - p.a) / (self.T - p.a)
        else:
            y = np.full(self.size, y0)
        return self.to_real(np.asarray(y, dtype=complex))

    def candidate(self, x: np.ndarray) -> Candidate:
        p = self.problem
        grid = make_grid(p.a, p.a + self.M * p.grid_h, p.grid_h, self.halo)
        return Candidate(SampledFn(grid, self.to_complex(x)), self.T)


def _row_weights(jacobian) -> np.ndarray:
    """Inverse of the largest magnitude in each Jacobian row; 1 for empty rows."""
    peak = abs(jacobian).max(axis=1).toarray().ravel()
    return 1.0 / np.where(peak > 0, peak, 1.0)


def newton(
    fun: Callable[[np.ndarray], np.ndarray],
    jac: Callable[[np.ndarray, np.ndarray], object],
    x0: np.ndarray,
    step_tol: float,
    max_iter: Optional[int] = None,
    residual_floor: Optional[float] = None,
) -> Tuple[np.ndarray, int]:
    """
    Damped Newton iteration with step halving on the residual norm.

    Residual rows are weighted by the inverse of their largest Jacobian entry
    at x0, so |F| is on the scale of x in every row. Converged when the step
    falls below step_tol, or when, after the first step, |F| is under
    residual_floor * max(1, |F(x0)|) and a step no longer halves it.

    Raises:
        SingularJacobian: LU factorisation fails or yields a non-finite step
        NoConvergence: no step below tolerance within max_iter iterations
    """
    max_iter = max_iter or settings.newton_max_iter
    x = np.asarray(x0, dtype=float).copy()
    f = fun(x)
    J = jac(x, f)
    weights = _row_weights(J)
    norm = float(np.linalg.norm(weights * f))
    floor = (residual_floor or settings.newton_residual_floor) * max(1.0, norm)
    for it in range(1, max_iter + 1):
        if it > 1:
            J = jac(x, f)
        try:
            lu = splu(J)
        except RuntimeError as e:
            raise SingularJacobian(f"Jacobian is singular at iteration {it}: {e}") from e
        dx = lu.solve(-f)
        if not np.all(np.isfinite(dx)):
            raise SingularJacobian(f"non-finite Newton step at iteration {it}")

        scale = max(1.0, float(np.max(np.abs(x))))
        lam = 1.0
        for attempt in range(10):
            small = lam * float(np.max(np.abs(dx))) <= step_tol * scale
            try:
                f_new = fun(x + lam * dx)
                norm_new = float(np.linalg.norm(weights * f_new))
            except DomainError:
                norm_new = math.inf
            if small or norm_new <= (1.0 - 1e-4 * lam) * norm or attempt == 9:
                break
            lam *= 0.5
        if not math.isfinite(norm_new):
            raise NoConvergence(f"Newton step left the domain of L at iteration {it}")
        # at the rounding floor
        if it > 1 and norm <= floor and norm_new > 0.5 * norm:
            return (x + lam * dx, it) if norm_new < norm else (x, it)

        x = x + lam * dx
        f, norm = f_new, norm_new
        if lam * float(np.max(np.abs(dx))) <= step_tol * scale:
            return x, it
    raise NoConvergence(f"Newton did not converge in {max_iter} iterations (|F| = {norm:.3e})")


def _solve_at(problem: VariationalProblem, T: float) -> Tuple[FixedTSystem, np.ndarray, int]:
    system = FixedTSystem(problem, T)
    x, iterations = newton(system.residual, system.jacobian, system.initial_guess(), problem.newton_step_tol)
    return system, x, iterations


def _extremal(problem: VariationalProblem, T: float) -> Extremal:
    system, x, iterations = _solve_at(problem, T)
    candidate = system.candidate(x)
    return Extremal(candidate, residual_report(problem, candidate), iterations)


# =============================================================================
# PUBLIC OPERATIONS
# =============================================================================


@log_function_call()
def solve_fixed_T(problem: VariationalProblem, T: Optional[float] = None) -> Extremal:
    """
    Solve the discrete Euler-Lagrange system with T held fixed.

    T defaults to the regime's own T for the fixed-T regimes.
    """
    if T is None:
        if not isinstance(problem.regime, (FixedTAB, FixedTC)):
            raise ProblemError(f"regime {problem.regime.label} does not fix T")
        T = problem.regime.T
    logger.debug("Solving at fixed T", T=T, regime=problem.regime.label)
    return _extremal(problem, T)


def transversality_at(problem: VariationalProblem, T: float) -> complex:
    """Solve at T and evaluate the transversality residual there."""
    system, x, _ = _solve_at(problem, T)
    terms = sample_terms(problem, system.to_complex(x), system.start)
    return transversality_value(problem, terms, T)


@log_function_call()
def solve_free_T(
    problem: VariationalProblem,
    scan_points: Optional[int] = None,
    tol: Optional[float] = None,
) -> SolveResult:
    """
    Locate every T in t_scan where the transversality residual changes sign.

    Raises:
        IndeterminateT: residual within tolerance on most of the scan
        NoRoot: no sign change of Re r(T) anywhere on the scan
    """
    if not problem.regime.free_T:
        extremal = solve_fixed_T(problem)
        T = np.array([extremal.T])
        return SolveResult((extremal,), T, np.array([0j]))

    scan_points = scan_points or settings.scan_points
    tol_eff = (tol if tol is not None else problem.residual_tol) + settings.consistency_slack * problem.grid_h
    lo, hi = problem.t_scan
    lo = max(lo, problem.a + 2 * problem.grid_h)
    Ts = np.linspace(lo, hi, scan_points)

    residuals = np.full(scan_points, np.nan, dtype=complex)
    for k, T in enumerate(Ts):
        try:
            residuals[k] = transversality_at(problem, float(T))
        except (NoConvergence, SingularJacobian, DomainError) as e:
            logger.debug("Scan point skipped", T=float(T), error=str(e))

    finite = np.isfinite(residuals)
    flat = np.count_nonzero(finite & (np.abs(np.nan_to_num(residuals, nan=np.inf)) <= tol_eff))
    if flat > settings.indeterminate_fraction * scan_points:
        raise IndeterminateT(
            f"transversality residual within {tol_eff:.3g} at {flat} of {scan_points} scan points; T is not determined"
        )

    brackets = _brackets(Ts, residuals)
    if not brackets:
        raise NoRoot(f"transversality residual has no sign change on [{lo:.6g}, {hi:.6g}]")

    roots: List[Extremal] = []
    for left, right in brackets:
        try:
            T_star = left if left == right else _refine(problem, left, right)
            extremal = _extremal(problem, T_star)
        except (NoConvergence, SingularJacobian, DomainError) as e:
            logger.warning("Bracket skipped", left=left, right=right, error=str(e))
            continue
        if not extremal.report.verdict:
            logger.warning(
                "Root rejected by residual verdict",
                T=extremal.T,
                el_norm=extremal.report.el_norm,
                max_natural=extremal.report.max_natural,
            )
        roots.append(extremal)

    if not roots:
        raise NoRoot("every bracket failed to refine")
    logger.info("Free-T scan finished", brackets=len(brackets), verified=sum(r.report.verdict for r in roots))
    return SolveResult(tuple(roots), Ts, residuals)


def _brackets(Ts: np.ndarray, residuals: np.ndarray) -> List[Tuple[float, float]]:
    out = []
    re = residuals.real
    for k in range(len(Ts)):
        if not np.isfinite(residuals[k]):
            continue
        if re[k] == 0.0:
            out.append((float(Ts[k]), float(Ts[k])))
            continue
        if k + 1 < len(Ts) and np.isfinite(residuals[k + 1]) and re[k] * re[k + 1] < 0:
            out.append((float(Ts[k]), float(Ts[k + 1])))
    return out


def _refine(problem: VariationalProblem, left: float, right: float) -> float:
    def re_residual(T: float) -> float:
        return transversality_at(problem, T).real

    return float(bisect(re_residual, left, right, xtol=1e-10, maxiter=200))
