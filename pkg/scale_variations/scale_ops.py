"""
The h-scale derivative, its iterates, and the ladder machinery that stands in
for the h -> 0 limit.

    forward    D f(t) = (f(t+h) - f(t)) / h
    backward   N f(t) = (f(t) - f(t-h)) / h
    h-scale    Q f(t) = 1/2 [(D + N) f(t) + i (D - N) f(t)]

Re Q f is the central difference, Im Q f is half the second difference over h.
Every application consumes one halo layer per side; results live on the
shrunken grid and nothing is padded.

The limit <.> is computed by Richardson extrapolation across a geometric
ladder of steps. The gap between the finest two extrapolants is the
non-convergent remainder (the "E-part" proxy).
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from scale_variations.config import settings
from scale_variations.exceptions import DegenerateFit, HaloExhausted, InsufficientLadder
from scale_variations.grid_core import Grid, HolderEstimate, SampledFn, interp_linear, make_grid, quad_to, sample
from scale_variations.logging_config import get_logger

logger = get_logger(__name__)


# =============================================================================
# RAW STENCILS
# =============================================================================


def hscale_values(values: np.ndarray, h: float) -> np.ndarray:
    """Q applied to raw node values; the result is two entries shorter."""
    ahead = values[2:]
    here = values[1:-1]
    behind = values[:-2]
    # 1/2 (D + N) is the central difference, 1/2 (D - N) the second difference over 2h
    return (ahead - behind) / (2.0 * h) + 1j * (ahead - 2.0 * here + behind) / (2.0 * h)


def hscale_values_n(values: np.ndarray, h: float, n: int) -> np.ndarray:
    """Q applied n times to raw node values (2n entries shorter)."""
    out = values
    for _ in range(n):
        out = hscale_values(out, h)
    return out


def _require_halo(f: SampledFn, layers: int) -> None:
    if f.grid.halo < layers:
        raise HaloExhausted(f"need {layers} halo layer(s), grid has {f.grid.halo}")


# =============================================================================
# OPERATORS ON SAMPLED FUNCTIONS
# =============================================================================


def forward_diff(f: SampledFn) -> SampledFn:
    """h-forward difference on the grid with one halo layer fewer."""
    _require_halo(f, 1)
    v = f.values
    return SampledFn(f.grid.shrink(), (v[2:] - v[1:-1]) / f.grid.h)


def backward_diff(f: SampledFn) -> SampledFn:
    """h-backward difference on the grid with one halo layer fewer."""
    _require_halo(f, 1)
    v = f.values
    return SampledFn(f.grid.shrink(), (v[1:-1] - v[:-2]) / f.grid.h)


def hscale_derivative(f: SampledFn) -> SampledFn:
    """h-scale derivative; complex-linear, so Re f and Im f are handled together."""
    _require_halo(f, 1)
    return SampledFn(f.grid.shrink(), hscale_values(f.values, f.grid.h))


def hscale_derivative_n(f: SampledFn, n: int) -> SampledFn:
    """n-fold h-scale derivative; n = 0 returns f unchanged."""
    if n < 0:
        raise ValueError(f"order must be nonnegative, got {n}")
    if n == 0:
        return f
    _require_halo(f, n)
    return SampledFn(f.grid.shrink(n), hscale_values_n(f.values, f.grid.h, n))


# =============================================================================
# LADDERS AND EXTRAPOLATION
# =============================================================================


@dataclass(frozen=True)
class LadderConfig:
    """Geometric ladder h0, h0*r, h0*r^2, ... with `rungs` steps."""

    h0: float
    ratio: float = field(default_factory=lambda: settings.ladder_ratio)
    rungs: int = field(default_factory=lambda: settings.ladder_rungs)
    tol: float = field(default_factory=lambda: settings.ladder_tol)

    @property
    def h_values(self) -> List[float]:
        return [self.h0 * self.ratio**k for k in range(self.rungs)]


@dataclass(frozen=True)
class Ladder:
    """One sampled function per step, all sharing the core interval."""

    h_values: Tuple[float, ...]
    samples_per_h: Tuple[SampledFn, ...]

    def __post_init__(self):
        if any(b >= a for a, b in zip(self.h_values, self.h_values[1:])):
            raise ValueError("ladder steps must be strictly decreasing")
        cores = {(s.grid.a, s.grid.b) for s in self.samples_per_h}
        if len(cores) > 1:
            raise ValueError("ladder samples must share one core interval")


@dataclass(frozen=True)
class LimitEstimate:
    """Extrapolated values per node with the remainder proxy and convergence flags."""

    nodes: np.ndarray
    value: np.ndarray
    e_residual: np.ndarray
    converged: np.ndarray

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))


@dataclass(frozen=True)
class IntegralEstimate:
    """Extrapolated limit of a scalar sequence across a ladder."""

    value: complex
    e_residual: float
    converged: bool
    per_h: Tuple[Tuple[float, complex], ...]


def richardson_levels(values: Sequence, ratio: float) -> List[List]:
    """
    Richardson tableau for sequences with an expansion in h, h^2, h^3, ...

    values[k] is the estimate at step h0*ratio^k. Level m removes the h^m
    term; the last level has a single entry.
    """
    levels = [list(values)]
    for m in range(1, len(values)):
        prev = levels[-1]
        mult = ratio**m
        levels.append([(prev[i + 1] - mult * prev[i]) / (1.0 - mult) for i in range(len(prev) - 1)])
    return levels


def _extrapolate(values: Sequence, ratio: float):
    levels = richardson_levels(values, ratio)
    finest_two = levels[-2]
    return levels[-1][0], np.abs(finest_two[1] - finest_two[0])


def build_ladder(func: Callable, a: float, b: float, config: LadderConfig, halo: int = 1) -> Ladder:
    """Sample func on every rung of the ladder."""
    h_values = tuple(config.h_values)
    samples = tuple(sample(func, make_grid(a, b, h, halo)) for h in h_values)
    return Ladder(h_values, samples)


def limit_ladder(func: Callable, a: float, b: float, config: LadderConfig) -> LimitEstimate:
    """
    Extrapolate Q_h f to h -> 0 at the core nodes of the coarsest rung.

    Raises:
        InsufficientLadder: fewer than 3 rungs
    """
    if config.rungs < 3:
        raise InsufficientLadder(f"need at least 3 ladder rungs, got {config.rungs}")

    ladder = build_ladder(func, a, b, config)
    coarse: Grid = ladder.samples_per_h[0].grid.shrink()
    nodes = coarse.nodes

    rung_values = []
    for s in ladder.samples_per_h:
        d = hscale_derivative(s)
        rung_values.append(np.array([interp_linear(d, t) for t in nodes]) if d.grid != coarse else d.values)

    value, gap = _extrapolate(rung_values, config.ratio)
    converged = gap < config.tol
    logger.debug("Ladder extrapolated", rungs=config.rungs, max_gap=float(np.max(gap)))
    return LimitEstimate(nodes=nodes, value=np.asarray(value), e_residual=gap, converged=converged)


def integral_limit(func: Callable, a: float, T: float, config: LadderConfig) -> IntegralEstimate:
    """
    Extrapolate the integral of Q_h f over [a, T] across the ladder.

    Convergence of this sequence is the observable form of "the E-part of
    Q_h f integrates to zero in the limit".
    """
    if config.rungs < 3:
        raise InsufficientLadder(f"need at least 3 ladder rungs, got {config.rungs}")

    per_h = []
    for h in config.h_values:
        cells = max(1, int(np.ceil((T - a) / h - 1e-9)))
        grid = make_grid(a, a + cells * h, h, 1)
        per_h.append((h, quad_to(hscale_derivative(sample(func, grid)), T)))

    value, gap = _extrapolate([v for _, v in per_h], config.ratio)
    return IntegralEstimate(complex(value), float(gap), bool(gap < config.tol), tuple(per_h))


# =============================================================================
# CONVERGENCE DIAGNOSTICS
# =============================================================================


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float)), 1)[0])


def convergence_order(
    func: Callable, dfunc: Callable, a: float, b: float, h_values: Sequence[float]
) -> Tuple[np.ndarray, float]:
    """Sup-norm defect of Q_h f against the classical derivative and its fitted order."""
    errors = []
    for h in h_values:
        d = hscale_derivative(sample(func, make_grid(a, b, h, 1)))
        exact = np.asarray(dfunc(d.grid.nodes), dtype=complex)
        errors.append(float(np.max(np.abs(d.values - exact))))
    errors = np.array(errors)
    return errors, loglog_slope(h_values, errors)


def blowup_slope(func: Callable, a: float, b: float, h_values: Sequence[float]) -> float:
    """Slope of log max|Q_h f| against log h; about alpha - 1 for a Hoelder-alpha f."""
    peaks = [float(np.max(np.abs(hscale_derivative(sample(func, make_grid(a, b, h, 1))).values))) for h in h_values]
    return loglog_slope(h_values, peaks)


def dyadic_scales(min_exp: Optional[int] = None, max_exp: Optional[int] = None) -> List[float]:
    lo = settings.holder_min_exp if min_exp is None else min_exp
    hi = settings.holder_max_exp if max_exp is None else max_exp
    return [2.0**-k for k in range(lo, hi + 1)]


def estimate_holder_exponent(
    func: Callable,
    interval: Tuple[float, float],
    scales: Optional[Sequence[float]] = None,
    samples_log2: int = 14,
) -> HolderEstimate:
    """
    Fit |f(t+s) - f(t)| <= C s^alpha from the oscillation at dyadic scales.

    The oscillation at scale s is the largest increment over a dyadic sample
    of the interval. alpha is the log-log slope clamped to (0, 1].

    Raises:
        InsufficientLadder: fewer than 4 scales
        DegenerateFit: some oscillation is exactly zero (e.g. constant f)
    """
    scales = dyadic_scales() if scales is None else list(scales)
    if len(scales) < 4:
        raise InsufficientLadder(f"need at least 4 scales, got {len(scales)}")

    lo, hi = interval
    t = lo + (hi - lo) * np.arange(2**samples_log2 + 1) / 2**samples_log2
    oscillation = []
    for s in scales:
        base = t[t + s <= hi + 1e-15]
        with np.errstate(all="ignore"):
            inc = np.abs(np.asarray(func(base + s), dtype=complex) - np.asarray(func(base), dtype=complex))
        oscillation.append(float(np.max(inc)) if inc.size else 0.0)

    oscillation = np.array(oscillation)
    if not np.all(oscillation > 0) or not np.all(np.isfinite(oscillation)):
        raise DegenerateFit("oscillation vanishes at some scale; function looks constant")

    fit = stats.linregress(np.log(scales), np.log(oscillation))
    alpha = min(max(float(fit.slope), np.finfo(float).eps), 1.0)
    return HolderEstimate(alpha_hat=alpha, c_hat=float(np.exp(fit.intercept)), fit_r2=float(fit.rvalue**2))
