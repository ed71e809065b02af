"""
Finite-h residuals of the scale Leibniz, Barrow, integration-by-parts and
Taylor rules, tracked down a ladder of steps.

Each rule holds only in the h -> 0 limit, so a report records the residual
per step and whether it decays.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from scale_variations.config import settings
from scale_variations.grid_core import make_grid, quad_to, sample
from scale_variations.logging_config import get_logger
from scale_variations.scale_ops import LadderConfig, hscale_derivative, hscale_values, loglog_slope

logger = get_logger(__name__)

ScalarMap = Callable[[np.ndarray], np.ndarray]

# Residuals at or below this are treated as exact zeros
EXACT_ZERO = 1e-14

TAYLOR_MIN_ORDER = 1.8
TAYLOR_STEP_DIVISOR = 8


def default_ladder() -> LadderConfig:
    return LadderConfig(h0=2.0**-6, ratio=settings.ladder_ratio, rungs=settings.ladder_rungs)


def holder_ladder(freq: float, rungs: Optional[int] = None) -> LadderConfig:
    """Steps freq^-3, freq^-4, ... so every rung sees the same phase of a Weierstrass series."""
    return LadderConfig(h0=freq**-3, ratio=1.0 / freq, rungs=rungs or settings.ladder_rungs)


@dataclass(frozen=True)
class IdentityReport:
    """Residual per step, the fitted log-log order and the pass flag."""

    name: str
    residual_per_h: Tuple[Tuple[float, float], ...]
    fitted_order: Optional[float]
    passed: bool
    note: Optional[str] = None

    def __post_init__(self):
        if not self.residual_per_h:
            raise ValueError("residual_per_h must not be empty")

    @property
    def residuals(self) -> np.ndarray:
        return np.array([r for _, r in self.residual_per_h])


def _decay_report(
    name: str, per_h: Sequence[Tuple[float, float]], tol: Optional[float], holder: bool = False
) -> IdentityReport:
    """Smooth inputs must decay below tol; Hölder inputs only need a strictly decreasing residual."""
    tol = tol if tol is not None else settings.identity_tol
    hs = np.array([h for h, _ in per_h])
    rs = np.array([r for _, r in per_h])
    if np.all(rs <= EXACT_ZERO):
        return IdentityReport(name, tuple(per_h), None, True)
    order = None if np.any(rs <= 0) else loglog_slope(hs, rs)
    decreasing = bool(np.all(np.diff(rs) < 0))
    passed = decreasing if holder else decreasing and rs[-1] <= tol
    logger.debug("Identity checked", identity=name, final=float(rs[-1]), order=order, passed=passed)
    return IdentityReport(name, tuple(per_h), order, passed)


def _core_derivative(f: ScalarMap, a: float, b: float, h: float):
    grid = make_grid(a, b, h, 1)
    fs = sample(f, grid)
    return fs, hscale_derivative(fs)


# =============================================================================
# IDENTITIES
# =============================================================================


def leibniz_residual(
    f: ScalarMap,
    g: ScalarMap,
    interval: Tuple[float, float],
    ladder: Optional[LadderConfig] = None,
    tol: Optional[float] = None,
    holder: bool = False,
) -> IdentityReport:
    """max over core nodes of |Q(fg) - (Qf g + f Qg)| per step; symmetric in f and g."""
    ladder = ladder or default_ladder()
    a, b = interval
    per_h = []
    for h in ladder.h_values:
        grid = make_grid(a, b, h, 1)
        fv = sample(f, grid).values
        gv = sample(g, grid).values
        d_prod = hscale_values(fv * gv, h)
        df, dg = hscale_values(fv, h), hscale_values(gv, h)
        inner_f, inner_g = fv[1:-1], gv[1:-1]
        rule = df * inner_g + dg * inner_f
        per_h.append((h, float(np.max(np.abs(d_prod - rule)))))
    return _decay_report("leibniz", per_h, tol, holder)


def barrow_residual(
    f: ScalarMap,
    interval: Tuple[float, float],
    ladder: Optional[LadderConfig] = None,
    tol: Optional[float] = None,
    holder: bool = False,
) -> IdentityReport:
    """|h * sum_{a <= t < b} Qf(t) - (f(b) - f(a))| per step (left Riemann sum)."""
    ladder = ladder or default_ladder()
    a, b = interval
    per_h = []
    for h in ladder.h_values:
        fs, df = _core_derivative(f, a, b, h)
        core = df.core_values
        riemann = h * np.sum(core[:-1])
        exact = fs.core_values[-1] - fs.core_values[0]
        per_h.append((h, float(abs(riemann - exact))))
    return _decay_report("barrow", per_h, tol, holder)


def parts_residual(
    f: ScalarMap,
    g: ScalarMap,
    interval: Tuple[float, float],
    ladder: Optional[LadderConfig] = None,
    tol: Optional[float] = None,
    holder: bool = False,
) -> IdentityReport:
    """|int Qf g + int f Qg - [fg]_a^b| per step, trapezoid quadrature."""
    ladder = ladder or default_ladder()
    a, b = interval
    per_h = []
    for h in ladder.h_values:
        fs, df = _core_derivative(f, a, b, h)
        gs, dg = _core_derivative(g, a, b, h)
        f_core = fs.values[1:-1]
        g_core = gs.values[1:-1]
        lhs = quad_to(df.with_values(df.values * g_core), b) + quad_to(dg.with_values(f_core * dg.values), b)
        boundary = f_core[-1] * g_core[-1] - f_core[0] * g_core[0]
        per_h.append((h, float(abs(lhs - boundary))))
    return _decay_report("parts", per_h, tol, holder)


def taylor_order_fit(f: ScalarMap, a: float, offsets: Sequence[float]) -> IdentityReport:
    """
    Remainder |f(a+o) - f(a) - Q_h f(a) o| with h = o/8 for each offset o.

    Passes when the fitted order is at least 1.8; an identically zero
    remainder (affine f) skips the fit and passes.
    """
    offsets = [float(o) for o in offsets]
    if not offsets or any(o <= 0 for o in offsets):
        raise ValueError("offsets must be positive")
    per_h = []
    for o in offsets:
        h = o / TAYLOR_STEP_DIVISOR
        pts = np.array([a - h, a, a + h, a + o])
        vals = np.broadcast_to(np.asarray(f(pts), dtype=complex), pts.shape)
        d = hscale_values(vals[:3], h)[0]
        per_h.append((o, float(abs(vals[3] - vals[1] - d * o))))

    rs = np.array([r for _, r in per_h])
    if np.all(rs <= EXACT_ZERO):
        return IdentityReport("taylor", tuple(per_h), None, True, note="remainder vanishes identically")
    if np.any(rs <= 0):
        return IdentityReport("taylor", tuple(per_h), None, False, note="remainder vanishes at some offsets")
    order = loglog_slope([o for o, _ in per_h], rs)
    return IdentityReport("taylor", tuple(per_h), order, bool(order >= TAYLOR_MIN_ORDER))


def default_offsets(ladder: Optional[LadderConfig] = None) -> list:
    """Taylor offsets matching a ladder: offset = 8h for every rung."""
    ladder = ladder or default_ladder()
    return [TAYLOR_STEP_DIVISOR * h for h in ladder.h_values]
