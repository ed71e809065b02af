"""
Uniform grids with halo layers and complex samples living on them.

The grid step is the scale parameter h itself, so forward and backward
differences are exact index shifts. Only endpoint evaluation and the partial
last quadrature cell interpolate, which lets a terminal point T sit between
nodes without re-gridding.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import trapezoid

from scale_variations.exceptions import BadStep, NonCommensurate, NonFinite, OutOfRange

# Relative tolerance for "(b - a) / h is an integer"
COMMENSURATE_RTOL = 1e-9

# Fraction of a cell treated as "on the node" when locating points
NODE_SNAP = 1e-9


# =============================================================================
# DOMAIN TYPES
# =============================================================================


@dataclass(frozen=True)
class Grid:
    """Nodes t_j = a - halo*h + j*h for j = 0..size-1, core interval [a, b]."""

    a: float
    b: float
    h: float
    halo: int
    cells: int

    @property
    def size(self) -> int:
        return self.cells + 2 * self.halo + 1

    @property
    def start(self) -> float:
        """First node, a - halo*h."""
        return self.a - self.halo * self.h

    @property
    def end(self) -> float:
        """Last node, b + halo*h."""
        return self.a + (self.cells + self.halo) * self.h

    @property
    def nodes(self) -> np.ndarray:
        return self.a + (np.arange(self.size) - self.halo) * self.h

    def node(self, j: int) -> float:
        """Position of core-relative index j (j = 0 is a, j = cells is b)."""
        return self.a + j * self.h

    def shrink(self, layers: int = 1) -> "Grid":
        """Same core, `layers` fewer halo layers per side."""
        return Grid(self.a, self.b, self.h, self.halo - layers, self.cells)

    def same_nodes(self, other: "Grid", tol: float = 1e-9) -> bool:
        return (
            self.size == other.size
            and abs(self.h - other.h) <= tol
            and abs(self.start - other.start) <= tol
        )


@dataclass(frozen=True)
class SampledFn:
    """Complex values, one per grid node. Arrays are stored read-only."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise NonFinite(f"non-finite value at node t={self.grid.nodes[bad]:.17g}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def core_values(self) -> np.ndarray:
        """Values on [a, b] only."""
        g = self.grid
        return self.values[g.halo : g.halo + g.cells + 1]

    def with_values(self, values: np.ndarray) -> "SampledFn":
        return SampledFn(self.grid, values)


@dataclass(frozen=True)
class HolderEstimate:
    """Fitted Hoelder exponent, constant and fit quality."""

    alpha_hat: float
    c_hat: float
    fit_r2: float


# =============================================================================
# CONSTRUCTION
# =============================================================================


def make_grid(a: float, b: float, h: float, halo: int) -> Grid:
    """
    Build a uniform grid on [a - halo*h, b + halo*h].

    Raises:
        BadStep: h outside (0, 1), b <= a, or negative halo
        NonCommensurate: (b - a) / h not integral within 1e-9 relative
    """
    if not (0.0 < h < 1.0):
        raise BadStep(f"step h={h} must lie in the open interval (0, 1)")
    if not b > a:
        raise BadStep(f"interval [{a}, {b}] must have b > a")
    if halo < 0:
        raise BadStep(f"halo must be nonnegative, got {halo}")

    ratio = (b - a) / h
    cells = round(ratio)
    if cells < 1 or abs(ratio - cells) > COMMENSURATE_RTOL * max(1.0, ratio):
        raise NonCommensurate(f"(b - a) / h = {ratio!r} is not an integer")

    return Grid(float(a), float(b), float(h), int(halo), int(cells))


def sample(f: Callable, grid: Grid) -> SampledFn:
    """
    Evaluate f at every node of the grid.

    f may be vectorised (called once on the node array) or scalar-only.
    """
    nodes = grid.nodes
    try:
        with np.errstate(all="ignore"):
            values = np.asarray(f(nodes), dtype=complex)
        if values.ndim == 0:
            values = np.full(grid.size, complex(values))
        elif values.shape != nodes.shape:
            raise TypeError("shape mismatch")
    except ZeroDivisionError as e:
        raise NonFinite(f"function is singular on the grid: {e}") from e
    except TypeError:
        values = np.empty(grid.size, dtype=complex)
        for j, t in enumerate(nodes):
            try:
                values[j] = complex(f(float(t)))
            except (ZeroDivisionError, OverflowError, ValueError) as e:
                raise NonFinite(f"function is singular at t={t:.17g}: {e}") from e
    return SampledFn(grid, values)


# =============================================================================
# INTERPOLATION AND QUADRATURE
# =============================================================================


def interp_values(values: np.ndarray, start: float, h: float, t: float) -> complex:
    """Linear interpolation on raw node values starting at `start` with spacing h."""
    pos = (t - start) / h
    last = len(values) - 1
    if pos < -NODE_SNAP or pos > last + NODE_SNAP:
        raise OutOfRange(f"t={t:.17g} outside [{start:.17g}, {start + last * h:.17g}]")
    j = min(max(int(math.floor(pos)), 0), last)
    w = pos - j
    if w < NODE_SNAP:
        return complex(values[j])
    if w > 1.0 - NODE_SNAP or j == last:
        return complex(values[min(j + 1, last)])
    return complex((1.0 - w) * values[j] + w * values[j + 1])


def interp_linear(f: SampledFn, t: float) -> complex:
    """Linear interpolation between the bracketing nodes; exact at nodes."""
    return interp_values(f.values, f.grid.start, f.grid.h, t)


def quad_to(f: SampledFn, T: float) -> complex:
    """
    Trapezoid rule for the integral of f from a to T.

    Full cells use the plain trapezoid rule; the partial cell [t_k, T] uses
    the linear interpolant of f, so the result is exact for piecewise-linear
    integrands and continuous in T.
    """
    g = f.grid
    span = g.cells * g.h
    if T < g.a - NODE_SNAP * g.h or T > g.a + span + NODE_SNAP * g.h:
        raise OutOfRange(f"T={T:.17g} outside core interval [{g.a:.17g}, {g.b:.17g}]")

    pos = (T - g.a) / g.h
    k = min(int(math.floor(pos + NODE_SNAP)), g.cells)
    core = f.values[g.halo : g.halo + k + 1]
    total = complex(trapezoid(core, dx=g.h)) if k >= 1 else 0j

    rest = T - g.node(k)
    if rest > NODE_SNAP * g.h and k < g.cells:
        f_T = interp_linear(f, T)
        total += 0.5 * rest * (core[-1] + f_T)
    return total
