"""
Deterministic test functions: Weierstrass series with a known Hoelder
exponent, and a catalogue of smooth closed forms paired with their classical
derivatives.
"""

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from scale_variations.config import settings
from scale_variations.exceptions import BadParams, UnknownName

QUADRATIC_SHIFT_PATTERN = re.compile(r"^quadratic_shift\(\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?\d+)?)\s*\)$")
SMOOTH_NAMES = ("sin", "cos", "exp")
POLY_PATTERN = re.compile(r"^poly_(\d+)$")


# =============================================================================
# WEIERSTRASS FUNCTIONS
# =============================================================================


@dataclass(frozen=True)
class WeierstrassParams:
    """W(t) = sum_{k=0}^{terms} amp^k cos(freq^k pi t)."""

    amp: float
    freq: float
    terms: int = field(default_factory=lambda: settings.weierstrass_terms)

    def __post_init__(self):
        if not (0.0 < self.amp < 1.0):
            raise BadParams(f"amp must lie in (0, 1), got {self.amp}")
        if self.freq <= 1.0:
            raise BadParams(f"freq must exceed 1, got {self.freq}")
        if self.amp * self.freq < 1.0:
            raise BadParams(f"amp*freq = {self.amp * self.freq} < 1 gives a differentiable series")
        if self.terms < 1:
            raise BadParams(f"terms must be >= 1, got {self.terms}")

    @property
    def exponent(self) -> float:
        """Hoelder exponent -ln(amp) / ln(freq)."""
        return -math.log(self.amp) / math.log(self.freq)

    @property
    def truncation_bound(self) -> float:
        return self.amp ** (self.terms + 1) / (1.0 - self.amp)


def weierstrass(p: WeierstrassParams) -> Callable:
    """Vectorised t -> W(t), real valued."""
    k = np.arange(p.terms + 1)
    weights = p.amp**k
    frequencies = (float(p.freq) ** k) * math.pi

    def w(t):
        t_arr = np.asarray(t, dtype=float)
        out = np.cos(np.multiply.outer(t_arr, frequencies)) @ weights
        return out if t_arr.ndim else float(out)

    w.__name__ = f"weierstrass_{p.amp:g}_{p.freq:g}"
    return w


def parse_weierstrass_selector(selector: str) -> WeierstrassParams:
    """Read 'weierstrass:amp,freq[,terms]' into parameters."""
    try:
        _, args = selector.split(":", 1)
        parts = [s.strip() for s in args.split(",")]
        amp, freq = float(parts[0]), float(parts[1])
        if len(parts) > 2:
            return WeierstrassParams(amp, freq, int(parts[2]))
        return WeierstrassParams(amp, freq)
    except (ValueError, IndexError) as e:
        if isinstance(e, BadParams):
            raise
        raise BadParams(f"expected 'weierstrass:amp,freq[,terms]', got {selector!r}") from e


# =============================================================================
# SMOOTH CATALOGUE
# =============================================================================


@dataclass(frozen=True)
class SmoothFunction:
    name: str
    f: Callable
    df: Callable


def smooth_catalogue(name: str) -> SmoothFunction:
    """
    Closed-form smooth function with its exact derivative.

    Names: poly_k, sin, cos, exp, quadratic_shift(c).

    Raises:
        UnknownName: name not in the catalogue
    """
    key = name.strip()
    if key == "sin":
        return SmoothFunction(key, np.sin, np.cos)
    if key == "cos":
        return SmoothFunction(key, np.cos, lambda t: -np.sin(t))
    if key == "exp":
        return SmoothFunction(key, np.exp, np.exp)

    match = POLY_PATTERN.match(key)
    if match:
        k = int(match.group(1))
        if k == 0:
            return SmoothFunction(key, lambda t: np.ones_like(np.asarray(t, dtype=float)), lambda t: np.zeros_like(np.asarray(t, dtype=float)))
        return SmoothFunction(key, lambda t: np.asarray(t, dtype=float) ** k, lambda t: k * np.asarray(t, dtype=float) ** (k - 1))

    match = QUADRATIC_SHIFT_PATTERN.match(key)
    if match:
        c = float(match.group(1))
        return SmoothFunction(key, lambda t: 0.5 * (np.asarray(t, dtype=float) - c) ** 2, lambda t: np.asarray(t, dtype=float) - c)

    raise UnknownName(f"unknown catalogue function {name!r}; expected poly_k, sin, cos, exp or quadratic_shift(c)")
