"""
Error types raised across the package.

Each operation raises a named subclass so callers (and the CLI exit-code
mapping) can react to the failure kind without parsing messages.
"""

from typing import Optional


class ScaleCalculusError(Exception):
    """Base class for every error raised by scale_variations."""


# =============================================================================
# GRID AND OPERATORS
# =============================================================================


class NonCommensurate(ScaleCalculusError, ValueError):
    """(b - a) / h is not an integer within tolerance."""


class BadStep(ScaleCalculusError, ValueError):
    """Step h outside the open interval (0, 1), or a malformed interval."""


class NonFinite(ScaleCalculusError, ValueError):
    """A sampled value is NaN or infinite."""


class OutOfRange(ScaleCalculusError, ValueError):
    """Evaluation point outside the valid span of a grid."""


class HaloExhausted(ScaleCalculusError, ValueError):
    """Not enough halo layers left for the requested operator."""


class InsufficientLadder(ScaleCalculusError, ValueError):
    """Fewer rungs than extrapolation needs."""


class DegenerateFit(ScaleCalculusError, ValueError):
    """Oscillation vanishes at some scale, so no exponent can be fitted."""


# =============================================================================
# GENERATORS
# =============================================================================


class BadParams(ScaleCalculusError, ValueError):
    """Generator parameters violate their invariants."""


class UnknownName(ScaleCalculusError, KeyError):
    """Catalogue entry does not exist."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


# =============================================================================
# EXPRESSIONS
# =============================================================================


class ExpressionSyntaxError(ScaleCalculusError, ValueError):
    """Malformed expression text; `position` is the 0-based character offset."""

    def __init__(self, message: str, position: int, source: Optional[str] = None):
        self.position = position
        self.source = source
        super().__init__(f"{message} at position {position}")

    def caret(self) -> str:
        """Two-line diagnostic pointing at the offending character."""
        if self.source is None:
            return str(self)
        return f"{self.source}\n{' ' * self.position}^"


class UnknownVariable(ScaleCalculusError, ValueError):
    """Identifier is neither a declared variable nor a known function."""


class OrderMismatch(ScaleCalculusError, ValueError):
    """Variable v_k used with k above the declared order."""


class DomainError(ScaleCalculusError, ArithmeticError):
    """Division by zero or logarithm of zero during evaluation."""


# =============================================================================
# VARIATIONAL PROBLEMS
# =============================================================================


class ProblemError(ScaleCalculusError, ValueError):
    """Inconsistent problem definition (regime, order, interval, grid)."""


class InadmissibleVariation(ScaleCalculusError, ValueError):
    """Variation violates the regime's endpoint constraints."""


class NoConvergence(ScaleCalculusError, RuntimeError):
    """Newton iteration cap reached."""


class SingularJacobian(ScaleCalculusError, RuntimeError):
    """Newton linear system could not be factorised."""


class NoRoot(ScaleCalculusError, RuntimeError):
    """No transversality bracket found in the scan window."""


class IndeterminateT(ScaleCalculusError, RuntimeError):
    """Transversality residual is flat over most of the scan window."""


# =============================================================================
# COMMAND LINE
# =============================================================================


class GridMismatch(ScaleCalculusError, ValueError):
    """Candidate CSV nodes do not match the problem grid."""
