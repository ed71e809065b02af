"""
Input validation for command-line flags.

Every validator returns (is_valid, error_message) so the CLI can report all
problems the same way before any computation starts.
"""

import re
from typing import Optional, Tuple

from scale_variations.holder_gen import POLY_PATTERN, QUADRATIC_SHIFT_PATTERN, SMOOTH_NAMES

# =============================================================================
# VALIDATION CONSTANTS
# =============================================================================

MAX_SELECTOR_LENGTH = 100
MIN_LADDER_RUNGS = 3
MAX_LADDER_RUNGS = 20

WEIERSTRASS_PATTERN = re.compile(r"^weierstrass:[^,]+,[^,]+(,\d+)?$")


# =============================================================================
# VALIDATION FUNCTIONS
# =============================================================================


def _floats(text: str, count: int) -> Optional[list]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != count:
        return None
    try:
        return [float(p) for p in parts]
    except ValueError:
        return None


def validate_function_selector(selector: str) -> Tuple[bool, Optional[str]]:
    """
    Validate a --function selector.

    Accepts a catalogue name (sin, cos, exp, poly_k, quadratic_shift(c)) or
    weierstrass:a,b[,K].

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not selector:
        return False, "Function selector is required"

    selector = selector.strip()

    if len(selector) > MAX_SELECTOR_LENGTH:
        return False, f"Function selector too long (max {MAX_SELECTOR_LENGTH} characters)"

    if selector.startswith("weierstrass"):
        if not WEIERSTRASS_PATTERN.match(selector):
            return False, "Invalid Weierstrass selector. Expected: weierstrass:a,b[,K] (e.g., weierstrass:0.5,3)"
        return True, None

    if selector in SMOOTH_NAMES or POLY_PATTERN.match(selector) or QUADRATIC_SHIFT_PATTERN.match(selector):
        return True, None

    return False, f"Unknown function {selector!r}. Expected one of {', '.join(SMOOTH_NAMES)}, poly_k, quadratic_shift(c) or weierstrass:a,b"


def validate_interval(text: str) -> Tuple[bool, Optional[str]]:
    """
    Validate an --interval flag of the form "a,b" with a < b.

    Returns:
        Tuple of (is_valid, error_message)
    """
    values = _floats(text or "", 2)
    if values is None:
        return False, "Invalid interval. Expected: a,b (e.g., 0,1)"
    if not values[0] < values[1]:
        return False, f"Interval must have a < b, got {values[0]}, {values[1]}"
    return True, None


def validate_ladder(text: str) -> Tuple[bool, Optional[str]]:
    """
    Validate a --ladder flag of the form "h0,ratio,rungs".

    Returns:
        Tuple of (is_valid, error_message)
    """
    values = _floats(text or "", 3)
    if values is None:
        return False, "Invalid ladder. Expected: h0,ratio,rungs (e.g., 0.015625,0.5,5)"
    h0, ratio, rungs = values
    if not 0 < h0 < 1:
        return False, f"Ladder h0 must lie in (0, 1), got {h0}"
    if not 0 < ratio < 1:
        return False, f"Ladder ratio must lie in (0, 1), got {ratio}"
    if not rungs.is_integer() or not MIN_LADDER_RUNGS <= rungs <= MAX_LADDER_RUNGS:
        return False, f"Ladder rungs must be an integer in [{MIN_LADDER_RUNGS}, {MAX_LADDER_RUNGS}], got {rungs}"
    return True, None
