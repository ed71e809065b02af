"""Scale variational problems: residuals, first variation and the discrete extremal solver."""

from scale_variations.variational.gateaux import (
    GateauxEstimate,
    admissible_variation,
    check_admissible,
    gateaux_derivative,
    increment_residual,
)
from scale_variations.variational.hypotheses import hypothesis_checks
from scale_variations.variational.problem import (
    Candidate,
    Condition,
    FixedTAB,
    FixedTC,
    HigherOrder,
    Regime,
    RegimeA,
    RegimeB,
    RegimeC,
    RegimeD,
    ResidualReport,
    VariationalProblem,
    regime_d,
)
from scale_variations.variational.residuals import (
    el_norm,
    el_residual,
    functional_value,
    natural_residuals,
    residual_report,
)
from scale_variations.variational.solver import (
    Extremal,
    SolveResult,
    newton,
    solve_fixed_T,
    solve_free_T,
    transversality_at,
)
from scale_variations.variational.symbolic import SymbolicConditions, el_symbolic

__all__ = [
    "Candidate",
    "Condition",
    "Extremal",
    "FixedTAB",
    "FixedTC",
    "GateauxEstimate",
    "HigherOrder",
    "Regime",
    "RegimeA",
    "RegimeB",
    "RegimeC",
    "RegimeD",
    "ResidualReport",
    "SolveResult",
    "SymbolicConditions",
    "VariationalProblem",
    "admissible_variation",
    "check_admissible",
    "el_norm",
    "el_residual",
    "el_symbolic",
    "functional_value",
    "gateaux_derivative",
    "hypothesis_checks",
    "increment_residual",
    "natural_residuals",
    "newton",
    "regime_d",
    "residual_report",
    "solve_fixed_T",
    "solve_free_T",
    "transversality_at",
]
