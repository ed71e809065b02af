from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from scale_variations.scale_ops import LadderConfig
from scale_variations.variational import (
    FixedTAB,
    FixedTC,
    HigherOrder,
    Regime,
    RegimeA,
    RegimeB,
    RegimeC,
    VariationalProblem,
    regime_d,
)

# =============================================================================
# PROBLEM FILE
# =============================================================================


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RegimeASpec(_Strict):
    """y(a) fixed; T and y(T) free."""
    type: Literal["A"]
    y_a: float = Field(..., description="Initial value y(a)")


class RegimeBSpec(_Strict):
    """Both end values and T free."""
    type: Literal["B"]


class RegimeCSpec(_Strict):
    """Both end values fixed, T free."""
    type: Literal["C"]
    y_a: float = Field(..., description="Initial value y(a)")
    y_T: float = Field(..., description="Terminal value y(T)")


class RegimeDSpec(_Strict):
    """Terminal point constrained to the curve y = psi(t)."""
    type: Literal["D"]
    y_a: float = Field(..., description="Initial value y(a)")
    psi: str = Field(..., min_length=1, description="Terminal curve psi(t), an expression in t")


class FixedTSpec(_Strict):
    """
    T fixed on a grid node.

    - y_T given: both ends fixed (y_a required)
    - y_T absent: free terminal value; y_a optional
    """
    type: Literal["fixedT"]
    T: float = Field(..., description="Terminal point")
    y_a: Optional[float] = Field(None, description="Initial value y(a); absent means free")
    y_T: Optional[float] = Field(None, description="Terminal value y(T); absent means free")

    @model_validator(mode="after")
    def _ends(self):
        if self.y_T is not None and self.y_a is None:
            raise ValueError("fixedT with y_T also needs y_a")
        return self


class HigherSpec(_Strict):
    """Order-n problem with y(a) and the first n-1 scale derivatives at a fixed."""
    type: Literal["higher"]
    y_a: float = Field(..., description="Initial value y(a)")
    derivs_a: List[float] = Field(default_factory=list, description="Q^k y(a) for k = 1..n-1")


RegimeSpec = Annotated[
    Union[RegimeASpec, RegimeBSpec, RegimeCSpec, RegimeDSpec, FixedTSpec, HigherSpec],
    Field(discriminator="type"),
]


class LadderSpec(_Strict):
    h0: float = Field(..., gt=0, lt=1, description="Coarsest step")
    ratio: float = Field(0.5, gt=0, lt=1, description="Step ratio between rungs")
    rungs: int = Field(5, ge=3, description="Number of steps")


class GridSpec(_Strict):
    """Either a single step h or a ladder of steps."""
    h: Optional[float] = Field(None, gt=0, lt=1, description="Scale step h")
    ladder: Optional[LadderSpec] = Field(None, description="Ladder of steps; the finest one is solved last")

    @model_validator(mode="after")
    def _one_of(self):
        if (self.h is None) == (self.ladder is None):
            raise ValueError("grid needs exactly one of 'h' or 'ladder'")
        return self

    def steps(self) -> List[float]:
        if self.h is not None:
            return [self.h]
        return LadderConfig(h0=self.ladder.h0, ratio=self.ladder.ratio, rungs=self.ladder.rungs).h_values


class TolerancesSpec(_Strict):
    residual: float = Field(1e-6, gt=0, description="Residual tolerance before the O(h) allowance")
    newton_step: float = Field(1e-10, gt=0, description="Newton step tolerance (relative)")


class ProblemFile(_Strict):
    """A scale variational problem as read from disk."""
    lagrangian: str = Field(..., min_length=1, description="L(t, y, v1..vn) as an expression")
    order: int = Field(1, ge=1, description="Highest scale derivative n")
    interval: Tuple[float, float] = Field(..., description="[a, b]")
    regime: RegimeSpec
    grid: GridSpec
    t_scan: Optional[Tuple[float, float]] = Field(None, description="Search window for free T; defaults to [a, b]")
    tolerances: TolerancesSpec = Field(default_factory=TolerancesSpec)

    def build_regime(self) -> Regime:
        r = self.regime
        if isinstance(r, RegimeASpec):
            return RegimeA(r.y_a)
        if isinstance(r, RegimeBSpec):
            return RegimeB()
        if isinstance(r, RegimeCSpec):
            return RegimeC(r.y_a, r.y_T)
        if isinstance(r, RegimeDSpec):
            return regime_d(r.y_a, r.psi)
        if isinstance(r, FixedTSpec):
            if r.y_T is not None:
                return FixedTC(r.T, r.y_a, r.y_T)
            return FixedTAB(r.T, r.y_a)
        return HigherOrder(r.y_a, tuple(complex(d) for d in r.derivs_a))

    def to_problem(self, h: Optional[float] = None, tol: Optional[float] = None) -> VariationalProblem:
        """Build the problem at step h (default: the finest step of the grid)."""
        return VariationalProblem.from_text(
            self.lagrangian,
            self.order,
            self.interval,
            self.build_regime(),
            h if h is not None else self.grid.steps()[-1],
            self.t_scan,
            residual_tol=tol if tol is not None else self.tolerances.residual,
            newton_step_tol=self.tolerances.newton_step,
        )


# =============================================================================
# REPORTS
# =============================================================================


class ComplexValue(BaseModel):
    re: float
    im: float
    abs: float

    @classmethod
    def of(cls, z: complex) -> "ComplexValue":
        z = complex(z)
        return cls(re=z.real, im=z.imag, abs=abs(z))


class ConditionOut(BaseModel):
    label: str
    value: ComplexValue


class ResidualOut(BaseModel):
    """Residual report of one candidate."""
    T: float
    el_norm: float
    natural_conditions: List[ConditionOut]
    functional_value: ComplexValue
    verdict: bool
    tolerance: float

    @classmethod
    def of(cls, T: float, report) -> "ResidualOut":
        return cls(
            T=T,
            el_norm=report.el_norm,
            natural_conditions=[ConditionOut(label=c.label, value=ComplexValue.of(c.value)) for c in report.natural_conditions],
            functional_value=ComplexValue.of(report.functional_value),
            verdict=report.verdict,
            tolerance=report.tolerance,
        )


class RootOut(ResidualOut):
    iterations: int
    trajectory: Optional[str] = Field(None, description="CSV file name, relative to the report")
    warnings: List[str] = Field(default_factory=list)


class LadderRungOut(BaseModel):
    h: float
    roots: List[float]


class SolveReport(BaseModel):
    """Contents of report.json for the solve command."""
    command: Literal["solve"] = "solve"
    status: Literal["ok", "unverified", "no_root", "indeterminate"]
    exit_code: int
    problem: dict
    roots: List[RootOut] = Field(default_factory=list)
    message: Optional[str] = None
    ladder: Optional[List[LadderRungOut]] = None
    T_extrapolated: Optional[List[float]] = None


class GateauxOut(BaseModel):
    numeric: ComplexValue
    analytic: ComplexValue
    delta: float

    @classmethod
    def of(cls, estimate, delta: float) -> "GateauxOut":
        return cls(numeric=ComplexValue.of(estimate.numeric), analytic=ComplexValue.of(estimate.analytic), delta=delta)


class VerifyReport(BaseModel):
    """Contents of report.json for the verify command."""
    command: Literal["verify"] = "verify"
    exit_code: int
    problem: dict
    residuals: ResidualOut
    gateaux: List[GateauxOut] = Field(default_factory=list)


class RungResidual(BaseModel):
    h: float
    residual: float


class IdentityOut(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    name: str
    residual_per_h: List[RungResidual]
    fitted_order: Optional[float]
    passed: bool = Field(..., alias="pass")
    note: Optional[str] = None

    @classmethod
    def of(cls, report) -> "IdentityOut":
        return cls(
            name=report.name,
            residual_per_h=[RungResidual(h=h, residual=r) for h, r in report.residual_per_h],
            fitted_order=report.fitted_order,
            passed=report.passed,
            note=report.note,
        )


class IdentitiesReport(BaseModel):
    """Contents of identities.json."""
    command: Literal["identities"] = "identities"
    exit_code: int
    function: str
    interval: Tuple[float, float]
    identities: List[IdentityOut]
    warnings: List[str] = Field(default_factory=list)
