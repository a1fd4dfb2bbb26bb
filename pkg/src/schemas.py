from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Tolerance for "holds to machine precision" and for values re-parsed from
# 12-significant-digit output.
_REL_TOL = 1e-9


def critical_p(n: int, d: int, lam: float) -> float:
    """Retention probability inside the critical window: (1 + lam n^{-1/3}) / (d-1)."""
    return (1.0 + lam * n ** (-1.0 / 3.0)) / (d - 1)


def _blank_to_none(value: Any) -> Any:
    if isinstance(value, str) and value.strip() == "":
        return None
    return value


class Params(BaseModel):
    """Percolation regime: (n, d, p) or (n, d, lambda) with optional tail multiplier A."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    n: int = Field(..., ge=1, description="Vertex count")
    d: int = Field(..., ge=3, description="Degree")
    p: float = Field(..., ge=0.0, le=1.0, description="Retention probability")
    lambda_: float | None = Field(None, alias="lambda", description="Criticality offset")
    A: float | None = Field(None, gt=0.0, description="Tail threshold multiplier")

    @model_validator(mode="before")
    @classmethod
    def derive_p_from_lambda(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        lam = data.get("lambda", data.get("lambda_"))
        if data.get("p") is None and lam is not None and "n" in data and "d" in data:
            data = {**data, "p": critical_p(int(data["n"]), int(data["d"]), float(lam))}
        return data

    @model_validator(mode="after")
    def check_regime(self) -> "Params":
        if (self.n * self.d) % 2:
            raise ValueError(f"d*n must be even (got d={self.d}, n={self.n})")
        if self.lambda_ is not None:
            expected = critical_p(self.n, self.d, self.lambda_)
            if abs(self.p - expected) > _REL_TOL * max(1.0, expected):
                raise ValueError(
                    f"p={self.p} inconsistent with lambda={self.lambda_} (expects {expected})"
                )
        return self

    @property
    def stubs(self) -> int:
        return self.n * self.d

    @property
    def pairs(self) -> int:
        return self.stubs // 2

    @property
    def threshold(self) -> float | None:
        """A n^{2/3}, the size a component must exceed to count as a tail event."""
        if self.A is None:
            return None
        return self.A * self.n ** (2.0 / 3.0)


TAIL_CSV_FIELDS = [
    "d",
    "n",
    "p",
    "lambda",
    "A",
    "mode",
    "simple",
    "trials",
    "successes",
    "p_hat",
    "ci_lo",
    "ci_hi",
    "seed",
    "elapsed_s",
]


class TailEstimate(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    d: int
    n: int
    p: float | None = None
    lambda_: float | None = Field(None, alias="lambda")
    A: float | None = None
    mode: Literal["VERTEX", "MAX", "SIMPLE"]
    simple: bool = Field(False, description="Conditioned on the simple event")
    trials: int = Field(..., ge=1)
    successes: int = Field(..., ge=0)
    p_hat: float = Field(..., ge=0.0, le=1.0)
    ci_lo: float = Field(..., ge=0.0, le=1.0)
    ci_hi: float = Field(..., ge=0.0, le=1.0)
    seed: int
    elapsed_s: float | None = Field(None, ge=0.0)

    @field_validator("p", "lambda_", "A", "elapsed_s", mode="before")
    @classmethod
    def blank_to_none(cls, value: Any) -> Any:
        return _blank_to_none(value)

    @model_validator(mode="after")
    def check_interval(self) -> "TailEstimate":
        if self.successes > self.trials:
            raise ValueError("successes exceed trials")
        if abs(self.p_hat - self.successes / self.trials) > _REL_TOL:
            raise ValueError("p_hat must equal successes/trials")
        if not self.ci_lo - _REL_TOL <= self.p_hat <= self.ci_hi + _REL_TOL:
            raise ValueError("interval must contain p_hat")
        return self


class Violation(BaseModel):
    check: str
    step: int | None = Field(None, description="1-based step of the first failure")
    detail: str = ""


class CheckReport(BaseModel):
    """Outcome of a pathwise identity or coupling check."""

    name: str
    passed: bool = True
    checks: int = 0
    violations: list[Violation] = Field(default_factory=list)

    @classmethod
    def merge(cls, name: str, reports: list["CheckReport"]) -> "CheckReport":
        violations = [v for r in reports for v in r.violations]
        return cls(
            name=name,
            passed=all(r.passed for r in reports),
            checks=sum(r.checks for r in reports),
            violations=violations,
        )


class AuditReport(BaseModel):
    """Empirical frequency of an exceedance event next to its theoretical bound."""

    audit: str
    status: Literal["PASS", "FAIL", "VACUOUS"]
    trials: int = Field(..., ge=1)
    exceedances: int = Field(..., ge=0)
    frequency: float
    standard_error: float
    rhs: float
    horizon: int
    tunables: dict[str, float] = Field(default_factory=dict)
    seed: int
    elapsed_s: float | None = None


class ScalingPoint(BaseModel):
    A: float
    G: float
    regressor: float = Field(..., description="-G, the abscissa of the fit")
    response: float | None = Field(None, description="log p_hat + 1.5 log A")
    p_hat: float
    ci_lo: float
    ci_hi: float
    successes: int
    trials: int
    flagged: bool = False
    reason: str = ""


class RegressionReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    d: int
    n: int
    lambda_: float = Field(..., alias="lambda")
    variant: str
    points: list[ScalingPoint]
    slope: float | None = None
    intercept: float | None = None
    slope_stderr: float | None = None
    residuals: list[float] = Field(default_factory=list)
    upper_half_slope: float | None = None
    decreasing: bool = Field(..., description="p_hat decreases along A up to CI overlap")
    seed: int


class TheoryResult(BaseModel):
    op: str
    args: dict[str, Any]
    value: Any


class ExactDistributionRecord(BaseModel):
    """JSON form of an exact distribution; rationals are written as 'a/b'."""

    support: list[int]
    probabilities: list[str]
    total_mass: str
    exact: bool


class ExhaustiveRecord(BaseModel):
    n: int
    d: int
    p: str
    condition_on_simple: bool
    p_simple: str
    component_of_start: ExactDistributionRecord
    max_component: ExactDistributionRecord


class SandwichReport(BaseModel):
    """Pathwise and estimated ordering of the exploration-time sandwich."""

    k: int
    trials: int
    lower: float = Field(..., description="P(tau > (d-1)(k+1))")
    middle: float = Field(..., description="P(|C(v)| > k)")
    upper: float = Field(..., description="2 P(tau >= (d-1)k - n^{1/2})")
    pathwise_ok: bool
    middle_below_upper: bool
    seed: int


class SecondMomentReport(BaseModel):
    horizon: int
    trials: int
    mean_x: float
    mean_x2: float
    ratio: float = Field(..., description="E[X]^2 / E[X^2]")
    p_hat: float = Field(..., description="P(|C_max| >= horizon)")
    ci_lo: float
    ci_hi: float
    consistent: bool
    seed: int


class BarrierEstimate(BaseModel):
    x: float
    y: float
    mu: float
    t: float
    z_lo: float
    z_hi: float
    paths: int
    steps: int
    estimate: float
    standard_error: float
    closed_form: float
    within_3se: bool
    seed: int
