import math
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from simulation.dynamics import DEFAULT_CFL, DtA0Method, InitialDataSpec
from simulation.elliptic import EllipticTolerances
from simulation.grid import Grid
from simulation.potential import PotentialSpec


class IntegratorConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    dt: Optional[float] = Field(None, gt=0, description="fixed step; derived from cfl when unset")
    cfl: float = Field(DEFAULT_CFL, gt=0)
    t_end: float = Field(..., gt=0)
    sample_every: int = Field(1, ge=1, description="steps between diagnostics rows")
    dt_a0_method: DtA0Method = DtA0Method.LAGGED

    def schedule(self, grid: Grid) -> Tuple[int, float]:
        """Number of steps and the step size that lands exactly on t_end."""
        target = self.dt if self.dt is not None else self.cfl * min(grid.dx, grid.dy)
        n_steps = max(1, math.ceil(self.t_end / target - 1e-9))
        return n_steps, self.t_end / n_steps


class PotentialConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kappa: float = Field(..., description="Chern-Simons constant")
    terms: List[Tuple[int, int, float]] = Field(default_factory=list, description="(m, q, alpha_mq)")
    pure_n: List[float] = Field(default_factory=list)
    allow_pure_n: bool = False

    @field_validator('kappa')
    @classmethod
    def validate_kappa(cls, v):
        if not v > 0 or not math.isfinite(v):
            raise ValueError("kappa must be positive (Chern-Simons constant kappa > 0)")
        return v

    @field_validator('terms')
    @classmethod
    def validate_terms(cls, v):
        for m, q, value in v:
            if m < 1 or q < 1:
                raise ValueError(f"term ({m}, {q}) outside the index range m >= 1, q >= 1")
            if not math.isfinite(value):
                raise ValueError(f"term ({m}, {q}) has a non-finite coefficient")
        return v

    def to_spec(self) -> PotentialSpec:
        return PotentialSpec.from_terms(
            self.terms, kappa=self.kappa, pure_n=self.pure_n, allow_pure_n=self.allow_pure_n
        )


class DiagnosticsConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    hs_exponents: List[float] = Field(default_factory=lambda: [1.0, 2.0])

    @field_validator('hs_exponents')
    @classmethod
    def validate_exponents(cls, v):
        if any(s < 0 for s in v):
            raise ValueError("Sobolev exponents must be non-negative")
        return v


class OutputConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    directory: str = "output"
    snapshot_every: int = Field(0, ge=0, description="steps between snapshots, 0 for final only")
    final_snapshot: bool = True


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    grid: Grid
    integrator: IntegratorConfig
    potential: PotentialConfig
    initial_data: InitialDataSpec = InitialDataSpec()
    elliptic: EllipticTolerances = EllipticTolerances()
    diagnostics: DiagnosticsConfig = DiagnosticsConfig()
    output: OutputConfig = OutputConfig()
    seed: int = 0


class RunSummary(BaseModel):
    exit_code: int
    steps: int
    t_final: float
    aborted: bool = False
    abort_reason: Optional[str] = None
    abort_time: Optional[float] = None
    wall_time_seconds: float = 0.0


class ConvergenceLevel(BaseModel):
    label: str
    parameter: float
    error: Optional[float] = None
    observed_order: Optional[float] = None


class ConvergenceReport(BaseModel):
    kind: Literal["temporal", "spatial"]
    levels: List[ConvergenceLevel]
    reference: str


class UniquenessSample(BaseModel):
    t: float
    difference_half: Optional[float]
    difference_full: Optional[float]
    difference_zero: Optional[float]


class UniquenessReport(BaseModel):
    delta: float
    samples: List[UniquenessSample]
    terminal_ratio: Optional[float]
    ratio_in_band: Optional[bool]
    M_T: Optional[float] = Field(None, description="max over samples of the full-delta difference norm")
    zero_delta_identical: bool
    valid_until: Optional[float] = Field(None, description="time after which a run aborted")
    abort_reason: Optional[str] = None


class ConvergenceSummary(BaseModel):
    reports: List[ConvergenceReport]
