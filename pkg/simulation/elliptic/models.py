from pydantic import BaseModel, ConfigDict, Field


class EllipticTolerances(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    tol_rel: float = Field(1e-10, gt=0)
    tol_abs: float = Field(1e-12, gt=0)
    max_iterations: int = Field(500, ge=1)


class EllipticSolveReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    iterations: int = Field(..., ge=0)
    final_residual: float
    converged: bool
    target: float = Field(..., description="tol_abs + tol_rel * ||source||_L2")
