import math
from typing import Iterable, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class PotentialSpec(BaseModel):
    """Coefficients of V = sum_{m,q >= 1} alpha_mq |phi|^(2m) N^q and the
    Chern-Simons constant.

    ``alpha[m-1][q-1]`` holds alpha_mq. The optional ``pure_n[q-1]`` column
    adds beta_q N^q and is only accepted with ``allow_pure_n``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: List[List[float]] = Field(default_factory=lambda: [[0.0]])
    kappa: float = Field(1.0, description="Chern-Simons constant, must be > 0")
    pure_n: List[float] = Field(default_factory=list)
    allow_pure_n: bool = False

    @field_validator('kappa')
    @classmethod
    def validate_kappa(cls, v):
        if not v > 0 or not math.isfinite(v):
            raise ValueError("kappa must be a finite positive number (Chern-Simons constant kappa > 0)")
        return v

    @field_validator('alpha')
    @classmethod
    def validate_alpha(cls, v):
        if not v or not v[0]:
            raise ValueError("alpha table needs at least one row and one column (M >= 1, Q >= 1)")
        width = len(v[0])
        for row in v:
            if len(row) != width:
                raise ValueError("alpha table rows must all have Q entries")
            if not all(math.isfinite(a) for a in row):
                raise ValueError("alpha entries must be finite")
        return v

    @model_validator(mode='after')
    def validate_pure_n(self):
        if self.pure_n and not self.allow_pure_n:
            raise ValueError("pure_n coefficients require allow_pure_n = true")
        if not all(math.isfinite(b) for b in self.pure_n):
            raise ValueError("pure_n entries must be finite")
        return self

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[int, int, float]], kappa: float, **kwargs) -> "PotentialSpec":
        terms = list(terms)
        for m, q, _ in terms:
            if m < 1 or q < 1:
                raise ValueError(f"potential term ({m}, {q}) outside the index range m >= 1, q >= 1")
        degree_m = max((m for m, _, _ in terms), default=1)
        degree_q = max((q for _, q, _ in terms), default=1)
        alpha = [[0.0] * degree_q for _ in range(degree_m)]
        for m, q, value in terms:
            alpha[m - 1][q - 1] += float(value)
        return cls(alpha=alpha, kappa=kappa, **kwargs)

    @property
    def M(self) -> int:
        return len(self.alpha)

    @property
    def Q(self) -> int:
        return len(self.alpha[0])

    @property
    def coefficients(self) -> np.ndarray:
        """2-D power-series table c[m, q] in (|phi|^2, N) for numpy's polyval2d."""
        q_size = max(self.Q, len(self.pure_n)) + 1
        c = np.zeros((self.M + 1, q_size))
        c[1:, 1:self.Q + 1] = np.asarray(self.alpha, dtype=np.float64)
        if self.pure_n:
            c[0, 1:len(self.pure_n) + 1] = self.pure_n
        return c

    def terms(self) -> List[Tuple[int, int, float]]:
        return [
            (m + 1, q + 1, value)
            for m, row in enumerate(self.alpha)
            for q, value in enumerate(row)
            if value != 0.0
        ]
