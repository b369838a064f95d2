from dataclasses import dataclass, field, fields, replace
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from simulation.elliptic import EllipticSolveReport
from simulation.grid import Grid


class InitialDataKind(str, Enum):
    GAUSSIAN_PACKET = "gaussian_packet"
    VORTEX_LIKE = "vortex_like"
    SINGLE_MODE = "single_mode"
    FROM_SNAPSHOT = "from_snapshot"


class DtA0Method(str, Enum):
    LAGGED = "lagged"
    ELLIPTIC = "elliptic"


class NonFiniteStateError(FloatingPointError):
    def __init__(self, field_name: str, t: float):
        super().__init__(f"non-finite values in {field_name} at t={t:.6g}")
        self.field_name = field_name
        self.t = t


_FIELD_NAMES = ("phi", "dt_phi", "N", "dt_N", "A", "dt_A", "A0", "dt_A0")
_COMPLEX_FIELDS = ("phi", "dt_phi")
_VECTOR_FIELDS = ("A", "dt_A")


@dataclass(frozen=True)
class FieldState:
    """Dynamic variables and the constrained A0 at one time level.

    Arrays are copied on construction and made read-only, so a state can be
    handed to diagnostics while the integrator builds the next one.
    """

    grid: Grid
    t: float
    phi: np.ndarray
    dt_phi: np.ndarray
    N: np.ndarray
    dt_N: np.ndarray
    A: np.ndarray
    dt_A: np.ndarray
    A0: np.ndarray
    dt_A0: np.ndarray
    solve_report: Optional[EllipticSolveReport] = field(default=None, compare=False)

    def __post_init__(self):
        for name in _FIELD_NAMES:
            expected = (2,) + self.grid.shape if name in _VECTOR_FIELDS else self.grid.shape
            dtype = np.complex128 if name in _COMPLEX_FIELDS else np.float64
            value = np.array(getattr(self, name), dtype=dtype, copy=True)
            if value.shape != expected:
                raise ValueError(f"{name} has shape {value.shape}, expected {expected}")
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @classmethod
    def zeros(cls, grid: Grid, t: float = 0.0) -> "FieldState":
        return cls(
            grid=grid, t=t,
            phi=grid.zeros(dtype=np.complex128), dt_phi=grid.zeros(dtype=np.complex128),
            N=grid.zeros(), dt_N=grid.zeros(),
            A=grid.zeros(2), dt_A=grid.zeros(2),
            A0=grid.zeros(), dt_A0=grid.zeros(),
        )

    def with_fields(self, **changes) -> "FieldState":
        return replace(self, **changes)

    def arrays(self) -> Dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in _FIELD_NAMES}

    def first_nonfinite(self) -> Optional[str]:
        for name in _FIELD_NAMES:
            if not np.all(np.isfinite(getattr(self, name))):
                return name
        return None

    def bit_equal(self, other: "FieldState") -> bool:
        return self.t == other.t and all(
            np.array_equal(getattr(self, f.name), getattr(other, f.name))
            for f in fields(self) if f.name in _FIELD_NAMES
        )


class InitialDataSpec(BaseModel):
    """Parameters of the six data fields phi_0, phi_1, n_0, n_1, a_0, a_1."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: InitialDataKind = InitialDataKind.GAUSSIAN_PACKET
    phi_amplitude: float = 0.0
    n_amplitude: float = 0.0
    a_amplitude: float = 0.0
    phi_frequency: float = Field(0.0, description="phi_1 = -i * frequency * phi_0")
    n_velocity: float = 0.0
    a_velocity: float = 0.0
    width: float = Field(1.0, gt=0)
    center: Optional[Tuple[float, float]] = None
    momentum: Tuple[float, float] = (0.0, 0.0)
    a_orientation: Optional[float] = Field(None, description="radians; drawn from the seed when unset")
    winding: int = 1
    mode: Tuple[int, int] = (1, 0)
    snapshot: Optional[str] = None
    smoothing_order: int = Field(0, ge=0)
    band_limit: float = Field(1.0, gt=0, le=1)
    perturbation: float = Field(0.0, ge=0, description="delta applied as phi_0 += delta p, n_0 += delta p")

    @field_validator('phi_amplitude', 'n_amplitude', 'a_amplitude', 'phi_frequency',
                     'n_velocity', 'a_velocity', 'perturbation')
    @classmethod
    def validate_finite(cls, v):
        if not np.isfinite(v):
            raise ValueError("amplitudes must be finite")
        return v

    @model_validator(mode='after')
    def validate_kind(self):
        if self.kind == InitialDataKind.FROM_SNAPSHOT and not self.snapshot:
            raise ValueError("from_snapshot requires a snapshot path")
        if self.kind == InitialDataKind.SINGLE_MODE and self.mode == (0, 0):
            raise ValueError("single_mode requires a nonzero mode")
        return self
