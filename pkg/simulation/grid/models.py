from functools import lru_cache
from typing import NamedTuple, Tuple

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, field_validator

# Row-major arrays of shape (ny, nx); x runs along the last axis.
ScalarField = npt.NDArray[np.float64]
ComplexField = npt.NDArray[np.complex128]
# Shape (2, ny, nx): components i = 1, 2.
VectorField = npt.NDArray[np.float64]


class SpectralTables(NamedTuple):
    kx: np.ndarray          # raw per-axis wavenumbers, length nx
    ky: np.ndarray          # raw per-axis wavenumbers, length ny
    KX: np.ndarray          # raw mesh, (ny, nx)
    KY: np.ndarray
    k2: np.ndarray          # |k|^2 including Nyquist modes
    DX: np.ndarray          # derivative symbols with Nyquist zeroed
    DY: np.ndarray
    k2_derivative: np.ndarray
    dealias_mask: np.ndarray


@lru_cache(maxsize=32)
def _spectral_tables(nx: int, ny: int, lx: float, ly: float) -> SpectralTables:
    kx = 2.0 * np.pi * np.fft.fftfreq(nx, d=lx / nx)
    ky = 2.0 * np.pi * np.fft.fftfreq(ny, d=ly / ny)
    KX, KY = np.meshgrid(kx, ky)

    # Odd derivatives of the Nyquist mode are not representable on a real grid
    dx_symbol = kx.copy()
    dx_symbol[nx // 2] = 0.0
    dy_symbol = ky.copy()
    dy_symbol[ny // 2] = 0.0
    DX, DY = np.meshgrid(dx_symbol, dy_symbol)

    kmax_x = np.max(np.abs(kx))
    kmax_y = np.max(np.abs(ky))
    mask = (np.abs(KX) < (2.0 / 3.0) * kmax_x) & (np.abs(KY) < (2.0 / 3.0) * kmax_y)

    tables = SpectralTables(
        kx=kx, ky=ky, KX=KX, KY=KY, k2=KX**2 + KY**2,
        DX=DX, DY=DY, k2_derivative=DX**2 + DY**2,
        dealias_mask=mask.astype(np.float64),
    )
    for array in tables:
        array.setflags(write=False)
    return tables


class Grid(BaseModel):
    """Periodic rectangular lattice on [0, lx) x [0, ly)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    nx: int = Field(..., ge=8, description="grid points along x")
    ny: int = Field(..., ge=8, description="grid points along y")
    lx: float = Field(..., gt=0, description="physical length along x")
    ly: float = Field(..., gt=0, description="physical length along y")

    @field_validator('nx', 'ny')
    @classmethod
    def validate_even(cls, v):
        if v % 2 != 0:
            raise ValueError("grid resolution must be even")
        return v

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def area(self) -> float:
        return self.lx * self.ly

    @property
    def tables(self) -> SpectralTables:
        return _spectral_tables(self.nx, self.ny, self.lx, self.ly)

    @property
    def wavenumbers(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.tables.kx, self.tables.ky

    @property
    def kmax(self) -> float:
        return min(np.pi / self.dx, np.pi / self.dy)

    def coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        x = np.arange(self.nx) * self.dx
        y = np.arange(self.ny) * self.dy
        return np.meshgrid(x, y)

    def zeros(self, components: int = 0, dtype=np.float64) -> np.ndarray:
        if components:
            return np.zeros((components,) + self.shape, dtype=dtype)
        return np.zeros(self.shape, dtype=dtype)

    def describe(self) -> dict:
        return {"nx": self.nx, "ny": self.ny, "lx": self.lx, "ly": self.ly}
