"""Spectral operators and norms on the periodic grid.

All operators act on the trailing two axes, so a vector field of shape
(2, ny, nx) is transformed component-wise. Real input yields real output.
"""

import numpy as np
from scipy import fft

from .models import Grid

SUPPORTED_P = (2, 3, 4, 6, np.inf)



def forward(f: np.ndarray) -> np.ndarray:
    return fft.fft2(f, axes=(-2, -1))


def inverse(f_hat: np.ndarray, real: bool) -> np.ndarray:
    out = fft.ifft2(f_hat, axes=(-2, -1))
    return out.real if real else out


def apply_multiplier(f: np.ndarray, symbol: np.ndarray) -> np.ndarray:
    """Multiply by a Fourier symbol; the result is real whenever f is real
    and the symbol is Hermitian."""
    return inverse(symbol * forward(f), real=not np.iscomplexobj(f))


def gradient(f: np.ndarray, grid: Grid) -> np.ndarray:
    t = grid.tables
    f_hat = forward(f)
    out = np.stack([1j * t.DX * f_hat, 1j * t.DY * f_hat])
    return inverse(out, real=not np.iscomplexobj(f))


def perp_gradient(psi: np.ndarray, grid: Grid) -> np.ndarray:
    """(-d2 psi, d1 psi): divergence-free by construction."""
    g = gradient(psi, grid)
    return np.stack([-g[1], g[0]])


def laplacian(f: np.ndarray, grid: Grid) -> np.ndarray:
    return apply_multiplier(f, -grid.tables.k2_derivative)


def divergence(v: np.ndarray, grid: Grid) -> np.ndarray:
    t = grid.tables
    v_hat = forward(v)
    return inverse(1j * t.DX * v_hat[0] + 1j * t.DY * v_hat[1], real=not np.iscomplexobj(v))


def curl(v: np.ndarray, grid: Grid) -> np.ndarray:
    """Scalar curl d1 v2 - d2 v1."""
    t = grid.tables
    v_hat = forward(v)
    return inverse(1j * t.DX * v_hat[1] - 1j * t.DY * v_hat[0], real=not np.iscomplexobj(v))


def dealias(f: np.ndarray, grid: Grid) -> np.ndarray:
    return apply_multiplier(f, grid.tables.dealias_mask)


def mollify(f: np.ndarray, grid: Grid, band_limit: float, order: int) -> np.ndarray:
    """Smooth spectral cut-off at band_limit * kmax with exponent 2*order."""
    if order <= 0:
        return np.array(f, copy=True)
    if not 0 < band_limit <= 1:
        raise ValueError(f"band_limit must lie in (0, 1], got {band_limit}")
    k_cut = band_limit * grid.kmax
    k = np.sqrt(grid.tables.k2)
    symbol = np.exp(-(k / k_cut) ** (2 * order)) * (k <= k_cut)
    return apply_multiplier(f, symbol)


def _spectral_weight(grid: Grid) -> float:
    # Parseval: sum |f|^2 dA = dA / N * sum |f_hat|^2
    return grid.cell_area / grid.size


def _spectral_power(f: np.ndarray) -> np.ndarray:
    power = np.abs(forward(f)) ** 2
    if power.ndim == 3:
        power = power.sum(axis=0)
    return power


def hs_norm(f: np.ndarray, s: float, grid: Grid) -> float:
    if s < 0:
        raise ValueError(f"Sobolev exponent must be non-negative, got {s}")
    weight = (1.0 + grid.tables.k2) ** s
    return float(np.sqrt(_spectral_weight(grid) * np.sum(weight * _spectral_power(f))))


def derivative_norm(f: np.ndarray, order: int, grid: Grid) -> float:
    """L2 norm of the order-th spatial derivative, via the multiplier |k|^order."""
    weight = grid.tables.k2 ** order
    return float(np.sqrt(_spectral_weight(grid) * np.sum(weight * _spectral_power(f))))


def spectral_l2_norm(f: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(_spectral_weight(grid) * np.sum(_spectral_power(f))))


def _magnitude(f: np.ndarray) -> np.ndarray:
    if f.ndim == 3:
        return np.sqrt(np.sum(np.abs(f) ** 2, axis=0))
    return np.abs(f)


def lp_norm(f: np.ndarray, p: float, grid: Grid) -> float:
    if p not in SUPPORTED_P:
        raise ValueError(f"Unsupported Lebesgue exponent p={p}; expected one of {SUPPORTED_P}")
    magnitude = _magnitude(f)
    if p == np.inf:
        return float(np.max(magnitude)) if magnitude.size else 0.0
    return float((np.sum(magnitude ** p) * grid.cell_area) ** (1.0 / p))


def l2_norm(f: np.ndarray, grid: Grid) -> float:
    return lp_norm(f, 2, grid)


def integrate(f: np.ndarray, grid: Grid) -> float:
    return float(np.sum(f) * grid.cell_area)


def resample(f: np.ndarray, source: Grid, target: Grid) -> np.ndarray:
    """Spectral interpolation between two grids covering the same torus.

    Modes at or above the smaller grid's Nyquist index are dropped.
    """
    if (source.lx, source.ly) != (target.lx, target.ly):
        raise ValueError("resample requires grids with identical physical lengths")
    f_hat = forward(f)
    mx = np.fft.fftfreq(target.nx, d=1.0 / target.nx).astype(int)
    my = np.fft.fftfreq(target.ny, d=1.0 / target.ny).astype(int)
    keep_x = np.flatnonzero(np.abs(mx) < min(source.nx, target.nx) // 2)
    keep_y = np.flatnonzero(np.abs(my) < min(source.ny, target.ny) // 2)

    out = np.zeros(f.shape[:-2] + target.shape, dtype=np.complex128)
    src_x = mx[keep_x] % source.nx
    src_y = my[keep_y] % source.ny
    out[..., keep_y[:, None], keep_x[None, :]] = f_hat[..., src_y[:, None], src_x[None, :]]
    out *= target.size / source.size
    return inverse(out, real=not np.iscomplexobj(f))
