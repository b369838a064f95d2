"""Fourth-order centred finite differences on the periodic grid.

An independent discretization kept as an oracle for the spectral operators.
"""
import numpy as np

from .models import Grid

# axis -1 is x (spacing dx), axis -2 is y (spacing dy)


def fd_derivative(f: np.ndarray, axis: int, h: float) -> np.ndarray:
    return (
        -np.roll(f, -2, axis=axis) + 8.0 * np.roll(f, -1, axis=axis)
        - 8.0 * np.roll(f, 1, axis=axis) + np.roll(f, 2, axis=axis)
    ) / (12.0 * h)


def fd_second_derivative(f: np.ndarray, axis: int, h: float) -> np.ndarray:
    return (
        -np.roll(f, -2, axis=axis) + 16.0 * np.roll(f, -1, axis=axis) - 30.0 * f
        + 16.0 * np.roll(f, 1, axis=axis) - np.roll(f, 2, axis=axis)
    ) / (12.0 * h * h)


def fd_gradient(f: np.ndarray, grid: Grid) -> np.ndarray:
    return np.stack([fd_derivative(f, -1, grid.dx), fd_derivative(f, -2, grid.dy)])


def fd_divergence(v: np.ndarray, grid: Grid) -> np.ndarray:
    return fd_derivative(v[0], -1, grid.dx) + fd_derivative(v[1], -2, grid.dy)


def fd_curl(v: np.ndarray, grid: Grid) -> np.ndarray:
    return fd_derivative(v[1], -1, grid.dx) - fd_derivative(v[0], -2, grid.dy)


def fd_laplacian(f: np.ndarray, grid: Grid) -> np.ndarray:
    return fd_second_derivative(f, -1, grid.dx) + fd_second_derivative(f, -2, grid.dy)
