"""Polynomial scalar potential and its derivatives.

V is a power series in r = |phi|^2 and N; numpy's polyval2d evaluates it
by nested Horner sums. dV_dphi is the Wirtinger derivative with respect to
conj(phi), which equals phi * dV/dr.
"""
from typing import Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import linprog

from simulation.grid import Grid, derivative_norm, l2_norm
from .models import PotentialSpec


def eval_V(phi: np.ndarray, N: np.ndarray, spec: PotentialSpec) -> np.ndarray:
    r = np.abs(phi) ** 2
    return P.polyval2d(r, N, spec.coefficients)


def dV_dphi(phi: np.ndarray, N: np.ndarray, spec: PotentialSpec) -> np.ndarray:
    r = np.abs(phi) ** 2
    dc_dr = P.polyder(spec.coefficients, axis=0)
    return phi * P.polyval2d(r, N, dc_dr)


def dV_dN(phi: np.ndarray, N: np.ndarray, spec: PotentialSpec) -> np.ndarray:
    r = np.abs(phi) ** 2
    dc_dN = P.polyder(spec.coefficients, axis=1)
    return P.polyval2d(r, N, dc_dN)


def _dominated(point: np.ndarray, dominant: np.ndarray) -> bool:
    # point = sum mu_i dominant_i with mu >= 0 and sum mu < 1, i.e. strictly
    # inside the hull of the dominant exponents and the origin
    if len(dominant) == 0:
        return False
    result = linprog(
        c=np.ones(len(dominant)), A_eq=dominant.T, b_eq=point,
        bounds=(0, None), method="highs",
    )
    return bool(result.success and result.fun < 1.0 - 1e-12)


def bounded_below_hint(spec: PotentialSpec) -> bool:
    """Sufficient test for V being bounded below.

    Terms c r^m N^q with c > 0 and q even are nonnegative. Every other term
    must have exponents (m, q) strictly inside the hull of those terms and
    the constant, so weighted AM-GM bounds it by a fraction of them plus a
    constant. A False result means possibly unbounded.
    """
    c = spec.coefficients
    exponents = np.argwhere(c != 0.0)
    nonnegative = np.array([
        (m, q) for m, q in exponents if m + q > 0 and q % 2 == 0 and c[m, q] > 0.0
    ], dtype=np.float64).reshape(-1, 2)
    for m, q in exponents:
        if m + q == 0 or (q % 2 == 0 and c[m, q] > 0.0):
            continue
        if not _dominated(np.array([m, q], dtype=np.float64), nonnegative):
            return False
    return True


def dV_dphi_norms(phi: np.ndarray, N: np.ndarray, spec: PotentialSpec, grid: Grid) -> Tuple[float, float, float]:
    """L2 norms of dV/dphi and of its first and second spatial derivatives."""
    g = dV_dphi(phi, N, spec)
    return l2_norm(g, grid), derivative_norm(g, 1, grid), derivative_norm(g, 2, grid)
