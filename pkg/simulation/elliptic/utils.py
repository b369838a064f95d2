"""Coulomb-gauge constraint for A0 and the divergence-free projection.

The stored A0 is the covariant component (E = dt A - grad A0). Its
constraint, from the nu = 0 Maxwell equation together with div A = 0, is

    Laplacian(A0) - |phi|^2 A0 = -kappa B - Im(phi conj(dt phi)),

solved in the negated, positive form (|phi|^2 - Laplacian) A0 = b.
"""
import logging
from typing import Optional, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from simulation.grid import Grid, curl, l2_norm, laplacian
from simulation.grid.utils import apply_multiplier, forward, inverse
from .models import EllipticSolveReport, EllipticTolerances

logger = logging.getLogger("simulation.elliptic")

# scipy checks its own recursively updated residual; aim below the target
_CG_SAFETY = 0.5


class EllipticSolveError(RuntimeError):
    def __init__(self, message: str, report: EllipticSolveReport):
        super().__init__(message)
        self.report = report


def solve_poisson(source: np.ndarray, grid: Grid) -> np.ndarray:
    """Mean-free u with Laplacian(u) = source - mean(source)."""
    k2 = grid.tables.k2_derivative
    inverse_symbol = np.zeros_like(k2)
    nonzero = k2 > 0
    inverse_symbol[nonzero] = -1.0 / k2[nonzero]
    return apply_multiplier(source, inverse_symbol)


def leray_project(B: np.ndarray, grid: Grid) -> np.ndarray:
    """P B = Laplacian^-1 curl curl B, so that P B = -B when div B = 0.

    Fourier symbol -(delta_ij - k_i k_j / |k|^2); modes with no resolvable
    derivative (k = 0 and pure Nyquist lines) map to -B.
    """
    t = grid.tables
    B_hat = forward(B)
    k2 = t.k2_derivative
    safe = np.where(k2 > 0, k2, 1.0)
    k_dot_B = (t.DX * B_hat[0] + t.DY * B_hat[1]) / safe
    out = np.stack([-(B_hat[0] - t.DX * k_dot_B), -(B_hat[1] - t.DY * k_dot_B)])
    return inverse(out, real=not np.iscomplexobj(B))


def gauss_source(phi: np.ndarray, dt_phi: np.ndarray, A: np.ndarray, kappa: float, grid: Grid) -> np.ndarray:
    """Right side b of (|phi|^2 - Laplacian) A0 = b."""
    return kappa * curl(A, grid) + np.imag(phi * np.conj(dt_phi))


def screened_residual(A0: np.ndarray, coefficient: np.ndarray, source: np.ndarray, grid: Grid) -> float:
    return l2_norm(coefficient * A0 - laplacian(A0, grid) - source, grid)


def _spectral_preconditioner(grid: Grid, shift: float) -> LinearOperator:
    # (shift - Laplacian)^-1; the zero mode of the bare inverse Laplacian is
    # regularised by the mean screening
    k2 = grid.tables.k2_derivative
    symbol = 1.0 / (shift + k2)
    n = grid.size

    def apply(r):
        return apply_multiplier(r.reshape(grid.shape), symbol).ravel()

    return LinearOperator((n, n), matvec=apply, dtype=np.float64)


def solve_A0(
    phi: np.ndarray,
    dt_phi: np.ndarray,
    A: np.ndarray,
    kappa: float,
    grid: Grid,
    tolerances: EllipticTolerances = EllipticTolerances(),
    x0: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, EllipticSolveReport]:
    b = gauss_source(phi, dt_phi, A, kappa, grid)
    target = tolerances.tol_abs + tolerances.tol_rel * l2_norm(b, grid)

    if np.max(np.abs(phi)) == 0.0:
        # No screening: pure Poisson, mean-free solution
        A0 = solve_poisson(-b, grid)
        residual = screened_residual(A0, 0.0, b - np.mean(b), grid)
        report = EllipticSolveReport(
            iterations=0, final_residual=residual, converged=residual <= target, target=target
        )
        if not report.converged:
            raise EllipticSolveError(f"Poisson fallback residual {residual:.3e} above {target:.3e}", report)
        return A0, report

    coefficient = np.abs(phi) ** 2
    n = grid.size

    def matvec(x):
        u = x.reshape(grid.shape)
        return (coefficient * u - laplacian(u, grid)).ravel()

    operator = LinearOperator((n, n), matvec=matvec, dtype=np.float64)
    preconditioner = _spectral_preconditioner(grid, float(np.mean(coefficient)))

    iterations = 0

    def count(_):
        nonlocal iterations
        iterations += 1

    # scipy measures the Euclidean residual; L2 = sqrt(cell_area) * Euclidean
    atol = _CG_SAFETY * target / np.sqrt(grid.cell_area)
    guess = None if x0 is None else np.asarray(x0, dtype=np.float64).ravel()
    solution, info = cg(
        operator, b.ravel(), x0=guess, rtol=0.0, atol=atol,
        maxiter=tolerances.max_iterations, M=preconditioner, callback=count,
    )
    A0 = solution.reshape(grid.shape)
    residual = screened_residual(A0, coefficient, b, grid)
    converged = info == 0 and residual <= target
    report = EllipticSolveReport(
        iterations=iterations, final_residual=residual, converged=converged, target=target
    )
    if not converged:
        logger.error(f"A0 solve failed: info={info}, iterations={iterations}, residual={residual:.3e}, target={target:.3e}")
        raise EllipticSolveError(
            f"A0 conjugate-gradient solve did not converge in {iterations} iterations "
            f"(residual {residual:.3e}, target {target:.3e})",
            report,
        )
    return A0, report


def estimate_dt_A0(A0_prev: Optional[np.ndarray], A0_curr: np.ndarray, dt: float) -> np.ndarray:
    """Backward difference; zero when there is no previous solve."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if A0_prev is None:
        return np.zeros_like(A0_curr)
    return (A0_curr - A0_prev) / dt


def solve_dt_A0(
    phi: np.ndarray,
    dt_phi: np.ndarray,
    dt_A: np.ndarray,
    A0: np.ndarray,
    phi_source_static: np.ndarray,
    kappa: float,
    grid: Grid,
) -> np.ndarray:
    """Time derivative of A0 from the differentiated constraint.

    ``phi_source_static`` is the phi source evaluated with dt A0 = 0, so that
    dt^2 phi = Laplacian(phi) + phi_source_static - i dt_A0 phi. Substituting
    this cancels the screening term and leaves

        Laplacian(dt_A0) = dt|phi|^2 A0 - kappa dt B - Im(phi conj(Laplacian(phi) + S)).

    The constant mode is a residual time-dependent gauge and is set to zero.
    """
    d_density = 2.0 * np.real(np.conj(phi) * dt_phi)
    rhs = (
        d_density * A0
        - kappa * curl(dt_A, grid)
        - np.imag(phi * np.conj(laplacian(phi, grid) + phi_source_static))
    )
    return solve_poisson(rhs, grid)


def dense_operator(phi: np.ndarray, grid: Grid) -> np.ndarray:
    """Dense matrix of (|phi|^2 - Laplacian), for small-grid oracles only."""
    n = grid.size
    if n > 1024:
        raise ValueError(f"dense operator limited to 1024 unknowns, got {n}")
    basis = np.eye(n).reshape((n,) + grid.shape)
    columns = -laplacian(basis, grid).reshape(n, n).T
    return columns + np.diag((np.abs(phi) ** 2).ravel())
