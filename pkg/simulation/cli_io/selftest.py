"""Oracle checks on small grids, run by the ``selftest`` command."""
import logging
from typing import Callable, List, Tuple

import numpy as np

from simulation.diagnostics import gauge_residual, total_energy
from simulation.dynamics import DtA0Method, InitialDataKind, InitialDataSpec, make_initial_data, step
from simulation.elliptic import EllipticTolerances, dense_operator, gauss_source, leray_project, solve_A0, solve_poisson
from simulation.grid import Grid, divergence, fd_gradient, l2_norm, mollify, perp_gradient
from simulation.potential import PotentialSpec, dV_dN, dV_dphi, eval_V

logger = logging.getLogger("simulation.cli_io")

CheckResult = Tuple[bool, str]


def _smooth_random(grid: Grid, rng: np.random.Generator, components: int = 0) -> np.ndarray:
    shape = ((components,) if components else ()) + grid.shape
    return mollify(rng.standard_normal(shape), grid, band_limit=0.3, order=4)


def check_projection_divergence(rng) -> CheckResult:
    grid = Grid(nx=64, ny=64, lx=2 * np.pi, ly=2 * np.pi)
    worst = 0.0
    for _ in range(10):
        B = rng.standard_normal((2,) + grid.shape)
        worst = max(worst, float(np.max(np.abs(divergence(leray_project(B, grid), grid)))))
    return worst <= 1e-10, f"max |div P B| = {worst:.3e}"


def check_projection_identity(rng) -> CheckResult:
    grid = Grid(nx=64, ny=64, lx=2 * np.pi, ly=2 * np.pi)
    B = perp_gradient(_smooth_random(grid, rng), grid)
    PB = leray_project(B, grid)
    identity = l2_norm(PB + B, grid) / l2_norm(B, grid)
    X = rng.standard_normal((2,) + grid.shape)
    PX = leray_project(X, grid)
    squared = l2_norm(leray_project(PX, grid) + PX, grid) / l2_norm(PX, grid)
    return identity <= 1e-12 and squared <= 1e-12, f"|PB + B| = {identity:.3e}, |PP + P| = {squared:.3e}"


def check_poisson_mode(rng) -> CheckResult:
    grid = Grid(nx=32, ny=32, lx=3.0, ly=2.0)
    x, _ = grid.coordinates()
    k = 2 * np.pi / grid.lx
    u = solve_poisson(np.sin(k * x), grid)
    error = float(np.max(np.abs(u + np.sin(k * x) / k**2)))
    return error <= 1e-12, f"max error {error:.3e}"


def check_fd_order(rng) -> CheckResult:
    errors = []
    for n in (32, 64):
        grid = Grid(nx=n, ny=n, lx=2 * np.pi, ly=2 * np.pi)
        x, y = grid.coordinates()
        f = np.exp(np.sin(x) + np.cos(y))
        exact = np.stack([np.cos(x) * f, -np.sin(y) * f])
        errors.append(float(np.max(np.abs(fd_gradient(f, grid) - exact))))
    order = np.log2(errors[0] / errors[1])
    return order >= 3.5, f"observed finite-difference order {order:.2f}"


def check_dense_oracle(rng) -> CheckResult:
    grid = Grid(nx=16, ny=16, lx=2 * np.pi, ly=2 * np.pi)
    x, y = grid.coordinates()
    phi = 0.7 + 0.2 * np.exp(1j * x) * np.cos(y)
    dt_phi = 0.3j * phi + 0.1 * np.sin(y)
    A = perp_gradient(np.sin(x) * np.cos(2 * y), grid)
    A0, _ = solve_A0(phi, dt_phi, A, 1.0, grid, EllipticTolerances(tol_rel=1e-12, tol_abs=1e-14))
    direct = np.linalg.solve(dense_operator(phi, grid), gauss_source(phi, dt_phi, A, 1.0, grid).ravel())
    error = float(np.linalg.norm(A0.ravel() - direct) / np.linalg.norm(direct))
    return error <= 1e-8, f"relative difference to dense solve {error:.3e}"


def check_potential_gradients(rng) -> CheckResult:
    spec = PotentialSpec.from_terms([(1, 1, 0.7), (2, 1, -0.3), (1, 2, 0.4), (3, 3, 0.05)], kappa=1.0)
    phi = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    N = rng.standard_normal((8, 8))
    h = 1e-6
    d_re = (eval_V(phi + h, N, spec) - eval_V(phi - h, N, spec)) / (2 * h)
    d_im = (eval_V(phi + 1j * h, N, spec) - eval_V(phi - 1j * h, N, spec)) / (2 * h)
    d_N = (eval_V(phi, N + h, spec) - eval_V(phi, N - h, spec)) / (2 * h)
    wirtinger = float(np.max(np.abs(dV_dphi(phi, N, spec) - 0.5 * (d_re + 1j * d_im)) / (1 + np.abs(d_re) + np.abs(d_im))))
    n_error = float(np.max(np.abs(dV_dN(phi, N, spec) - d_N) / (1 + np.abs(d_N))))
    return max(wirtinger, n_error) <= 1e-6, f"phi derivative {wirtinger:.3e}, N derivative {n_error:.3e}"


def check_free_wave(rng) -> CheckResult:
    grid = Grid(nx=32, ny=32, lx=2 * np.pi, ly=2 * np.pi)
    spec = PotentialSpec(alpha=[[0.0]], kappa=1e-12)
    data = InitialDataSpec(kind=InitialDataKind.SINGLE_MODE, n_amplitude=1.0, mode=(1, 0))
    state = make_initial_data(data, grid, spec)
    dt = 0.02
    for _ in range(50):
        state = step(state, dt, spec)
    x, _ = grid.coordinates()
    error = float(np.max(np.abs(state.N - np.cos(state.t) * np.sin(x))))
    return error <= 1e-8, f"max deviation from cos(t) sin(x): {error:.3e}"


def check_energy_and_gauge(rng) -> CheckResult:
    grid = Grid(nx=32, ny=32, lx=20.0, ly=20.0)
    spec = PotentialSpec.from_terms([(1, 1, 0.5)], kappa=1.0)
    data = InitialDataSpec(
        kind=InitialDataKind.GAUSSIAN_PACKET, phi_amplitude=0.5, phi_frequency=0.8,
        n_amplitude=0.4, a_amplitude=0.3, a_velocity=0.2, width=2.0, a_orientation=0.6,
    )
    state = make_initial_data(data, grid, spec)
    e0, _ = total_energy(state, spec)
    worst_gauge = 0.0
    for _ in range(20):
        state = step(state, 0.1, spec, method=DtA0Method.ELLIPTIC)
        worst_gauge = max(worst_gauge, gauge_residual(state))
    e1, _ = total_energy(state, spec)
    drift = abs(e1 - e0) / abs(e0)
    return drift <= 1e-4 and worst_gauge <= 1e-8, f"energy drift {drift:.3e}, gauge residual {worst_gauge:.3e}"


CHECKS: List[Tuple[str, Callable[[np.random.Generator], CheckResult]]] = [
    ("projection_divergence_free", check_projection_divergence),
    ("projection_identity", check_projection_identity),
    ("poisson_single_mode", check_poisson_mode),
    ("finite_difference_order", check_fd_order),
    ("gauss_dense_oracle", check_dense_oracle),
    ("potential_gradients", check_potential_gradients),
    ("free_wave_dispersion", check_free_wave),
    ("energy_and_gauge", check_energy_and_gauge),
]


def run_selftest(seed: int = 0) -> bool:
    rng = np.random.default_rng(seed)
    passed = True
    for name, check in CHECKS:
        try:
            ok, detail = check(rng)
        except Exception as e:
            ok, detail = False, f"{type(e).__name__}: {e}"
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        if not ok:
            logger.error(f"Self-test check {name} failed: {detail}")
            passed = False
    return passed
