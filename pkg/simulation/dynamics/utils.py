"""Gauge-fixed equations of motion, initial data and the RK4 integrator.

Each right-hand side returns the source S of dt^2 X = Laplacian(X) + S,
except rhs_N which returns the full dt^2 N. Pointwise products follow the
two-thirds rule: the factors are cut to the retained band before they are
multiplied and the product is cut again.
"""
import logging
from typing import NamedTuple, Optional, Tuple

import numpy as np

from simulation.elliptic import (
    EllipticTolerances,
    estimate_dt_A0,
    leray_project,
    solve_A0,
    solve_dt_A0,
)
from simulation.grid import Grid, curl, dealias, divergence, gradient, laplacian, mollify, resample
from simulation.potential import PotentialSpec, dV_dN, dV_dphi
from .models import DtA0Method, FieldState, InitialDataKind, InitialDataSpec, NonFiniteStateError

logger = logging.getLogger("simulation.dynamics")

DEFAULT_CFL = 0.5


def field_strength(state: FieldState) -> Tuple[np.ndarray, np.ndarray]:
    """E_i = dt A_i - d_i A0 and B = d1 A2 - d2 A1."""
    E = state.dt_A - gradient(state.A0, state.grid)
    B = curl(state.A, state.grid)
    return E, B


def dual_F(state: FieldState) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dual field with epsilon^{012} = +1: (B, -E2, E1)."""
    E, B = field_strength(state)
    return B, -E[1], E[0]


def covariant_derivative(state: FieldState) -> Tuple[np.ndarray, np.ndarray]:
    D0phi = state.dt_phi + 1j * state.A0 * state.phi
    Dphi = gradient(state.phi, state.grid) + 1j * state.A * state.phi
    return D0phi, Dphi


def current(phi: np.ndarray, Dphi: np.ndarray) -> np.ndarray:
    """Spatial current Im(phi conj(D_i phi))."""
    return np.imag(phi * np.conj(Dphi))


def dealiased_factors(state: FieldState) -> FieldState:
    """Copy of ``state`` with every field that enters a product cut to the two-thirds band.

    dt_A only appears linearly and is left as is.
    """
    grid = state.grid
    return state.with_fields(**{
        name: dealias(getattr(state, name), grid)
        for name in ("phi", "dt_phi", "N", "A", "A0", "dt_A0")
    })


def rhs_A(state: FieldState, spec: PotentialSpec) -> np.ndarray:
    _, F1, F2 = dual_F(state)
    factors = dealiased_factors(state)
    _, Dphi = covariant_derivative(factors)
    j = dealias(current(factors.phi, Dphi), state.grid)
    return leray_project(spec.kappa * np.stack([F1, F2]) - j, state.grid)


def rhs_phi(state: FieldState, spec: PotentialSpec) -> np.ndarray:
    grid = state.grid
    factors = dealiased_factors(state)
    phi, A, A0 = factors.phi, factors.A, factors.A0
    D0phi, Dphi = covariant_derivative(factors)
    grad_phi = gradient(phi, grid)

    # A_mu D^mu phi with metric diag(-, +, +)
    contracted = -A0 * D0phi + np.sum(A * Dphi, axis=0)
    # d_mu(A^mu phi), keeping div A so gauge drift shows up
    time_part = factors.dt_A0 * phi + A0 * factors.dt_phi
    space_part = divergence(A, grid) * phi + np.sum(A * grad_phi, axis=0)
    source = -2.0 * dV_dphi(phi, factors.N, spec) + 1j * contracted + 1j * (space_part - time_part)
    return dealias(source, grid)


def _pure_n_mass(spec: PotentialSpec) -> float:
    # Coefficient of the part of dV/dN linear in N at phi = 0
    c = spec.coefficients
    return 2.0 * c[0, 2] if c.shape[1] > 2 else 0.0


def rhs_N(state: FieldState, spec: PotentialSpec) -> np.ndarray:
    grid = state.grid
    factors = dealiased_factors(state)
    nonlinear = dealias(dV_dN(factors.phi, factors.N, spec), grid)
    # The linear mass term acts on the full field, the products on the truncated one
    return laplacian(state.N, grid) - nonlinear - _pure_n_mass(spec) * (state.N - factors.N)


def cfl_limit(grid: Grid, cfl: float = DEFAULT_CFL) -> float:
    return cfl * min(grid.dx, grid.dy)


class _Evolved(NamedTuple):
    phi: np.ndarray
    dt_phi: np.ndarray
    N: np.ndarray
    dt_N: np.ndarray
    A: np.ndarray
    dt_A: np.ndarray

    def axpy(self, h: float, other: "_Evolved") -> "_Evolved":
        return _Evolved(*(x + h * y for x, y in zip(self, other)))


def _check_finite(values: _Evolved, t: float):
    for name, array in zip(values._fields, values):
        if not np.all(np.isfinite(array)):
            logger.error(f"Non-finite {name} detected at t={t:.6g}")
            raise NonFiniteStateError(name, t)


def _constrained_state(
    grid: Grid,
    t: float,
    values: _Evolved,
    spec: PotentialSpec,
    tolerances: EllipticTolerances,
    A0_guess: Optional[np.ndarray],
    dt_A0: Optional[np.ndarray],
    method: DtA0Method,
) -> FieldState:
    A0, report = solve_A0(values.phi, values.dt_phi, values.A, spec.kappa, grid, tolerances, x0=A0_guess)
    state = FieldState(
        grid=grid, t=t, **values._asdict(),
        A0=A0, dt_A0=grid.zeros() if dt_A0 is None else dt_A0, solve_report=report,
    )
    if method == DtA0Method.ELLIPTIC:
        state = refresh_dt_A0(state, spec)
    return state


def refresh_dt_A0(state: FieldState, spec: PotentialSpec) -> FieldState:
    """Replace dt_A0 by the solution of the time-differentiated constraint."""
    grid = state.grid
    static_source = rhs_phi(state.with_fields(dt_A0=grid.zeros()), spec)
    u = solve_dt_A0(state.phi, state.dt_phi, state.dt_A, state.A0, static_source, spec.kappa, grid)
    return state.with_fields(dt_A0=u)


def _time_derivative(state: FieldState, spec: PotentialSpec) -> _Evolved:
    grid = state.grid
    return _Evolved(
        phi=state.dt_phi,
        dt_phi=laplacian(state.phi, grid) + rhs_phi(state, spec),
        N=state.dt_N,
        dt_N=rhs_N(state, spec),
        A=state.dt_A,
        dt_A=laplacian(state.A, grid) + rhs_A(state, spec),
    )


def step(
    state: FieldState,
    dt: float,
    spec: PotentialSpec,
    tolerances: EllipticTolerances = EllipticTolerances(),
    method: DtA0Method = DtA0Method.LAGGED,
) -> FieldState:
    """Advance one classical RK4 cycle with an A0 solve at every stage.

    With the lagged method dt_A0 is held at its value from the previous step
    during the stages and refreshed by a backward difference afterwards; the
    elliptic method solves the time-differentiated constraint at each stage.
    """
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    grid = state.grid
    y0 = _Evolved(state.phi, state.dt_phi, state.N, state.dt_N, state.A, state.dt_A)
    _check_finite(y0, state.t)

    lagged = state.dt_A0 if method == DtA0Method.LAGGED else None
    if method == DtA0Method.ELLIPTIC:
        state = refresh_dt_A0(state, spec)
    k1 = _time_derivative(state, spec)

    y = y0.axpy(dt / 2, k1)
    _check_finite(y, state.t + dt / 2)
    s2 = _constrained_state(grid, state.t + dt / 2, y, spec, tolerances, state.A0, lagged, method)
    k2 = _time_derivative(s2, spec)

    y = y0.axpy(dt / 2, k2)
    _check_finite(y, state.t + dt / 2)
    s3 = _constrained_state(grid, state.t + dt / 2, y, spec, tolerances, s2.A0, lagged, method)
    k3 = _time_derivative(s3, spec)

    y = y0.axpy(dt, k3)
    _check_finite(y, state.t + dt)
    s4 = _constrained_state(grid, state.t + dt, y, spec, tolerances, s3.A0, lagged, method)
    k4 = _time_derivative(s4, spec)

    y_new = _Evolved(*(
        x0 + dt / 6 * (a + 2 * b + 2 * c + d)
        for x0, a, b, c, d in zip(y0, k1, k2, k3, k4)
    ))
    t_new = state.t + dt
    _check_finite(y_new, t_new)

    new_state = _constrained_state(grid, t_new, y_new, spec, tolerances, s4.A0, None, method)
    if method == DtA0Method.LAGGED:
        new_state = new_state.with_fields(dt_A0=estimate_dt_A0(state.A0, new_state.A0, dt))
    return new_state


def _envelope(grid: Grid, center: Tuple[float, float], width: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Minimum-image offsets from the packet centre
    x, y = grid.coordinates()
    dx = (x - center[0] + grid.lx / 2) % grid.lx - grid.lx / 2
    dy = (y - center[1] + grid.ly / 2) % grid.ly - grid.ly / 2
    return dx, dy, np.exp(-(dx**2 + dy**2) / (2.0 * width**2))


def perturbation_field(grid: Grid, seed: int) -> np.ndarray:
    """Fixed smooth random field with unit maximum, reproducible from the seed."""
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(grid.shape)
    p = mollify(noise, grid, band_limit=0.25, order=4)
    peak = np.max(np.abs(p))
    return p / peak if peak > 0 else p


def _packet_data(spec: InitialDataSpec, grid: Grid, seed: int) -> dict:
    center = spec.center or (grid.lx / 2, grid.ly / 2)
    dx, dy, g = _envelope(grid, center, spec.width)

    if spec.kind == InitialDataKind.VORTEX_LIKE:
        n = spec.winding
        z = (dx + 1j * np.sign(n) * dy) / spec.width
        phi = spec.phi_amplitude * z ** abs(n) * g
    else:
        phase = spec.momentum[0] * dx + spec.momentum[1] * dy
        phi = spec.phi_amplitude * g * np.exp(1j * phase)

    if spec.a_orientation is None:
        theta = np.random.default_rng(seed).uniform(0.0, 2.0 * np.pi)
    else:
        theta = spec.a_orientation
    direction = np.array([np.cos(theta), np.sin(theta)])[:, None, None]
    normal = np.array([-np.sin(theta), np.cos(theta)])[:, None, None]

    return dict(
        phi=phi,
        dt_phi=-1j * spec.phi_frequency * phi,
        N=spec.n_amplitude * g,
        dt_N=spec.n_velocity * g,
        A=spec.a_amplitude * direction * g,
        dt_A=spec.a_velocity * normal * g,
    )


def _single_mode_data(spec: InitialDataSpec, grid: Grid) -> dict:
    x, y = grid.coordinates()
    kx = 2.0 * np.pi * spec.mode[0] / grid.lx
    ky = 2.0 * np.pi * spec.mode[1] / grid.ly
    phase = kx * x + ky * y
    polarization = (np.array([-ky, kx]) / np.hypot(kx, ky))[:, None, None]
    phi = spec.phi_amplitude * np.exp(1j * phase)
    return dict(
        phi=phi,
        dt_phi=-1j * spec.phi_frequency * phi,
        N=spec.n_amplitude * np.sin(phase),
        dt_N=spec.n_velocity * np.cos(phase),
        A=spec.a_amplitude * polarization * np.sin(phase),
        dt_A=spec.a_velocity * polarization * np.cos(phase),
    )


def _snapshot_data(spec: InitialDataSpec, grid: Grid) -> Tuple[dict, float]:
    from simulation.cli_io.snapshot import read_snapshot

    stored = read_snapshot(spec.snapshot)
    data = {name: getattr(stored, name) for name in ("phi", "dt_phi", "N", "dt_N", "A", "dt_A")}
    if stored.grid != grid:
        logger.info(f"Resampling snapshot {spec.snapshot} from {stored.grid.describe()} to {grid.describe()}")
        data = {name: resample(value, stored.grid, grid) for name, value in data.items()}
    return data, stored.t


def _purified_state(
    data: dict,
    grid: Grid,
    t: float,
    spec: PotentialSpec,
    tolerances: EllipticTolerances,
) -> FieldState:
    # a -> -P a keeps only the divergence-free part
    data = dict(data)
    data["A"] = -leray_project(np.asarray(data["A"], dtype=np.float64), grid)
    data["dt_A"] = -leray_project(np.asarray(data["dt_A"], dtype=np.float64), grid)
    A0, report = solve_A0(data["phi"], data["dt_phi"], data["A"], spec.kappa, grid, tolerances)
    return FieldState(grid=grid, t=t, **data, A0=A0, dt_A0=grid.zeros(), solve_report=report)


def make_initial_data(
    spec: InitialDataSpec,
    grid: Grid,
    potential: PotentialSpec,
    tolerances: EllipticTolerances = EllipticTolerances(),
    seed: int = 0,
) -> FieldState:
    """Constraint-satisfying data: divergence-free a_0, a_1 and A0 from the Gauss law."""
    if spec.width < 2.0 * max(grid.dx, grid.dy) and spec.kind != InitialDataKind.SINGLE_MODE:
        logger.warning(f"Packet width {spec.width} is below two grid spacings; data is poorly resolved")

    t = 0.0
    if spec.kind == InitialDataKind.FROM_SNAPSHOT:
        data, t = _snapshot_data(spec, grid)
    elif spec.kind == InitialDataKind.SINGLE_MODE:
        data = _single_mode_data(spec, grid)
    else:
        data = _packet_data(spec, grid, seed)

    if spec.smoothing_order > 0:
        data = {name: mollify(value, grid, spec.band_limit, spec.smoothing_order) for name, value in data.items()}

    if spec.perturbation > 0:
        p = perturbation_field(grid, seed)
        data["phi"] = data["phi"] + spec.perturbation * p
        data["N"] = data["N"] + spec.perturbation * p

    state = _purified_state(data, grid, t, potential, tolerances)
    logger.info(f"Initial data {spec.kind.value} built on {grid.nx}x{grid.ny}, A0 solved in {state.solve_report.iterations} iterations")
    return state


def perturb(
    state: FieldState,
    delta: float,
    seed: int,
    potential: PotentialSpec,
    tolerances: EllipticTolerances = EllipticTolerances(),
) -> FieldState:
    """Add delta * p to phi and N and rebuild the constrained fields."""
    if delta < 0:
        raise ValueError(f"perturbation size must be non-negative, got {delta}")
    p = perturbation_field(state.grid, seed)
    data = {name: getattr(state, name) for name in ("phi", "dt_phi", "N", "dt_N", "A", "dt_A")}
    data["phi"] = data["phi"] + delta * p
    data["N"] = data["N"] + delta * p
    return _purified_state(data, state.grid, state.t, potential, tolerances)
