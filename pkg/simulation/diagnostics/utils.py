"""Monitored functionals of a FieldState.

Spatial derivative norms go through the spectral multiplier |k|^order;
the Gauss residual defaults to finite-difference operators so that it is
independent of the spectral path the elliptic solver uses.
"""
import logging
import math
from typing import Sequence, Tuple

import numpy as np

from simulation.dynamics import (
    FieldState,
    covariant_derivative,
    current,
    dealiased_factors,
    dual_F,
    field_strength,
    rhs_A,
    rhs_N,
    rhs_phi,
)
from simulation.elliptic import leray_project
from simulation.grid import (
    curl,
    dealias,
    derivative_norm,
    divergence,
    fd_curl,
    fd_laplacian,
    gradient,
    hs_norm,
    integrate,
    l2_norm,
    laplacian,
    lp_norm,
)
from simulation.potential import PotentialSpec, dV_dphi_norms, eval_V
from .models import DiagnosticsRecord, EnergyParts, GrowthReport, JTerms

logger = logging.getLogger("simulation.diagnostics")

HIGHER_ORDERS = (2, 3, 4)
MIN_GROWTH_SAMPLES = 10


def total_energy(state: FieldState, spec: PotentialSpec) -> Tuple[float, EnergyParts]:
    grid = state.grid
    E, B = field_strength(state)
    D0phi, Dphi = covariant_derivative(state)
    parts = EnergyParts(
        em=0.5 * integrate(np.sum(E**2, axis=0) + B**2, grid),
        n_kinetic=0.5 * integrate(state.dt_N**2, grid),
        n_gradient=0.5 * integrate(np.sum(gradient(state.N, grid) ** 2, axis=0), grid),
        phi_covariant=0.5 * integrate(np.abs(D0phi) ** 2 + np.sum(np.abs(Dphi) ** 2, axis=0), grid),
        potential=integrate(eval_V(state.phi, state.N, spec), grid),
    )
    return parts.total, parts


def _root_sum_squares(*values: float) -> float:
    return math.sqrt(sum(v * v for v in values))


def functional_J_terms(state: FieldState) -> JTerms:
    grid = state.grid
    return JTerms(
        dA=_root_sum_squares(
            l2_norm(state.dt_A0, grid), derivative_norm(state.A0, 1, grid),
            l2_norm(state.dt_A, grid), derivative_norm(state.A, 1, grid),
        ),
        phi=l2_norm(state.phi, grid),
        dphi=_root_sum_squares(l2_norm(state.dt_phi, grid), derivative_norm(state.phi, 1, grid)),
        N=l2_norm(state.N, grid),
        dN=_root_sum_squares(l2_norm(state.dt_N, grid), derivative_norm(state.N, 1, grid)),
        higher_A=sum(derivative_norm(state.A, k, grid) for k in HIGHER_ORDERS),
        higher_phi=sum(derivative_norm(state.phi, k, grid) for k in HIGHER_ORDERS),
    )


def functional_J(state: FieldState) -> float:
    return functional_J_terms(state).total


def n_higher_derivatives(state: FieldState) -> float:
    """Sum over orders 2..4 of ||grad^k N||; logged beside J, not part of it."""
    return sum(derivative_norm(state.N, k, state.grid) for k in HIGHER_ORDERS)


def gauge_residual_parts(state: FieldState) -> Tuple[float, float]:
    """(relative, absolute) Coulomb-gauge residual."""
    absolute = l2_norm(divergence(state.A, state.grid), state.grid)
    scale = derivative_norm(state.A, 1, state.grid)
    if scale == 0.0:
        return (0.0 if absolute == 0.0 else math.inf), absolute
    return absolute / scale, absolute


def gauge_residual(state: FieldState) -> float:
    relative, absolute = gauge_residual_parts(state)
    logger.debug(f"Gauge residual at t={state.t:.6g}: absolute {absolute:.3e}, relative {relative:.3e}")
    return relative


def gauss_residual(state: FieldState, spec: PotentialSpec, method: str = "finite_difference") -> float:
    """|| Laplacian(A^0) - kappa F^0 + Im(phi conj(D^0 phi)) || with A^0 = -A0."""
    grid = state.grid
    if method == "finite_difference":
        lap_A0, B = fd_laplacian(state.A0, grid), fd_curl(state.A, grid)
    elif method == "spectral":
        lap_A0, B = laplacian(state.A0, grid), curl(state.A, grid)
    else:
        raise ValueError(f"Unknown residual method {method!r}; expected 'finite_difference' or 'spectral'")
    D0phi, _ = covariant_derivative(state)
    residual = -lap_A0 - spec.kappa * B - np.imag(state.phi * np.conj(D0phi))
    return l2_norm(residual, grid)


def box_norms(state: FieldState, spec: PotentialSpec) -> Tuple[float, float, float]:
    """On-shell L2 norms of box A, box phi and box N."""
    grid = state.grid
    return (
        l2_norm(rhs_A(state, spec), grid),
        l2_norm(rhs_phi(state, spec), grid),
        l2_norm(laplacian(state.N, grid) - rhs_N(state, spec), grid),
    )


def difference_norm(first: FieldState, second: FieldState) -> float:
    """J of the componentwise difference; the A0 sector is excluded."""
    if first.grid != second.grid:
        raise ValueError("difference_norm requires states on the same grid")
    if not math.isclose(first.t, second.t, rel_tol=1e-12, abs_tol=1e-12):
        raise ValueError(f"difference_norm requires equal times, got {first.t} and {second.t}")
    grid = first.grid
    difference = FieldState(
        grid=grid, t=first.t,
        phi=first.phi - second.phi, dt_phi=first.dt_phi - second.dt_phi,
        N=first.N - second.N, dt_N=first.dt_N - second.dt_N,
        A=first.A - second.A, dt_A=first.dt_A - second.dt_A,
        A0=grid.zeros(), dt_A0=grid.zeros(),
    )
    return functional_J(difference)


def growth_monitor(times: Sequence[float], values: Sequence[float]) -> GrowthReport:
    """Max of J/(1+t)^2 and the log-log slope of J over the second half."""
    t = np.asarray(times, dtype=np.float64)
    J = np.asarray(values, dtype=np.float64)
    if t.size != J.size:
        raise ValueError("times and values must have equal length")
    if t.size < MIN_GROWTH_SAMPLES:
        raise ValueError(f"growth_monitor needs at least {MIN_GROWTH_SAMPLES} samples, got {t.size}")

    ratio_max = float(np.max(J / (1.0 + t) ** 2))
    half = slice(t.size // 2, None)
    tail_t, tail_J = t[half], J[half]
    positive = tail_J > 0
    if np.count_nonzero(positive) < 2:
        return GrowthReport(ratio_max=ratio_max, exponent_fit=0.0)
    slope, _ = np.polyfit(np.log1p(tail_t[positive]), np.log(tail_J[positive]), 1)
    return GrowthReport(ratio_max=ratio_max, exponent_fit=float(slope))


def data_norm_J0(state: FieldState) -> float:
    """Initial-data functional ||grad a0|| + ||a1|| + ||phi0|| + ||grad phi0|| + ||phi1|| + ||grad n0|| + ||n1||."""
    grid = state.grid
    return (
        derivative_norm(state.A, 1, grid) + l2_norm(state.dt_A, grid)
        + l2_norm(state.phi, grid) + derivative_norm(state.phi, 1, grid) + l2_norm(state.dt_phi, grid)
        + derivative_norm(state.N, 1, grid) + l2_norm(state.dt_N, grid)
    )


def _dot_h1(f: np.ndarray, dt_f: np.ndarray, grid) -> float:
    # ||(dt f, grad f)||_{H^1}
    return _root_sum_squares(
        hs_norm(dt_f, 1, grid), derivative_norm(f, 1, grid), derivative_norm(f, 2, grid)
    )


def higher_energy_J1(state: FieldState) -> float:
    grid = state.grid
    return (
        _dot_h1(state.A, state.dt_A, grid)
        + _dot_h1(state.phi, state.dt_phi, grid)
        + _dot_h1(state.N, state.dt_N, grid)
    )


def a0_bounds(state: FieldState) -> Tuple[float, float, float]:
    """(||grad A0|| + ||A0 phi||, ||grad A0||_L3, ||A0||_inf)."""
    grid = state.grid
    grad_A0 = gradient(state.A0, grid)
    return (
        l2_norm(grad_A0, grid) + l2_norm(state.A0 * state.phi, grid),
        lp_norm(grad_A0, 3, grid),
        lp_norm(state.A0, np.inf, grid),
    )


def field_bound_ratio(state: FieldState) -> float:
    """||d_i A_mu|| / (||E|| + ||B||)."""
    grid = state.grid
    E, B = field_strength(state)
    denominator = l2_norm(E, grid) + l2_norm(B, grid)
    numerator = _root_sum_squares(derivative_norm(state.A0, 1, grid), derivative_norm(state.A, 1, grid))
    if denominator == 0.0:
        return 0.0
    return numerator / denominator


def ampere_gradient_residual(state: FieldState, spec: PotentialSpec) -> float:
    """Gradient part of the unprojected vector equation.

    The projected evolution drops grad(dt A0); it must equal the gradient
    part of kappa F^i - j_i, so this measures the dt_A0 estimate.
    """
    grid = state.grid
    _, F1, F2 = dual_F(state)
    factors = dealiased_factors(state)
    _, Dphi = covariant_derivative(factors)
    source = spec.kappa * np.stack([F1, F2]) - dealias(current(factors.phi, Dphi), grid)
    gradient_part = source + leray_project(source, grid)
    return l2_norm(gradient_part - gradient(state.dt_A0, grid), grid)


def phi_lp_norms(state: FieldState) -> dict:
    grid = state.grid
    return {
        "phi_L3": lp_norm(state.phi, 3, grid),
        "phi_L4": lp_norm(state.phi, 4, grid),
        "phi_L6": lp_norm(state.phi, 6, grid),
        "phi_Linf": lp_norm(state.phi, np.inf, grid),
    }


class XAccumulator:
    """Trapezoid-rule integral of ||box A|| + ||box phi|| + ||box N|| over time."""

    def __init__(self):
        self.value = 0.0
        self._last = None

    def add(self, t: float, box_total: float) -> float:
        if self._last is not None:
            t_prev, b_prev = self._last
            if t < t_prev:
                raise ValueError(f"samples must be added in time order, got {t} after {t_prev}")
            self.value += 0.5 * (t - t_prev) * (b_prev + box_total)
        self._last = (t, box_total)
        return self.value


def make_record(
    state: FieldState,
    spec: PotentialSpec,
    accumulator: XAccumulator,
    initial_J0: float,
    hs_exponents: Sequence[float] = (1.0, 2.0),
) -> DiagnosticsRecord:
    grid = state.grid
    energy, parts = total_energy(state, spec)
    terms = functional_J_terms(state)
    relative, absolute = gauge_residual_parts(state)
    box = box_norms(state, spec)
    X = accumulator.add(state.t, sum(box))
    gradient_screen, gradient_L3, a0_max = a0_bounds(state)
    dv_l2, dv_d1, dv_d2 = dV_dphi_norms(state.phi, state.N, spec, grid)
    J = terms.total

    return DiagnosticsRecord(
        t=state.t,
        energy_total=energy,
        energy_parts=parts,
        J_norm=J,
        J_over_growth=J / (1.0 + state.t) ** 2,
        J_terms=terms,
        N_higher=n_higher_derivatives(state),
        J0=data_norm_J0(state),
        energy_over_J0=energy / initial_J0 if initial_J0 > 0 else 0.0,
        J1=higher_energy_J1(state),
        gauge_residual=relative,
        gauge_residual_abs=absolute,
        gauss_residual=gauss_residual(state, spec),
        box_A=box[0],
        box_phi=box[1],
        box_N=box[2],
        X_accum=X,
        a0_gradient_screen=gradient_screen,
        a0_gradient_L3=gradient_L3,
        a0_Linf=a0_max,
        field_bound_ratio=field_bound_ratio(state),
        ampere_residual=ampere_gradient_residual(state, spec),
        dVdphi_L2=dv_l2,
        dVdphi_d1=dv_d1,
        dVdphi_d2=dv_d2,
        lp_norms=phi_lp_norms(state),
        hs_norms={float(s): hs_norm(state.phi, s, grid) for s in hs_exponents},
        elliptic_iterations=state.solve_report.iterations if state.solve_report else 0,
    )
