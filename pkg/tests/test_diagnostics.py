import numpy as np
import pytest

from simulation.diagnostics import (
    SCHEMA_VERSION,
    XAccumulator,
    a0_bounds,
    ampere_gradient_residual,
    box_norms,
    data_norm_J0,
    difference_norm,
    field_bound_ratio,
    functional_J,
    functional_J_terms,
    gauge_residual,
    gauge_residual_parts,
    gauss_residual,
    growth_monitor,
    higher_energy_J1,
    make_record,
    phi_lp_norms,
    record_columns,
    total_energy,
)
from simulation.dynamics import FieldState, InitialDataKind, InitialDataSpec, make_initial_data, refresh_dt_A0
from simulation.grid import Grid, fd_gradient, gradient, perp_gradient
from simulation.potential import PotentialSpec, eval_V
from tests.conftest import TIGHT, random_state, smooth_random

COUPLED = PotentialSpec.from_terms([(1, 1, 0.5), (1, 2, 0.1)], kappa=1.0)


class TestEnergy:
    def test_zero_state(self, grid, potential):
        energy, parts = total_energy(FieldState.zeros(grid), potential)
        assert energy == 0.0
        assert parts.total == 0.0

    def test_static_scalar_mode(self, rect_grid):
        x, _ = rect_grid.coordinates()
        k = 2 * np.pi / rect_grid.lx
        a = 0.7
        state = FieldState.zeros(rect_grid).with_fields(N=a * np.sin(k * x))
        energy, parts = total_energy(state, PotentialSpec())
        assert energy == pytest.approx(a**2 * k**2 * rect_grid.area / 4, rel=1e-12)
        assert parts.n_gradient == pytest.approx(energy, rel=1e-12)

    def test_parts_sum_to_total(self, state, potential):
        energy, parts = total_energy(state, potential)
        assert energy == pytest.approx(parts.total, rel=1e-14)

    def test_matches_finite_difference_quadrature(self):
        grid = Grid(nx=256, ny=256, lx=2 * np.pi, ly=2 * np.pi)
        x, y = grid.coordinates()
        phi = 0.5 * np.exp(1j * x) + 0.2 * np.cos(y)
        dt_phi = 0.3j * np.sin(x + y) + 0.1
        N = 0.4 * np.cos(x) * np.sin(y)
        dt_N = 0.2 * np.sin(x)
        A = np.stack([0.3 * np.cos(y), 0.2 * np.sin(x)])
        dt_A = np.stack([0.1 * np.sin(y), -0.25 * np.cos(x)])
        A0 = 0.3 * np.cos(x + y)
        state = FieldState(grid=grid, t=0.0, phi=phi, dt_phi=dt_phi, N=N, dt_N=dt_N,
                           A=A, dt_A=dt_A, A0=A0, dt_A0=grid.zeros())

        E = dt_A - fd_gradient(A0, grid)
        B = fd_gradient(A[1], grid)[0] - fd_gradient(A[0], grid)[1]
        D0phi = dt_phi + 1j * A0 * phi
        grad_phi = fd_gradient(phi.real, grid) + 1j * fd_gradient(phi.imag, grid)
        Dphi = grad_phi + 1j * A * phi
        density = (
            0.5 * (np.sum(E**2, axis=0) + B**2)
            + 0.5 * dt_N**2 + 0.5 * np.sum(fd_gradient(N, grid) ** 2, axis=0)
            + 0.5 * (np.abs(D0phi) ** 2 + np.sum(np.abs(Dphi) ** 2, axis=0))
            + eval_V(phi, N, COUPLED)
        )
        expected = float(np.sum(density) * grid.cell_area)
        assert total_energy(state, COUPLED)[0] == pytest.approx(expected, rel=1e-6)


class TestFunctionalJ:
    def test_zero_state(self, grid):
        assert functional_J(FieldState.zeros(grid)) == 0.0

    def test_constant_scalar(self, rect_grid):
        c = 0.6
        state = FieldState.zeros(rect_grid).with_fields(phi=np.full(rect_grid.shape, c, dtype=complex))
        assert functional_J(state) == pytest.approx(c * np.sqrt(rect_grid.area), rel=1e-12)
        terms = functional_J_terms(state)
        assert terms.phi == pytest.approx(functional_J(state), rel=1e-12)
        assert terms.higher_phi == pytest.approx(0.0, abs=1e-12)

    def test_terms_sum_to_total(self, state):
        terms = functional_J_terms(state)
        assert functional_J(state) == pytest.approx(sum(terms.model_dump().values()), rel=1e-14)


class TestResiduals:
    def test_gauge_residual_of_zero(self, grid):
        assert gauge_residual(FieldState.zeros(grid)) == 0.0

    def test_gauge_residual_of_divergence_free_field(self, grid, rng):
        A = perp_gradient(rng.standard_normal(grid.shape), grid)
        assert gauge_residual(FieldState.zeros(grid).with_fields(A=A)) <= 1e-12

    def test_gauge_residual_of_pure_gradient(self, grid):
        x, _ = grid.coordinates()
        A = gradient(np.sin(x), grid)
        relative, absolute = gauge_residual_parts(FieldState.zeros(grid).with_fields(A=A))
        assert relative == pytest.approx(1.0, rel=1e-12)
        assert absolute == pytest.approx(np.sqrt(grid.area / 2), rel=1e-12)

    def test_gauss_residual_of_solved_state(self, state, potential):
        assert gauss_residual(state, potential, method="spectral") <= state.solve_report.target

    def test_gauss_residual_finite_difference(self):
        grid = Grid(nx=64, ny=64, lx=20.0, ly=20.0)
        data = InitialDataSpec(
            kind=InitialDataKind.GAUSSIAN_PACKET, phi_amplitude=0.5, phi_frequency=0.8,
            a_amplitude=0.3, a_velocity=0.2, width=3.0, a_orientation=0.6,
        )
        state = make_initial_data(data, grid, COUPLED, TIGHT)
        assert gauss_residual(state, COUPLED) <= 1e-3 * gauss_residual(state.with_fields(A0=grid.zeros()), COUPLED)

    def test_gauss_residual_linear_response(self, grid):
        x, _ = grid.coordinates()
        eps = 1e-3
        state = FieldState.zeros(grid).with_fields(A0=eps * np.sin(x))
        assert gauss_residual(state, COUPLED, method="spectral") == pytest.approx(
            eps * np.sqrt(grid.area / 2), rel=1e-10
        )

    def test_gauss_residual_rejects_unknown_method(self, grid):
        with pytest.raises(ValueError):
            gauss_residual(FieldState.zeros(grid), COUPLED, method="galerkin")

    def test_box_norms_vanish_without_sources(self, grid, rng):
        phi = smooth_random(grid, rng) + 0j
        state = FieldState.zeros(grid).with_fields(phi=phi, dt_phi=0.3 * phi)
        assert max(box_norms(state, PotentialSpec())) <= 1e-14

    def test_ampere_residual_drops_with_elliptic_dt_A0(self):
        grid = Grid(nx=64, ny=64, lx=20.0, ly=20.0)
        data = InitialDataSpec(
            kind=InitialDataKind.GAUSSIAN_PACKET, phi_amplitude=0.5, phi_frequency=0.8,
            n_amplitude=0.4, a_amplitude=0.3, a_velocity=0.2, width=2.5, a_orientation=0.6,
        )
        state = make_initial_data(data, grid, COUPLED, TIGHT)
        lagged = ampere_gradient_residual(state, COUPLED)
        refreshed = ampere_gradient_residual(refresh_dt_A0(state, COUPLED), COUPLED)
        assert lagged > 0.0
        assert refreshed <= 1e-3 * lagged


class TestDifferenceNorm:
    def test_identical_states(self, state):
        assert difference_norm(state, state) == 0.0

    def test_constant_shift(self, state):
        c = 0.25
        shifted = state.with_fields(phi=state.phi + c)
        assert difference_norm(shifted, state) == pytest.approx(c * np.sqrt(state.grid.area), rel=1e-9)

    def test_triangle_inequality(self, grid, rng, potential):
        a, b, c = (random_state(grid, rng, potential) for _ in range(3))
        assert difference_norm(a, c) <= difference_norm(a, b) + difference_norm(b, c) + 1e-12

    def test_ignores_A0(self, state):
        assert difference_norm(state, state.with_fields(A0=state.A0 + 1.0)) == 0.0

    def test_rejects_mismatched_grids_and_times(self, grid, rect_grid):
        with pytest.raises(ValueError):
            difference_norm(FieldState.zeros(grid), FieldState.zeros(rect_grid))
        with pytest.raises(ValueError):
            difference_norm(FieldState.zeros(grid), FieldState.zeros(grid, t=1.0))


class TestGrowthMonitor:
    times = np.linspace(0.0, 10.0, 41)

    def test_constant(self):
        report = growth_monitor(self.times, np.full(self.times.size, 3.0))
        assert report.ratio_max == pytest.approx(3.0)
        assert report.exponent_fit == pytest.approx(0.0, abs=1e-10)

    def test_quadratic_growth(self):
        report = growth_monitor(self.times, (1 + self.times) ** 2)
        assert report.ratio_max == pytest.approx(1.0)
        assert report.exponent_fit == pytest.approx(2.0, rel=1e-10)

    def test_exponential_growth_exceeds_two(self):
        assert growth_monitor(self.times, np.exp(self.times)).exponent_fit > 2.0

    def test_needs_ten_samples(self):
        with pytest.raises(ValueError):
            growth_monitor(self.times[:9], np.ones(9))


class TestBounds:
    def test_zero_state(self, grid):
        state = FieldState.zeros(grid)
        assert data_norm_J0(state) == 0.0
        assert higher_energy_J1(state) == 0.0
        assert a0_bounds(state) == (0.0, 0.0, 0.0)
        assert field_bound_ratio(state) == 0.0

    def test_field_bound_ratio_for_static_magnetic_field(self, grid, rng):
        A = perp_gradient(smooth_random(grid, rng), grid)
        assert field_bound_ratio(FieldState.zeros(grid).with_fields(A=A)) == pytest.approx(1.0, rel=1e-10)

    def test_lp_norms_of_constant(self):
        grid = Grid(nx=16, ny=16, lx=1.0, ly=1.0)
        norms = phi_lp_norms(FieldState.zeros(grid).with_fields(phi=np.full(grid.shape, 2.0, dtype=complex)))
        assert norms == pytest.approx({"phi_L3": 2.0, "phi_L4": 2.0, "phi_L6": 2.0, "phi_Linf": 2.0})


class TestAccumulator:
    def test_trapezoid(self):
        acc = XAccumulator()
        assert acc.add(0.0, 1.0) == 0.0
        assert acc.add(1.0, 3.0) == pytest.approx(2.0)
        assert acc.add(3.0, 0.0) == pytest.approx(5.0)

    def test_rejects_out_of_order_samples(self):
        acc = XAccumulator()
        acc.add(1.0, 1.0)
        with pytest.raises(ValueError):
            acc.add(0.5, 1.0)


def test_record_columns_and_values(state, potential):
    record = make_record(state, potential, XAccumulator(), initial_J0=1.0, hs_exponents=(1.0, 2.5))
    columns = record_columns((1.0, 2.5))
    assert SCHEMA_VERSION == 1
    assert columns[0] == "t" and columns[-1] == "elliptic_iterations"
    assert "hs_phi_s2.5" in columns
    row = record.as_row(columns)
    assert len(row) == len(columns)
    assert record.is_finite()
    assert record.energy_total == pytest.approx(total_energy(state, potential)[0])
    assert record.X_accum == 0.0
    assert record.elliptic_iterations == state.solve_report.iterations
