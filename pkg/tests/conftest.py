import os
import tempfile

import hypothesis
import numpy as np
import pytest

os.environ.setdefault("LOG_DIR", os.path.join(tempfile.gettempdir(), "mcsh-test-logs"))

from simulation.dynamics import FieldState  # noqa: E402
from simulation.elliptic import EllipticTolerances, solve_A0  # noqa: E402
from simulation.grid import Grid, mollify, perp_gradient  # noqa: E402
from simulation.potential import PotentialSpec  # noqa: E402

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))

TIGHT = EllipticTolerances(tol_rel=1e-12, tol_abs=1e-14)


def smooth_random(grid, rng, components=0, complex_values=False, band_limit=0.3):
    shape = ((components,) if components else ()) + grid.shape
    f = rng.standard_normal(shape)
    if complex_values:
        f = f + 1j * rng.standard_normal(shape)
    return mollify(f, grid, band_limit=band_limit, order=4)


def random_state(grid, rng, spec, scale=0.3, tolerances=TIGHT):
    """Band-limited state with divergence-free A and a solved A0."""
    phi = scale * smooth_random(grid, rng, complex_values=True)
    dt_phi = scale * smooth_random(grid, rng, complex_values=True)
    A = scale * perp_gradient(smooth_random(grid, rng), grid)
    dt_A = scale * perp_gradient(smooth_random(grid, rng), grid)
    A0, report = solve_A0(phi, dt_phi, A, spec.kappa, grid, tolerances)
    return FieldState(
        grid=grid, t=0.0, phi=phi, dt_phi=dt_phi,
        N=scale * smooth_random(grid, rng), dt_N=scale * smooth_random(grid, rng),
        A=A, dt_A=dt_A, A0=A0, dt_A0=scale * smooth_random(grid, rng), solve_report=report,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def grid():
    return Grid(nx=32, ny=32, lx=2 * np.pi, ly=2 * np.pi)


@pytest.fixture
def rect_grid():
    return Grid(nx=32, ny=24, lx=3.0, ly=2.0)


@pytest.fixture
def small_grid():
    return Grid(nx=16, ny=16, lx=2 * np.pi, ly=2 * np.pi)


@pytest.fixture
def potential():
    return PotentialSpec.from_terms([(1, 1, 0.5), (2, 1, -0.1), (1, 2, 0.2)], kappa=1.0)


@pytest.fixture
def state(grid, rng, potential):
    return random_state(grid, rng, potential)
