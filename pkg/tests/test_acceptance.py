"""Long runs on the shipped configurations; deselected unless ``-m slow``."""
from pathlib import Path

import numpy as np
import pytest

from simulation.cli_io import EXIT_OK, SimulationRunner, parse_config, read_timeseries, uniqueness_experiment
from simulation.diagnostics import growth_monitor

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def standard_series(tmp_path_factory):
    out = tmp_path_factory.mktemp("standard")
    config = parse_config(CONFIG_DIR / "standard_smooth.toml")
    config = config.model_copy(update={
        "integrator": config.integrator.model_copy(update={"t_end": 20.0}),
        "output": config.output.model_copy(update={"snapshot_every": 0}),
    })
    summary = SimulationRunner(config, out).run()
    assert summary.exit_code == EXIT_OK
    _, _, data = read_timeseries(out / "timeseries.csv")
    return {name: np.array(values) for name, values in data.items()}


def _until(series, t_end):
    keep = series["t"] <= t_end + 1e-9
    return {name: values[keep] for name, values in series.items()}


def test_energy_drift(standard_series):
    series = _until(standard_series, 10.0)
    energy = series["energy_total"]
    assert np.max(np.abs(energy - energy[0])) / abs(energy[0]) <= 1e-6


def test_coulomb_gauge_preserved(standard_series):
    assert np.all(standard_series["gauge_residual"] <= 1e-8)


def test_growth_consistent_with_quadratic_bound(standard_series):
    report = growth_monitor(standard_series["t"], standard_series["J_norm"])
    assert report.exponent_fit <= 2.5
    X = standard_series["X_accum"]
    assert np.all(np.isfinite(X))
    assert np.all(np.diff(X) >= 0.0)


def test_sobolev_norms_stay_bounded(standard_series):
    series = _until(standard_series, 10.0)
    for column in ("hs_phi_s1", "hs_phi_s2"):
        assert np.max(series[column]) <= 10.0 * series[column][0]


def test_uniqueness_ratio(tmp_path):
    config = parse_config(CONFIG_DIR / "standard_smooth.toml")
    config = config.model_copy(update={
        "grid": config.grid.model_copy(update={"nx": 128, "ny": 128}),
        "integrator": config.integrator.model_copy(update={"t_end": 2.0}),
    })
    report = uniqueness_experiment(config, 1e-3)
    assert report.zero_delta_identical
    assert report.ratio_in_band
