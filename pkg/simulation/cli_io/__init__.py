from .config import ConfigError, config_from_mapping, parse_config
from .models import (
    ConvergenceLevel,
    ConvergenceReport,
    ConvergenceSummary,
    DiagnosticsConfig,
    IntegratorConfig,
    OutputConfig,
    PotentialConfig,
    RunConfig,
    RunSummary,
    UniquenessReport,
    UniquenessSample,
)
from .snapshot import SnapshotError, read_snapshot, write_snapshot
from .timeseries import TimeseriesWriter, read_timeseries
from .utils import (
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_SELFTEST,
    SimulationRunner,
    spatial_convergence,
    temporal_convergence,
    uniqueness_experiment,
)

__all__ = [
    'ConfigError', 'parse_config', 'config_from_mapping',
    'RunConfig', 'IntegratorConfig', 'PotentialConfig', 'DiagnosticsConfig', 'OutputConfig',
    'RunSummary', 'ConvergenceLevel', 'ConvergenceReport', 'ConvergenceSummary',
    'UniquenessReport', 'UniquenessSample',
    'SnapshotError', 'read_snapshot', 'write_snapshot', 'TimeseriesWriter', 'read_timeseries',
    'SimulationRunner', 'temporal_convergence', 'spatial_convergence', 'uniqueness_experiment',
    'EXIT_OK', 'EXIT_CONFIG', 'EXIT_NUMERICAL', 'EXIT_SELFTEST',
]
