from .models import (
    SCHEMA_VERSION,
    DiagnosticsRecord,
    EnergyParts,
    GrowthReport,
    JTerms,
    record_columns,
)
from .utils import (
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
    n_higher_derivatives,
    phi_lp_norms,
    total_energy,
)

__all__ = [
    'SCHEMA_VERSION', 'DiagnosticsRecord', 'EnergyParts', 'GrowthReport', 'JTerms', 'record_columns',
    'total_energy', 'functional_J', 'functional_J_terms', 'n_higher_derivatives',
    'gauge_residual', 'gauge_residual_parts', 'gauss_residual', 'box_norms', 'difference_norm',
    'growth_monitor', 'data_norm_J0', 'higher_energy_J1', 'a0_bounds', 'field_bound_ratio',
    'ampere_gradient_residual', 'phi_lp_norms', 'XAccumulator', 'make_record',
]
