from .models import DtA0Method, FieldState, InitialDataKind, InitialDataSpec, NonFiniteStateError
from .utils import (
    DEFAULT_CFL,
    cfl_limit,
    covariant_derivative,
    current,
    dealiased_factors,
    dual_F,
    field_strength,
    make_initial_data,
    perturb,
    perturbation_field,
    refresh_dt_A0,
    rhs_A,
    rhs_N,
    rhs_phi,
    step,
)

__all__ = [
    'FieldState', 'InitialDataSpec', 'InitialDataKind', 'DtA0Method', 'NonFiniteStateError',
    'field_strength', 'dual_F', 'covariant_derivative', 'current', 'dealiased_factors',
    'rhs_A', 'rhs_phi', 'rhs_N', 'make_initial_data', 'perturb', 'perturbation_field',
    'refresh_dt_A0', 'step', 'cfl_limit', 'DEFAULT_CFL',
]
