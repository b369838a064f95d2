from .models import EllipticSolveReport, EllipticTolerances
from .utils import (
    EllipticSolveError,
    dense_operator,
    estimate_dt_A0,
    gauss_source,
    leray_project,
    screened_residual,
    solve_A0,
    solve_dt_A0,
    solve_poisson,
)

__all__ = [
    'EllipticSolveReport', 'EllipticTolerances', 'EllipticSolveError',
    'solve_poisson', 'solve_A0', 'leray_project', 'estimate_dt_A0', 'solve_dt_A0',
    'gauss_source', 'screened_residual', 'dense_operator',
]
