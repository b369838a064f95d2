from .models import ComplexField, Grid, ScalarField, VectorField
from .utils import (
    curl,
    dealias,
    derivative_norm,
    divergence,
    gradient,
    hs_norm,
    integrate,
    l2_norm,
    laplacian,
    lp_norm,
    mollify,
    perp_gradient,
    resample,
    spectral_l2_norm,
)
from .finite_difference import fd_curl, fd_divergence, fd_gradient, fd_laplacian

__all__ = [
    'Grid', 'ScalarField', 'ComplexField', 'VectorField',
    'gradient', 'perp_gradient', 'laplacian', 'divergence', 'curl', 'dealias', 'mollify',
    'hs_norm', 'lp_norm', 'l2_norm', 'derivative_norm', 'spectral_l2_norm', 'integrate', 'resample',
    'fd_gradient', 'fd_divergence', 'fd_curl', 'fd_laplacian',
]
