from .models import PotentialSpec
from .utils import bounded_below_hint, dV_dN, dV_dphi, dV_dphi_norms, eval_V

__all__ = ['PotentialSpec', 'eval_V', 'dV_dphi', 'dV_dN', 'bounded_below_hint', 'dV_dphi_norms']
