import math
from typing import Dict, List, Sequence

from pydantic import BaseModel, ConfigDict

SCHEMA_VERSION = 1


class EnergyParts(BaseModel):
    model_config = ConfigDict(frozen=True)

    em: float
    n_kinetic: float
    n_gradient: float
    phi_covariant: float
    potential: float

    @property
    def total(self) -> float:
        return self.em + self.n_kinetic + self.n_gradient + self.phi_covariant + self.potential


class JTerms(BaseModel):
    """Per-term contributions to the functional norm J."""

    model_config = ConfigDict(frozen=True)

    dA: float
    phi: float
    dphi: float
    N: float
    dN: float
    higher_A: float
    higher_phi: float

    @property
    def total(self) -> float:
        return self.dA + self.phi + self.dphi + self.N + self.dN + self.higher_A + self.higher_phi


class GrowthReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    ratio_max: float
    exponent_fit: float


def hs_column(s: float) -> str:
    return f"hs_phi_s{s:g}"


class DiagnosticsRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    t: float
    energy_total: float
    energy_parts: EnergyParts
    J_norm: float
    J_over_growth: float
    J_terms: JTerms
    N_higher: float
    J0: float
    energy_over_J0: float
    J1: float
    gauge_residual: float
    gauge_residual_abs: float
    gauss_residual: float
    box_A: float
    box_phi: float
    box_N: float
    X_accum: float
    a0_gradient_screen: float
    a0_gradient_L3: float
    a0_Linf: float
    field_bound_ratio: float
    ampere_residual: float
    dVdphi_L2: float
    dVdphi_d1: float
    dVdphi_d2: float
    lp_norms: Dict[str, float]
    hs_norms: Dict[float, float]
    elliptic_iterations: int

    def flat(self) -> Dict[str, float]:
        row = {
            "t": self.t,
            "energy_total": self.energy_total,
            **{f"energy_{k}": v for k, v in self.energy_parts.model_dump().items()},
            "J_norm": self.J_norm,
            "J_over_growth": self.J_over_growth,
            **{f"J_{k}": v for k, v in self.J_terms.model_dump().items()},
        }
        for name in ("N_higher", "J0", "energy_over_J0", "J1", "gauge_residual", "gauge_residual_abs",
                     "gauss_residual", "box_A", "box_phi", "box_N", "X_accum", "a0_gradient_screen",
                     "a0_gradient_L3", "a0_Linf", "field_bound_ratio", "ampere_residual",
                     "dVdphi_L2", "dVdphi_d1", "dVdphi_d2"):
            row[name] = getattr(self, name)
        row.update(self.lp_norms)
        row.update({hs_column(s): v for s, v in self.hs_norms.items()})
        row["elliptic_iterations"] = self.elliptic_iterations
        return row

    def as_row(self, columns: Sequence[str]) -> List[float]:
        flat = self.flat()
        return [flat[c] for c in columns]

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.flat().values())


LP_COLUMNS = ("phi_L3", "phi_L4", "phi_L6", "phi_Linf")

BASE_COLUMNS = (
    "t", "energy_total",
    "energy_em", "energy_n_kinetic", "energy_n_gradient", "energy_phi_covariant", "energy_potential",
    "J_norm", "J_over_growth",
    "J_dA", "J_phi", "J_dphi", "J_N", "J_dN", "J_higher_A", "J_higher_phi",
    "N_higher", "J0", "energy_over_J0", "J1",
    "gauge_residual", "gauge_residual_abs", "gauss_residual",
    "box_A", "box_phi", "box_N", "X_accum",
    "a0_gradient_screen", "a0_gradient_L3", "a0_Linf", "field_bound_ratio", "ampere_residual",
    "dVdphi_L2", "dVdphi_d1", "dVdphi_d2",
) + LP_COLUMNS


def record_columns(hs_exponents: Sequence[float]) -> List[str]:
    """Fixed column order for one schema version and a given H^s list."""
    return list(BASE_COLUMNS) + [hs_column(s) for s in hs_exponents] + ["elliptic_iterations"]
