"""Independent numerical oracles for the closed-form rate family."""

from .integrals import (
    energy_shift,
    gamma_oracle_3d,
    gamma_oracle_radial,
    integrate_rate,
    phase_phi,
    radial_integral,
)
from .kernel import SpectralKernel, form_factor, interaction_rate, kappa_scaled
from .quadrature import QuadratureConfig, QuadratureError, QuadResult, integrate_panels

__all__ = [
    "QuadResult",
    "QuadratureConfig",
    "QuadratureError",
    "SpectralKernel",
    "energy_shift",
    "form_factor",
    "gamma_oracle_3d",
    "gamma_oracle_radial",
    "integrate_panels",
    "integrate_rate",
    "interaction_rate",
    "kappa_scaled",
    "phase_phi",
    "radial_integral",
]
