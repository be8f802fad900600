"""Non-Markovian phonon dephasing of a double-donor charge qubit."""

from .params import (
    DerivedScales,
    ElectronicLevels,
    Geometry,
    InitialState,
    Material,
    ParameterError,
    derive_scales,
    gamma_T,
    material_preset,
)
from .rates import (
    CoherenceTime,
    Curve,
    DegeneracyError,
    RateParams,
    coherence_element,
    coherence_time,
    decay,
    gamma,
    gamma0,
    gamma_ab,
    ln_G0,
    mean_rate,
    peak_kernels,
)

__version__ = "0.1.0"
