"""Physical constants, material and geometry models, and the derived scales.

Every formula downstream works in the scale system produced by
:func:`derive_scales`: times in units of the phonon transit time ``tau_d``,
rates in units of the temperature-proportional rate ``Gamma_T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import constants as _const

HBAR = _const.hbar  # J s
K_B = _const.k  # J / K
EV = _const.electron_volt  # J
NM = 1e-9  # m


class ParameterError(ValueError):
    """A physical parameter lies outside its allowed domain."""


def ev_to_joule(value_ev: float) -> float:
    return value_ev * EV


def joule_to_ev(value_j: float) -> float:
    return value_j / EV


def _require_positive(name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ParameterError(f"{name} must be a finite positive number, got {value!r}")


@dataclass(frozen=True)
class Material:
    """Bulk host properties.

    Parameters
    ----------
    mass_density : float
        kg m^-3
    sound_speed : float
        Longitudinal sound speed, m s^-1.
    deformation_constant : float
        Deformation constant D in joules. Use :meth:`from_ev` for eV input.
    name : str
        Label used in output headers.
    """

    mass_density: float
    sound_speed: float
    deformation_constant: float
    name: str = "custom"

    def __post_init__(self):
        _require_positive("mass_density", self.mass_density)
        _require_positive("sound_speed", self.sound_speed)
        _require_positive("deformation_constant", self.deformation_constant)

    @classmethod
    def from_ev(cls, mass_density, sound_speed, deformation_ev, name="custom"):
        return cls(mass_density, sound_speed, ev_to_joule(deformation_ev), name)

    @property
    def deformation_ev(self) -> float:
        return joule_to_ev(self.deformation_constant)


@dataclass(frozen=True)
class Geometry:
    """Donor pair geometry, all lengths in metres.

    The donor axis is taken along z; site ``+`` sits at ``+d/2``.
    """

    d: float
    R_plus: float
    R_minus: float

    def __post_init__(self):
        _require_positive("d", self.d)
        _require_positive("R_plus", self.R_plus)
        _require_positive("R_minus", self.R_minus)
        for label, radius in (("R_plus", self.R_plus), ("R_minus", self.R_minus)):
            if radius >= self.d:
                raise ParameterError(
                    f"{label}={radius!r} must be smaller than d={self.d!r} "
                    "(donor wavefunctions may not overlap)"
                )

    @classmethod
    def from_nm(cls, d_nm, R_plus_nm, R_minus_nm=None):
        if R_minus_nm is None:
            R_minus_nm = R_plus_nm
        return cls(d_nm * NM, R_plus_nm * NM, R_minus_nm * NM)

    @classmethod
    def from_shape(cls, d, eta, sigma=0.0):
        """Build from the mean relative radius ``eta`` and relative spread ``sigma``."""
        return cls(d, d * eta * (1 + sigma / 2), d * eta * (1 - sigma / 2))

    @property
    def eta_plus(self) -> float:
        return self.R_plus / self.d

    @property
    def eta_minus(self) -> float:
        return self.R_minus / self.d


@dataclass(frozen=True)
class DerivedScales:
    """Scale system derived from a material and a geometry.

    ``T0`` is the temperature at which ``Gamma_T`` equals ``omega_d``.
    """

    tau_d: float
    omega_d: float
    eta_plus: float
    eta_minus: float
    T0: float

    @property
    def eta(self) -> float:
        return 0.5 * (self.eta_plus + self.eta_minus)

    @property
    def sigma(self) -> float:
        return (self.eta_plus - self.eta_minus) / self.eta

    def gamma_T(self, T: float) -> float:
        return gamma_T(self, T)


def derive_scales(material: Material, geometry: Geometry) -> DerivedScales:
    s = material.sound_speed
    d = geometry.d
    tau_d = d / s
    omega_d = 2 * math.pi / tau_d
    # N_d m0 is the mass inside the volume d^3
    mass_d = material.mass_density * d**3
    kT0 = mass_d * s**2 * (HBAR * omega_d / material.deformation_constant) ** 2
    return DerivedScales(
        tau_d=tau_d,
        omega_d=omega_d,
        eta_plus=geometry.eta_plus,
        eta_minus=geometry.eta_minus,
        T0=kT0 / K_B,
    )


def gamma_T(scales: DerivedScales, T: float) -> float:
    """Temperature-dependent rate ``(T / T0) * omega_d`` in s^-1."""
    if not math.isfinite(T) or T < 0:
        raise ParameterError(f"temperature must be >= 0, got {T!r}")
    return (T / scales.T0) * scales.omega_d


@dataclass(frozen=True)
class ElectronicLevels:
    """Bare donor-level splitting plus the phonon-induced shift, both rad/s."""

    bare_splitting: float
    shift: float = 0.0

    @property
    def omega0(self) -> float:
        return self.bare_splitting + self.shift


@dataclass(frozen=True)
class InitialState:
    """Prepared superposition sqrt(1 - |xi|^2)|g> + xi|e>."""

    xi: complex = field(default=1 / math.sqrt(2))

    def __post_init__(self):
        if not abs(self.xi) <= 1.0:
            raise ParameterError(f"|xi| must not exceed 1, got {abs(self.xi)!r}")

    @property
    def coherence_prefactor(self) -> complex:
        """Initial <g|rho|e> = xi* sqrt(1 - |xi|^2)."""
        return self.xi.conjugate() * math.sqrt(max(0.0, 1.0 - abs(self.xi) ** 2))


_PRESETS = {
    "si": Material.from_ev(2.33e3, 9e3, 8.6, name="Si"),
}


def known_presets() -> list[str]:
    return sorted(m.name for m in _PRESETS.values())


def material_preset(name: str) -> Material:
    try:
        return _PRESETS[name.strip().lower()]
    except KeyError:
        raise KeyError(
            f"unknown material preset {name!r}; known presets: {', '.join(known_presets())}"
        ) from None
