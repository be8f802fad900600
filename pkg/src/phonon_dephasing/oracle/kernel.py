"""k-space coupling objects for longitudinal acoustic phonons.

Mode sums are taken to the continuum, ``sum_k -> V/(2 pi)^3 int d^3k``. The
quantisation volume ``V`` never appears numerically: couplings are returned
multiplied by ``sqrt(V)`` (``kappa`` divided by it), which is exactly the
combination that survives in every observable.

Wave-vectors are arrays with a trailing axis of length 3; the donor axis is
``z``. The internal ``*_polar`` helpers take ``|k|`` and the projection
``k_z`` instead and are what the integrals use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..params import HBAR, Geometry, Material


def _split(k):
    k = np.asarray(k, dtype=float)
    if k.shape[-1:] != (3,):
        raise ValueError("wave-vectors need a trailing axis of length 3")
    return np.linalg.norm(k, axis=-1), k[..., 2]


def _envelope(kmag, radius):
    return 1.0 / (1.0 + (0.5 * kmag * radius) ** 2) ** 2


def _site(site):
    if site in ("+", 1, +1):
        return 1
    if site in ("-", -1):
        return -1
    raise ValueError(f"site must be '+' or '-', got {site!r}")


def form_factor_polar(kmag, kz, site, geometry: Geometry):
    sign = _site(site)
    radius = geometry.R_plus if sign > 0 else geometry.R_minus
    return np.exp(sign * 0.5j * kz * geometry.d) * _envelope(kmag, radius)


def form_factor(k, site, geometry: Geometry):
    """Fourier transform of the site-``site`` ground-state density."""
    kmag, kz = _split(k)
    return form_factor_polar(kmag, kz, site, geometry)


def kappa_scaled(kmag, material: Material):
    """Screened-ion coupling in the long-wavelength limit, ``kappa_k / sqrt(V)``."""
    kmag = np.asarray(kmag, dtype=float)
    omega = material.sound_speed * kmag
    return 1j * (material.deformation_constant / material.sound_speed) * np.sqrt(
        HBAR * omega / (2 * material.mass_density)
    )


def interaction_rate_polar(kmag, kz, material: Material, geometry: Geometry):
    # g_k = kappa_k f(-k) / (hbar V); f(-k) flips the phase of both sites
    f_minus = form_factor_polar(kmag, -kz, "+", geometry) - form_factor_polar(
        kmag, -kz, "-", geometry
    )
    return kappa_scaled(kmag, material) * f_minus / HBAR


def interaction_rate(k, material: Material, geometry: Geometry):
    """Electron-phonon rate ``g_k * sqrt(V)``; zero at ``k = 0``."""
    kmag, kz = _split(k)
    return interaction_rate_polar(kmag, kz, material, geometry)


def displacement_polar(kmag, kz, material, geometry):
    """Conditional displacement ``alpha_k * sqrt(V) = g_k sqrt(V) / omega_k``."""
    kmag = np.asarray(kmag, dtype=float)
    omega = material.sound_speed * kmag
    g = interaction_rate_polar(kmag, kz, material, geometry)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(kmag > 0, g / np.where(kmag > 0, omega, 1.0), 0.0)


def shift_displacement_polar(kmag, kz, material, geometry):
    """Displacement ``beta_k * sqrt(V)`` from the site-averaged form factor.

    The coupling amplitude is taken as ``|kappa_k|``: with the factor ``i``
    kept, ``(1/V) sum_k kappa_k F(k) (b_k + b_-k^+)`` is anti-Hermitian and the
    energy shift would vanish identically.
    """
    kmag = np.asarray(kmag, dtype=float)
    omega = material.sound_speed * kmag
    mean_ff = 0.5 * (
        form_factor_polar(kmag, kz, "+", geometry) + form_factor_polar(kmag, kz, "-", geometry)
    )
    coupling = np.abs(kappa_scaled(kmag, material))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(kmag > 0, coupling * np.conj(mean_ff) / (HBAR * np.where(kmag > 0, omega, 1.0)), 0.0)


@dataclass(frozen=True)
class SpectralKernel:
    """Material plus geometry, with the k-space evaluators bound to them."""

    material: Material
    geometry: Geometry

    def kappa(self, kmag):
        return kappa_scaled(kmag, self.material)

    def form_factor(self, k, site):
        return form_factor(k, site, self.geometry)

    def g(self, k):
        return interaction_rate(k, self.material, self.geometry)

    def alpha(self, k):
        kmag, kz = _split(k)
        return displacement_polar(kmag, kz, self.material, self.geometry)

    def beta(self, k):
        kmag, kz = _split(k)
        return shift_displacement_polar(kmag, kz, self.material, self.geometry)
