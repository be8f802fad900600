"""Curve sets behind the three published figures.

All three are dimensionless, so they are generated on unit scales
(``tau_d = 1``, ``T0 = 1``) and do not depend on the material.
"""

from __future__ import annotations

import math

import numpy as np

from .params import DerivedScales
from .rates import Curve, RateParams, decay, gamma

FIGURES = ("fig1", "fig2", "fig3")
DEFAULT_SAMPLES = 600
T_MAX = 3.0

_RATE_SETS = {
    "fig1": [(0.1, 1.0), (0.1, 0.5), (0.1, 0.1)],
    "fig2": [(0.1, 0.1), (0.08, 0.1), (0.05, 0.1)],
}
_FIG3_ETA = 0.1
_FIG3_RATIOS = (0.1, 0.02, 0.01, 0.002)

TITLES = {
    "fig1": ("Dimensionless decoherence rate, eta = 0.1", "gamma / Gamma_T"),
    "fig2": ("Dimensionless decoherence rate, sigma = 0.1", "gamma / Gamma_T"),
    "fig3": ("Decoherence function, eta = 0.1, sigma = 0", "g(t)"),
}


def sample_times(samples=DEFAULT_SAMPLES, t_max=T_MAX):
    if samples < 2:
        raise ValueError("need at least two samples")
    return np.linspace(0.0, t_max, samples)


def rate_curve(eta, sigma, x):
    """``gamma / Gamma_T`` on unit scales."""
    p = RateParams.from_shape(eta, sigma)
    return Curve(x, gamma(x, p), f"eta={eta:g} sigma={sigma:g}", {"eta": eta, "sigma": sigma})


def decay_curve(eta, sigma, ratio, x):
    """``g(t)`` at ``T = ratio * T0`` on unit scales."""
    p = RateParams.from_shape(eta, sigma)
    unit = DerivedScales(1.0, 2 * math.pi, p.eta_plus, p.eta_minus, 1.0)
    return Curve(x, decay(x, ratio, p, unit), f"T/T0={ratio:g}", {"eta": eta, "sigma": sigma, "T_over_T0": ratio})


def figure_curves(fig_id, samples=DEFAULT_SAMPLES):
    """Curves of one figure plus header metadata.

    Raises
    ------
    ValueError
        For an unknown figure id.
    """
    if fig_id not in FIGURES:
        raise ValueError(f"unknown figure {fig_id!r}; choose from {', '.join(FIGURES)}")
    x = sample_times(samples)
    meta = {"figure": fig_id, "samples": samples, "t_max_over_tau_d": T_MAX}
    if fig_id == "fig3":
        curves = [decay_curve(_FIG3_ETA, 0.0, r, x) for r in _FIG3_RATIOS]
        meta["quantity"] = "g"
    else:
        curves = [rate_curve(eta, sigma, x) for eta, sigma in _RATE_SETS[fig_id]]
        meta["quantity"] = "gamma_over_Gamma_T"
    return curves, meta
