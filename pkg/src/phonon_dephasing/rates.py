"""Closed-form decoherence rates, decay functions and coherence times.

All rate functions accept a scalar or array time ``t`` in seconds and return
values in s^-1 with the same shape. Internally everything is evaluated on the
dimensionless time ``x = t / tau_d`` and in units of ``Gamma_T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import mpmath
import numpy as np

from .params import DerivedScales, ElectronicLevels, InitialState, ParameterError

PAIRS = (("+", "-"), ("-", "+"))

# Below this relative spread the non-degenerate formula loses more than
# ~1e-10 to cancellation in float64 and is evaluated with mpmath instead.
_EXTENDED_PRECISION_SIGMA = 1e-2


class DegeneracyError(ValueError):
    """The two Bohr radii are too close for the non-degenerate closed form."""


@dataclass(frozen=True)
class RateParams:
    """Inputs of the closed-form rate family.

    ``tau_d`` and ``Gamma_T`` default to 1 so that, with ``t`` given in units of
    ``tau_d``, every rate comes out as the dimensionless ratio ``gamma / Gamma_T``.
    """

    eta_plus: float
    eta_minus: float
    tau_d: float = 1.0
    Gamma_T: float = 1.0
    degeneracy_threshold: float = 1e-4

    def __post_init__(self):
        for name in ("eta_plus", "eta_minus"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ParameterError(f"{name} must lie in (0, 1), got {value!r}")
        if not self.tau_d > 0:
            raise ParameterError(f"tau_d must be positive, got {self.tau_d!r}")
        if not self.Gamma_T > 0:
            raise ParameterError(f"Gamma_T must be positive, got {self.Gamma_T!r}")
        if not 0 < self.degeneracy_threshold < 1e-2:
            raise ParameterError(
                f"degeneracy_threshold must lie in (0, 1e-2), got {self.degeneracy_threshold!r}"
            )

    @classmethod
    def from_shape(cls, eta, sigma=0.0, **kwargs):
        """From the mean relative radius and the relative difference ``(eta+ - eta-)/eta``."""
        return cls(eta * (1 + sigma / 2), eta * (1 - sigma / 2), **kwargs)

    @classmethod
    def from_scales(cls, scales: DerivedScales, T: float, **kwargs):
        return cls(
            scales.eta_plus,
            scales.eta_minus,
            tau_d=scales.tau_d,
            Gamma_T=scales.gamma_T(T),
            **kwargs,
        )

    @property
    def eta(self) -> float:
        return 0.5 * (self.eta_plus + self.eta_minus)

    @property
    def sigma(self) -> float:
        return (self.eta_plus - self.eta_minus) / self.eta

    @property
    def degenerate(self) -> bool:
        return abs(self.sigma) < self.degeneracy_threshold

    def etas(self, pair):
        lookup = {"+": self.eta_plus, "-": self.eta_minus}
        a, b = pair
        if (a, b) not in PAIRS:
            raise ValueError(f"pair must be one of {PAIRS}, got {pair!r}")
        return lookup[a], lookup[b]


@dataclass(frozen=True)
class Curve:
    """Sampled series ``values(abscissa)``, abscissa in units of ``tau_d``."""

    abscissa: np.ndarray
    values: np.ndarray
    label: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.abscissa, dtype=float)
        y = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != y.shape:
            raise ValueError("abscissa and values must be 1-D arrays of equal length")
        if np.any(np.diff(x) <= 0):
            raise ValueError("abscissa must be strictly increasing")
        object.__setattr__(self, "abscissa", x)
        object.__setattr__(self, "values", y)


def _as_x(t, p: RateParams):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ParameterError("times must be non-negative")
    return t / p.tau_d


def _shaped(values, like):
    return float(values) if np.ndim(like) == 0 else values


# -- non-degenerate pair terms ---------------------------------------------------


def _pair_hat(x, ea, eb):
    """gamma_ab / Gamma_T for arrays of x, float64."""
    y = x / ea
    first = (y**3 / 3 + y**2 / 2 + y / 4) * np.exp(-2 * y)
    c = (ea**2 / (ea**2 - eb**2)) ** 2
    k = 0.5 * ea * (ea**2 - 5 * eb**2) / (ea**2 - eb**2)
    ahead = np.abs(1 + x)
    behind = np.abs(1 - x)
    second = c * (ahead + k) * np.exp(-2 * ahead / ea)
    third = c * (behind + k) * np.exp(-2 * behind / ea)
    return (first + second - third) / ea**2


def _pair_hat_mp(x, ea, eb, dps):
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        ea = mpmath.mpf(ea)
        eb = mpmath.mpf(eb)
        y = x / ea
        first = (y**3 / 3 + y**2 / 2 + y / 4) * mpmath.exp(-2 * y)
        diff = ea**2 - eb**2
        c = (ea**2 / diff) ** 2
        k = ea * (ea**2 - 5 * eb**2) / (2 * diff)
        ahead = abs(1 + x)
        behind = abs(1 - x)
        second = c * (ahead + k) * mpmath.exp(-2 * ahead / ea)
        third = c * (behind + k) * mpmath.exp(-2 * behind / ea)
        return (first + second - third) / ea**2


def _sum_pairs_mp(x, ea, eb, dps):
    # sum before rounding so the cancellation between pairs stays exact
    with mpmath.workdps(dps):
        return float(_pair_hat_mp(x, ea, eb, dps) + _pair_hat_mp(x, eb, ea, dps))


def _extended_dps(sigma):
    return 25 + int(math.ceil(3 * math.log10(1 / abs(sigma))))


def gamma_ab(t, pair, p: RateParams):
    """Contribution of the ordered site pair ``(a, b)`` to the decoherence rate.

    Only defined for distinct radii; raises :class:`DegeneracyError` otherwise.
    """
    if p.degenerate:
        raise DegeneracyError(
            f"relative spread sigma={p.sigma:.3g} is below the degeneracy threshold "
            f"{p.degeneracy_threshold:.3g}; use gamma() or gamma0()"
        )
    ea, eb = p.etas(pair)
    x = _as_x(t, p)
    if abs(p.sigma) < _EXTENDED_PRECISION_SIGMA:
        dps = _extended_dps(p.sigma)
        flat = [float(_pair_hat_mp(xi, ea, eb, dps)) for xi in np.ravel(x)]
        hat = np.reshape(flat, np.shape(x))
    else:
        hat = _pair_hat(x, ea, eb)
    return _shaped(p.Gamma_T * hat, t)


def gamma0(t, p: RateParams):
    """Decoherence rate for equal Bohr radii, evaluated at the mean ``eta``."""
    eta = p.eta
    x = _as_x(t, p)
    y = x / eta

    def bracket(z):
        return (z**3 / 6 + z**2 / 2 + 5 * z / 8 + 5 / 16) * np.exp(-2 * z)

    first = (2 * y**3 / 3 + y**2 + y / 2) * np.exp(-2 * y)
    hat = (first + eta * bracket(np.abs(1 + x) / eta) - eta * bracket(np.abs(1 - x) / eta)) / eta**2
    return _shaped(p.Gamma_T * hat, t)


def gamma(t, p: RateParams):
    """Total decoherence rate; falls back to :func:`gamma0` for degenerate radii."""
    if p.degenerate:
        return gamma0(t, p)
    x = _as_x(t, p)
    ea, eb = p.eta_plus, p.eta_minus
    if abs(p.sigma) < _EXTENDED_PRECISION_SIGMA:
        dps = _extended_dps(p.sigma)
        flat = [_sum_pairs_mp(xi, ea, eb, dps) for xi in np.ravel(x)]
        hat = np.reshape(flat, np.shape(x))
    else:
        hat = _pair_hat(x, ea, eb) + _pair_hat(x, eb, ea)
    return _shaped(p.Gamma_T * hat, t)


# -- decay functions ----------------------------------------------------------------


def peak_kernels(x):
    """Kernels ``A`` and ``B`` accumulating the positive and negative rate peaks."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ParameterError("peak kernels are defined for x >= 0")
    decay = np.exp(-2 * x)
    A = np.pi * (1.25 - (2 * x**3 / 3 + 2 * x**2 + 2.5 * x + 1.25) * decay)
    B = np.pi * (x**3 / 6 + 0.75 * x**2 + 11 * x / 8 + 1) * decay
    return _shaped(A, x), _shaped(B, x)


def ln_G0(x, p: RateParams):
    """Logarithm of the decay profile at ``T = T0`` for equal radii (mean ``eta``)."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise ParameterError("x must be non-negative")
    eta = p.eta

    def A(z):
        return peak_kernels(z)[0]

    def B(z):
        return peak_kernels(z)[1]

    before = x_arr < 1
    after_arg = np.where(before, 0.0, x_arr - 1)
    before_arg = np.where(before, 1 - x_arr, 0.0)
    total = A(x_arr / eta) / eta + B(1 / eta) - B((1 + x_arr) / eta)
    total = total + np.where(
        before,
        B(1 / eta) - B(before_arg / eta),
        B(1 / eta) + B(after_arg / eta) - 2 * B(0.0),
    )
    return _shaped(-total, x)


def _ln_decay_profile(x, p: RateParams):
    """ln G0(x) for the actual radii: closed form if degenerate, else quadrature."""
    if p.degenerate:
        return np.asarray(ln_G0(x, p), dtype=float)
    from .oracle import integrate_rate

    unit = replace(p, tau_d=1.0, Gamma_T=1.0)
    x = np.asarray(x, dtype=float)
    flat = np.ravel(x)
    order = np.argsort(flat, kind="stable")
    out = np.empty_like(flat)
    running = 0.0
    previous = 0.0
    for idx in order:
        running += integrate_rate(flat[idx], unit, start=previous).value
        previous = flat[idx]
        out[idx] = -2 * np.pi * running
    return out.reshape(x.shape)


def decay(t, T: float, p: RateParams, scales: DerivedScales):
    """Coherence decay function ``g(t) = G0(t / tau_d) ** (T / T0)``."""
    if not T >= 0:
        raise ParameterError(f"temperature must be >= 0, got {T!r}")
    x = _as_x(t, p)
    log_g = (T / scales.T0) * _ln_decay_profile(x, p)
    return _shaped(np.exp(log_g), t)


def coherence_element(t, T, state: InitialState, levels: ElectronicLevels, p, scales, phi):
    """Off-diagonal element ``<g|rho(t)|e>``.

    ``phi`` is a callable returning the phonon phase at time ``t``; see
    :func:`phonon_dephasing.oracle.phase_phi`.
    """
    t_arr = np.asarray(t, dtype=float)
    phase = np.exp(1j * (levels.omega0 * t_arr - np.asarray(phi(t_arr))))
    value = state.coherence_prefactor * phase * decay(t_arr, T, p, scales)
    return complex(value) if np.ndim(t) == 0 else value


def mean_rate(p: RateParams, scales: DerivedScales, T: float) -> float:
    """Rate averaged over the first transit time, ``(1/tau_d) * int_0^tau_d gamma``."""
    if not T > 0:
        raise ParameterError(f"mean rate requires T > 0, got {T!r}")
    from .oracle import integrate_rate

    at_T = replace(p, tau_d=scales.tau_d, Gamma_T=scales.gamma_T(T))
    return integrate_rate(scales.tau_d, at_T).value / scales.tau_d


@dataclass(frozen=True)
class CoherenceTime:
    value: float
    method: str
    warnings: tuple = ()


def coherence_time(p: RateParams, scales: DerivedScales, T: float, method="numeric"):
    """Coherence time ``1 / mean_rate`` or its small-``eta`` asymptotic form.

    Returns ``inf`` at ``T = 0``.
    """
    if method not in ("numeric", "asymptotic"):
        raise ValueError(f"method must be 'numeric' or 'asymptotic', got {method!r}")
    if not T >= 0:
        raise ParameterError(f"temperature must be >= 0, got {T!r}")
    notes = []
    if method == "asymptotic":
        if not p.degenerate:
            notes.append(f"asymptotic form assumes equal radii; sigma={p.sigma:.3g}")
        if p.eta > 0.2:
            notes.append(f"asymptotic form assumes eta << 1; eta={p.eta:.3g}")
    if T == 0:
        return CoherenceTime(math.inf, method, tuple(notes))
    if method == "asymptotic":
        # R / s = eta * tau_d
        value = 4 / (5 * math.pi) * p.eta * scales.tau_d * scales.T0 / T
    else:
        value = 1 / mean_rate(p, scales, T)
    return CoherenceTime(value, method, tuple(notes))
