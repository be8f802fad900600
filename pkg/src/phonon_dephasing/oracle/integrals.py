"""Numerical ground truth for the decoherence rate, the phonon phase and the
phonon-induced level shift.

Two independent reductions of the thermal mode sum are provided:

* a radial route, integrating the angle-averaged integrand over the
  dimensionless wave number ``u = k d`` (``gamma_oracle_radial``), and
* a two-dimensional route over ``(|k|, cos theta)`` that builds ``|alpha_k|^2``
  from the k-space kernels in SI units (``gamma_oracle_3d``).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, optimize

from ..params import HBAR, K_B, ParameterError
from ..rates import RateParams, gamma
from .kernel import (
    SpectralKernel,
    displacement_polar,
    form_factor_polar,
    kappa_scaled,
    shift_displacement_polar,
)
from .quadrature import (
    QuadratureConfig,
    QuadratureError,
    QuadResult,
    gauss_legendre,
    integrate_panels,
    oscillation_edges,
)

DEFAULT_QUAD = QuadratureConfig()


def _lorentz(u, eta):
    return 1.0 / (1.0 + (0.5 * u * eta) ** 2) ** 2


def _cutoff(envelope, eta_small, ratio):
    """Wave number beyond which ``envelope`` stays below ``ratio`` times its peak."""
    grid = np.geomspace(1e-3, 1e3, 2001) * (2 / eta_small)
    values = envelope(grid)
    peak_at = int(np.argmax(values))
    peak = values[peak_at]
    lo = grid[peak_at]
    hi = lo * 10
    while envelope(hi) > ratio * peak:
        hi *= 10
    root = optimize.brentq(lambda u: math.log(envelope(u)) - math.log(ratio * peak), lo, hi, xtol=1e-6)
    return root, peak


def _tail_bound(envelope, u_cut, power):
    # envelope ~ u^-power beyond the cutoff
    return envelope(u_cut) * u_cut / (power - 1)


def _times(t):
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0) or not np.all(np.isfinite(t_arr)):
        raise ParameterError("times must be finite and non-negative")
    return t_arr


def _unwrap(results, t):
    return results[0] if np.ndim(t) == 0 else results


# -- radial route ------------------------------------------------------------------


def radial_integral(x, eta_plus, eta_minus, quad: QuadratureConfig = DEFAULT_QUAD):
    """Dimensionless radial integral shared by the rate and the phase.

    Returns, for each ``x = t / tau_d``,
    ``int_0^inf du { u sin(x u) sum_a L_a(u)^2
    + [cos(|1+x| u) - cos(|1-x| u)] L_+(u) L_-(u) }`` with
    ``L_a(u) = [1 + (u eta_a / 2)^2]^-2``.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    eta_small, eta_large = min(eta_plus, eta_minus), max(eta_plus, eta_minus)

    def envelope(u):
        lp, lm = _lorentz(u, eta_plus), _lorentz(u, eta_minus)
        return u * (lp**2 + lm**2) + 2 * lp * lm

    u_cut, _ = _cutoff(envelope, eta_small, quad.cutoff_ratio)
    tail = _tail_bound(envelope, u_cut, 7)
    out = []
    for xi in xs:
        if xi == 0:
            # both lines vanish identically
            out.append(QuadResult(0.0, 0.0, 0, u_cut))
            continue

        # cos((1 + x) u) - cos((1 - x) u) = -2 sin(u) sin(x u)
        def integrand(u, xi=xi):
            lp, lm = _lorentz(u, eta_plus), _lorentz(u, eta_minus)
            return np.sin(xi * u) * (u * (lp**2 + lm**2) - 2 * np.sin(u) * lp * lm)

        edges = oscillation_edges(u_cut, 1 + xi, 2 / eta_large)
        out.append(integrate_panels(integrand, edges, quad, tail_error=tail)[0])
    return out


def gamma_oracle_radial(t, p: RateParams, quad: QuadratureConfig = DEFAULT_QUAD):
    """Decoherence rate by quadrature of the angle-integrated mode sum.

    Returns a :class:`QuadResult` (value and error in s^-1) for scalar ``t`` and
    a list of them for array ``t``.
    """
    t_arr = _times(t)
    scale = p.Gamma_T / math.pi
    raw = radial_integral(t_arr / p.tau_d, p.eta_plus, p.eta_minus, quad)
    res = [QuadResult(scale * r.value, scale * r.error, r.panels, r.cutoff) for r in raw]
    return _unwrap(res, t)


def phase_phi(t, kernel: SpectralKernel, quad: QuadratureConfig = DEFAULT_QUAD):
    """Phonon phase ``sum_k |alpha_k|^2 sin(omega_k t)`` in radians."""
    t_arr = _times(t)
    mat, geo = kernel.material, kernel.geometry
    s = mat.sound_speed
    prefactor = mat.deformation_constant**2 / (
        4 * math.pi**2 * HBAR * mat.mass_density * s**3 * geo.d**2
    )
    raw = radial_integral(t_arr * s / geo.d, geo.eta_plus, geo.eta_minus, quad)
    res = [QuadResult(prefactor * r.value, prefactor * r.error, r.panels, r.cutoff) for r in raw]
    return _unwrap(res, t)


# -- (|k|, cos theta) route --------------------------------------------------------


def _angular_orders(u):
    """Two Gauss-Legendre orders resolving ``cos(u c)`` on ``[-1, 1]``."""
    cube = np.cbrt(u)
    return _bucket(0.5 * u + 3 * cube + 16), _bucket(0.5 * u + 4.5 * cube + 24)


def _bucket(n):
    # round up onto ~16 orders per octave so cached rules get reused
    step = np.maximum(8, 2.0 ** (np.floor(np.log2(np.maximum(n, 1))) - 4))
    return (np.ceil(n / step) * step).astype(int)


def _angular_integral(func, u, orders):
    """``int_{-1}^{1} func(u, c) dc`` for each ``u``, nodes grouped by order."""
    out = np.empty(u.shape, dtype=complex)
    for n in np.unique(orders):
        sel = orders == n
        c, w = gauss_legendre(int(n))
        vals = func(u[sel][:, None], c[None, :])
        out[sel] = vals @ w
    return out


def _squared_displacement(kernel: SpectralKernel):
    mat, geo = kernel.material, kernel.geometry

    def func(u, c):
        kmag = u / geo.d
        a = displacement_polar(np.broadcast_to(kmag, np.broadcast(u, c).shape), kmag * c, mat, geo)
        return np.abs(a) ** 2

    return func


def gamma_oracle_3d(t, kernel: SpectralKernel, T: float, quad: QuadratureConfig = DEFAULT_QUAD):
    """Decoherence rate from ``(2 k_B T / hbar) sum_k |alpha_k|^2 sin(omega_k t)``.

    The mode sum is integrated over ``|k|`` and ``cos theta`` numerically, the
    azimuth analytically. Returns :class:`QuadResult` values in s^-1.
    """
    if not T >= 0:
        raise ParameterError(f"temperature must be >= 0, got {T!r}")
    t_arr = _times(t)
    mat, geo = kernel.material, kernel.geometry
    xs = t_arr * mat.sound_speed / geo.d
    eta_p, eta_m = geo.eta_plus, geo.eta_minus
    prefactor = (2 * K_B * T / HBAR) * 2 * math.pi / (2 * math.pi) ** 3 / geo.d**3

    def envelope(u):
        lp, lm = _lorentz(u, eta_p), _lorentz(u, eta_m)
        return u * (lp + lm) ** 2

    u_cut, peak = _cutoff(envelope, min(eta_p, eta_m), quad.cutoff_ratio)
    tail = _tail_bound(envelope, u_cut, 7)
    sq = _squared_displacement(kernel)
    # unit conversion of the envelope to the integrand below
    env_to_integrand = (mat.deformation_constant / (HBAR * mat.sound_speed)) ** 2 * HBAR / (
        2 * mat.mass_density * mat.sound_speed
    ) * geo.d * 2

    def shell(u):
        low, high = _angular_orders(u)
        # the cross term is negligible once its envelope drops below the cutoff
        cross = 2 * u * _lorentz(u, eta_p) * _lorentz(u, eta_m)
        quiet = cross < quad.cutoff_ratio * peak
        low = np.where(quiet, 8, low)
        high = np.where(quiet, 16, high)
        a = _angular_integral(sq, u, low).real
        b = _angular_integral(sq, u, high).real
        return u**2 * b, u**2 * np.abs(b - a)

    nonzero = xs > 0
    results = [QuadResult(0.0, 0.0, 0, u_cut) for _ in xs]
    if nonzero.any():
        active = xs[nonzero]
        omega = active.max() + 1

        def integrand(u):
            values, errs = shell(u)
            phases = np.sin(active[:, None] * u[None, :])
            return phases * values[None, :], np.abs(phases) * errs[None, :]

        edges = oscillation_edges(u_cut, omega, 2 / max(eta_p, eta_m))
        tail_abs = tail * env_to_integrand
        raw = integrate_panels(integrand, edges, quad, m=len(active), tail_error=tail_abs)
        for slot, r in zip(np.flatnonzero(nonzero), raw):
            results[slot] = QuadResult(prefactor * r.value, prefactor * r.error, r.panels, r.cutoff)
    return _unwrap(results, t)


# -- level shift -------------------------------------------------------------------


def energy_shift(kernel: SpectralKernel, quad: QuadratureConfig = DEFAULT_QUAD, with_imag=False):
    """Phonon-induced change of the transition frequency, rad/s.

    Evaluates ``-(1/(hbar V)) sum_k kappa_k f(k) (beta_k + beta_-k^*)`` with
    ``f = F_+ - F_-`` over ``(|k|, cos theta)``. Returns a :class:`QuadResult`,
    or a ``(real, imaginary)`` pair of them when ``with_imag`` is set.

    Raises
    ------
    QuadratureError
        If the imaginary part of the mode sum exceeds ``1e-8`` of its modulus.
    """
    mat, geo = kernel.material, kernel.geometry
    eta_p, eta_m = geo.eta_plus, geo.eta_minus

    def summand(u, c):
        kmag = np.broadcast_to(u / geo.d, np.broadcast(u, c).shape)
        kz = kmag * c
        diff = form_factor_polar(kmag, kz, "+", geo) - form_factor_polar(kmag, kz, "-", geo)
        coupling = np.abs(kappa_scaled(kmag, mat))
        beta = shift_displacement_polar(kmag, kz, mat, geo)
        beta_reflected = np.conj(shift_displacement_polar(kmag, -kz, mat, geo))
        return coupling * diff * (beta + beta_reflected)

    def majorant(u, c):
        kmag = np.broadcast_to(u / geo.d, np.broadcast(u, c).shape)
        sizes = [np.abs(form_factor_polar(kmag, 0 * kmag, a, geo)) for a in "+-"]
        coupling = np.abs(kappa_scaled(kmag, mat))
        beta = np.abs(shift_displacement_polar(kmag, 0 * kmag, mat, geo))
        return coupling * (sizes[0] + sizes[1]) * 2 * beta

    def envelope(u):
        lp, lm = _lorentz(u, eta_p), _lorentz(u, eta_m)
        return u**2 * (lp + lm) ** 2

    u_cut, _ = _cutoff(envelope, min(eta_p, eta_m), quad.cutoff_ratio)
    # oscillating parts of the summand are odd in cos(theta), so symmetric
    # rules integrate them exactly; only the even envelope needs resolving
    orders_low, orders_high = 8, 16

    def integrand(u):
        low = _angular_integral(summand, u, np.full(u.shape, orders_low))
        high = _angular_integral(summand, u, np.full(u.shape, orders_high))
        size = _angular_integral(majorant, u, np.full(u.shape, orders_low))
        vals = u**2 * high
        errs = u**2 * np.abs(high - low)
        # third row only sets the tolerance scale when the shift cancels
        return np.stack([vals.real, vals.imag, u**2 * size.real]), np.stack([errs, errs, 0 * errs])

    edges = oscillation_edges(u_cut, 0.0, 2 / max(eta_p, eta_m))
    # |kappa|^2 / (hbar omega) = D^2 / (2 rho s^2) bounds the summand per envelope unit
    tail = _tail_bound(envelope, u_cut, 6) * mat.deformation_constant**2 / (
        2 * mat.mass_density * mat.sound_speed**2
    )
    re, im, _ = integrate_panels(integrand, edges, quad, m=3, tail_error=tail, joint=True)
    prefactor = -(1 / HBAR) * 2 * math.pi / (2 * math.pi) ** 3 / geo.d**3
    total = abs(complex(re.value, im.value))
    if total > 0 and abs(im.value) > max(1e-8 * total, im.error):
        raise QuadratureError(
            f"level shift has imaginary residue {im.value:.3g} vs modulus {total:.3g}",
            value=prefactor * re.value,
            error=abs(prefactor) * re.error,
        )
    real = QuadResult(prefactor * re.value, abs(prefactor) * re.error, re.panels, re.cutoff)
    if with_imag:
        return real, QuadResult(prefactor * im.value, abs(prefactor) * im.error, im.panels, im.cutoff)
    return real


# -- time integral of the closed form ----------------------------------------------


def integrate_rate(t, p: RateParams, quad: QuadratureConfig = DEFAULT_QUAD, start=0.0):
    """``int_start^t gamma(t') dt'`` of the closed-form rate (dimensionless).

    The interval is split at ``t = tau_d`` where the rate has a kink.
    """
    if not 0 <= start <= t:
        raise ParameterError(f"need 0 <= start <= t, got start={start!r}, t={t!r}")
    x0, x1 = start / p.tau_d, t / p.tau_d
    pieces = [x0, x1]
    if x0 < 1 < x1:
        pieces = [x0, 1.0, x1]

    def rate_hat(x):
        return gamma(x * p.tau_d, p) / p.Gamma_T

    total, err = [], 0.0
    for a, b in zip(pieces[:-1], pieces[1:]):
        if b == a:
            continue
        hints = [h for h in (p.eta_plus, p.eta_minus, 1 - 3 * p.eta) if a < h < b]
        value, e, info = integrate.quad(
            rate_hat,
            a,
            b,
            points=hints or None,
            epsabs=quad.abs_tol,
            epsrel=max(quad.rel_tol * 1e-3, 1e-14),
            limit=500,
            full_output=True,
        )[:3]
        if e > max(quad.abs_tol, 1e-12 * abs(value), 1e-15):
            raise QuadratureError(
                f"time integral on [{a}, {b}] did not converge (error {e:.3g})", value=value, error=e
            )
        total.append(value)
        err += e
    scale = p.Gamma_T * p.tau_d
    return QuadResult(scale * math.fsum(total), scale * err)
