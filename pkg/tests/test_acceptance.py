"""Acceptance criteria; each test logs one PASS/FAIL line to the terminal summary."""

import math
import time

import numpy as np
import pytest

from phonon_dephasing.cli import main
from phonon_dephasing.compare import DEFAULT_ETAS, DEFAULT_SIGMAS
from phonon_dephasing.figures import sample_times
from phonon_dephasing.oracle import QuadratureConfig, SpectralKernel, energy_shift, gamma_oracle_3d, gamma_oracle_radial, integrate_rate
from phonon_dephasing.oracle import quadrature
from phonon_dephasing.output import read_csv
from phonon_dephasing.params import DerivedScales, Geometry, derive_scales, material_preset
from phonon_dephasing.rates import RateParams, decay, gamma, gamma0, ln_G0, mean_rate

SI = material_preset("Si")
# frozen oracle output: Si, d = 10 nm, R_+ = 1.5 nm, R_- = 1 nm, default quadrature
SHIFT_GOLDEN = 1335428284585.617
T0_GOLDEN = 2560.5723117017678


def verdict(log, number, ok, detail):
    line = f"AC{number:02d} {'PASS' if ok else 'FAIL'}  {detail}"
    log.append(line)
    print(line)
    assert ok, line


def test_ac01_oracle_equivalence(default_compare, acceptance_log):
    report, elapsed = default_compare
    assert tuple(float(v) for v in report.grid["etas"].split()) == DEFAULT_ETAS
    assert tuple(float(v) for v in report.grid["sigmas"].split()) == DEFAULT_SIGMAS
    assert report.grid["points"] == 300
    ok = report.nonconverged == 0 and report.max_deviation <= 1e-6 and elapsed < 60
    verdict(
        acceptance_log,
        1,
        ok,
        f"closed form vs radial oracle: max deviation {report.max_deviation:.2e} <= 1e-6 "
        f"over {len(report.rows)} points in {elapsed:.1f} s (< 60 s)",
    )


def test_ac02_reduction_equivalence(acceptance_log):
    start = time.perf_counter()
    worst = -math.inf
    for sigma in (0.0, 0.5):
        geo = Geometry.from_shape(10e-9, 0.1, sigma)
        scales = derive_scales(SI, geo)
        T = 300.0
        p = RateParams.from_scales(scales, T)
        t = np.array([0.05, 0.5, 1.0, 2.0]) * scales.tau_d
        full = gamma_oracle_3d(t, SpectralKernel(SI, geo), T)
        radial = gamma_oracle_radial(t, p)
        for a, b in zip(full, radial):
            worst = max(worst, abs(a.value - b.value) / (a.error + b.error))
    elapsed = time.perf_counter() - start
    verdict(
        acceptance_log,
        2,
        worst <= 1 and elapsed < 120,
        f"3D vs radial oracle at 8 points: max |diff| / summed error = {worst:.3f} <= 1 in {elapsed:.1f} s (< 120 s)",
    )


def test_ac03_endpoints(acceptance_log):
    start_worst, late_worst = 0.0, 0.0
    for eta in (0.02, 0.05, 0.1, 0.2):
        for sigma in (0.0, 0.1, 0.5, 1.0):
            p = RateParams.from_shape(eta, sigma)
            start_worst = max(start_worst, abs(gamma(0.0, p)) / p.Gamma_T)
            late_worst = max(late_worst, abs(gamma(50 * p.tau_d, p)) / p.Gamma_T)
    verdict(
        acceptance_log,
        3,
        start_worst < 1e-10 and late_worst < 1e-6,
        f"|gamma(0)|/Gamma_T = {start_worst:.1e} < 1e-10, |gamma(50 tau_d)|/Gamma_T = {late_worst:.1e} < 1e-6",
    )


def test_ac04_sigma_squared(acceptance_log):
    x = np.linspace(0, 3, 601)
    ref = gamma0(x, RateParams.from_shape(0.1, 0.0))
    sigmas = np.array([1e-2, 5e-3, 2.5e-3])
    devs = [np.max(np.abs(gamma(x, RateParams.from_shape(0.1, s)) - ref)) for s in sigmas]
    order = np.polyfit(np.log(sigmas), np.log(devs), 1)[0]
    verdict(acceptance_log, 4, order >= 1.9, f"fitted order of |gamma(sigma) - gamma0| = {order:.4f} >= 1.9")


def test_ac05_G0_identity(acceptance_log):
    worst = 0.0
    for eta in (0.05, 0.1):
        p = RateParams.from_shape(eta, 0.0)
        for x in (0.5, 1.0, 2.0, 5.0):
            numeric = -2 * math.pi * integrate_rate(x, p).value
            worst = max(worst, abs(numeric / ln_G0(x, p) - 1))
    verdict(acceptance_log, 5, worst <= 1e-8, f"ln G0 closed form vs time integral: max relative error {worst:.1e} <= 1e-8")


def test_ac06_scaling_law(acceptance_log):
    p = RateParams.from_shape(0.1, 0.0)
    unit = DerivedScales(1.0, 2 * math.pi, p.eta_plus, p.eta_minus, 1.0)
    x = sample_times()
    T1, T2 = 0.1, 0.002
    g1, g2 = decay(x, T1, p, unit), decay(x, T2, p, unit)
    worst = np.max(np.abs(g1 ** (T2 / T1) / g2 - 1))
    verdict(acceptance_log, 6, worst <= 1e-10, f"decay(T1)^(T2/T1) vs decay(T2): max relative error {worst:.1e} <= 1e-10")


def test_ac07_coherence_time(acceptance_log):
    geo = Geometry.from_shape(10e-9, 0.01)
    scales = derive_scales(SI, geo)
    T = scales.T0
    p = RateParams.from_scales(scales, T)
    numeric = 1 / mean_rate(p, scales, T)
    formula = 4 / (5 * math.pi) * (geo.R_plus / SI.sound_speed) * scales.T0 / T
    rel = abs(numeric / formula - 1)
    verdict(acceptance_log, 7, rel <= 0.1, f"1/mean_rate vs (4/5pi)(R/s)(T0/T) at eta=0.01: relative gap {rel:.3%} <= 10%")


def test_ac08_material_scales(acceptance_log):
    scales = derive_scales(SI, Geometry.from_nm(10, 1, 1))
    tau_ps = scales.tau_d * 1e12
    ok = 1.0 <= tau_ps <= 1.2 and 1e3 <= scales.T0 <= 1e4 and scales.T0 == pytest.approx(T0_GOLDEN, rel=1e-12)
    verdict(acceptance_log, 8, ok, f"Si, d = 10 nm: tau_d = {tau_ps:.4f} ps in [1.0, 1.2], T0 = {scales.T0:.2f} K in [1e3, 1e4]")


def _figure_table(fig, tmp_path):
    path = tmp_path / f"{fig}.csv"
    assert main(["figure", fig, "--out", str(path)]) == 0
    return read_csv(path.read_text())


def _interior_minima(values, flat=1e-12):
    # steps below the flatness threshold count as level (plateau roundoff)
    steps = np.diff(values)
    signs = np.where(np.abs(steps) <= flat * np.abs(values[1:]), 0, np.sign(steps))
    signs = signs[signs != 0]
    return int(np.sum((signs[:-1] < 0) & (signs[1:] > 0)))


def test_ac09_figures(tmp_path, acceptance_log):
    problems = []
    for fig in ("fig1", "fig2"):
        _, labels, table = _figure_table(fig, tmp_path)
        x = table[:, 0]
        for j, label in enumerate(labels[1:], start=1):
            fields = dict(item.split("=") for item in label.split())
            eta, sigma = float(fields["eta"]), float(fields["sigma"])
            eta_min = eta * (1 - abs(sigma) / 2)
            t_max, t_min = x[np.argmax(table[:, j])], x[np.argmin(table[:, j])]
            if not 0.5 * eta_min <= t_max <= 2 * eta_min:
                problems.append(f"{fig} {label}: argmax {t_max:.3f} vs eta_min {eta_min:.3f}")
            if abs(t_min - 1) > 0.2:
                problems.append(f"{fig} {label}: argmin {t_min:.3f}")
    _, labels, table = _figure_table("fig3", tmp_path)
    x = table[:, 0]
    plateaus = []
    for j, label in enumerate(labels[1:], start=1):
        g = table[:, j]
        i = int(np.argmin(g))
        if _interior_minima(g) != 1 or not 0.5 < x[i] < 1.5 or not g[-1] > g[i]:
            problems.append(f"fig3 {label}: minimum structure")
        plateaus.append(g[-1])
    # columns are ordered by decreasing temperature
    if not np.all(np.diff(plateaus) > 0):
        problems.append("fig3 plateaus not increasing as T decreases")
    verdict(
        acceptance_log,
        9,
        not problems,
        "figure structure: peaks near eta_min tau_d, dips near tau_d, one fig3 minimum, ordered plateaus"
        + (f"; {problems}" if problems else ""),
    )


def test_ac10_energy_shift(monkeypatch, acceptance_log):
    geo = Geometry.from_nm(10, 1.5, 1.0)
    kernel = SpectralKernel(SI, geo)
    real, imag = energy_shift(kernel, with_imag=True)
    imag_ratio = abs(imag.value) / abs(real.value)
    # degenerate limit: equal radii at shrinking separation
    scale = abs(real.value)
    zero = max(abs(energy_shift(SpectralKernel(SI, Geometry.from_nm(d, 1, 1))).value) for d in (10, 3, 2.1)) / scale
    monkeypatch.setattr(quadrature, "_CHUNK_ELEMENTS", 2000)
    runs = [energy_shift(kernel, QuadratureConfig(workers=w)).value for w in (1, 2, 2)]
    drift = max(abs(v / SHIFT_GOLDEN - 1) for v in runs + [real.value])
    ok = imag_ratio <= 1e-8 and zero <= 1e-8 and drift <= 1e-8 and len(set(runs)) == 1
    verdict(
        acceptance_log,
        10,
        ok,
        f"level shift {real.value:.6e} rad/s: imag/real {imag_ratio:.1e}, equal-radii residue {zero:.1e}, "
        f"golden drift {drift:.1e}, identical across worker counts: {len(set(runs)) == 1}",
    )
