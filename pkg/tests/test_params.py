import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from phonon_dephasing.params import (
    EV,
    HBAR,
    K_B,
    DerivedScales,
    ElectronicLevels,
    Geometry,
    InitialState,
    Material,
    ParameterError,
    derive_scales,
    gamma_T,
    known_presets,
    material_preset,
)


@pytest.fixture
def si_scales():
    return derive_scales(material_preset("Si"), Geometry.from_nm(10, 1, 1))


def test_si_preset_values():
    si = material_preset("Si")
    assert si.mass_density == 2.33e3
    assert si.sound_speed == 9e3
    assert si.deformation_constant == pytest.approx(8.6 * EV, rel=1e-15)
    assert si.deformation_ev == pytest.approx(8.6, rel=1e-15)


def test_preset_lookup_is_case_insensitive():
    assert material_preset("si") == material_preset("Si") == material_preset("SI")


def test_unknown_preset_lists_known_names():
    with pytest.raises(KeyError, match="Si"):
        material_preset("GaAs")
    assert "Si" in known_presets()


@pytest.mark.parametrize(
    "args",
    [(0, 9e3, 1e-18), (2e3, -1, 1e-18), (2e3, 9e3, 0.0), (math.nan, 9e3, 1e-18)],
)
def test_material_rejects_non_positive(args):
    with pytest.raises(ParameterError):
        Material(*args)


@pytest.mark.parametrize("radii", [(12, 1), (1, 10), (0, 1), (1, -1)])
def test_geometry_invariants(radii):
    with pytest.raises(ParameterError):
        Geometry.from_nm(10, *radii)


def test_geometry_shape_round_trip():
    g = Geometry.from_shape(10e-9, 0.1, 0.5)
    assert g.eta_plus == pytest.approx(0.125)
    assert g.eta_minus == pytest.approx(0.075)


def test_si_scales(si_scales):
    assert si_scales.tau_d == pytest.approx(10e-9 / 9e3, rel=1e-15)
    # T0 recomputed independently: k_B T0 = rho d^3 s^2 (hbar omega_d / D)^2
    d, s, rho, D = 10e-9, 9e3, 2.33e3, 8.6 * EV
    omega_d = 2 * math.pi * s / d
    T0 = rho * d**3 * s**2 * (HBAR * omega_d / D) ** 2 / K_B
    assert si_scales.T0 == pytest.approx(T0, rel=1e-13)
    assert si_scales.T0 == pytest.approx(2560.5723117, rel=1e-9)
    assert si_scales.eta == pytest.approx(0.1)
    assert si_scales.sigma == 0


@given(
    d=st.floats(1e-9, 1e-6),
    s=st.floats(1e3, 1e4),
    rho=st.floats(1e3, 2e4),
    D=st.floats(1.0, 20.0),
)
def test_tau_omega_identity(d, s, rho, D):
    sc = derive_scales(Material.from_ev(rho, s, D), Geometry(d, 0.1 * d, 0.2 * d))
    assert sc.tau_d * sc.omega_d == pytest.approx(2 * math.pi, rel=1e-15)
    assert sc.T0 > 0


def test_gamma_T(si_scales):
    assert gamma_T(si_scales, 0.0) == 0
    assert gamma_T(si_scales, si_scales.T0) == pytest.approx(si_scales.omega_d, rel=1e-15)
    assert si_scales.gamma_T(600.0) == pytest.approx(2 * si_scales.gamma_T(300.0), rel=1e-15)
    assert si_scales.gamma_T(300.0) == pytest.approx(300 / 2560.5723117 * 2 * math.pi * 9e3 / 10e-9, rel=1e-9)
    with pytest.raises(ParameterError):
        gamma_T(si_scales, -1.0)


def test_levels_and_state():
    assert ElectronicLevels(1e12, -3e9).omega0 == 1e12 - 3e9
    assert InitialState().coherence_prefactor == pytest.approx(0.5)
    assert InitialState(0).coherence_prefactor == 0
    assert InitialState(1j).coherence_prefactor == 0
    with pytest.raises(ParameterError):
        InitialState(1.1)


@given(st.complex_numbers(max_magnitude=1.0))
def test_coherence_prefactor_bounded(xi):
    assert abs(InitialState(xi).coherence_prefactor) <= 0.5 + 1e-15


def test_scales_dataclass_properties():
    sc = DerivedScales(1.0, 2 * math.pi, 0.15, 0.05, 1.0)
    assert sc.eta == pytest.approx(0.1)
    assert sc.sigma == pytest.approx(1.0)
