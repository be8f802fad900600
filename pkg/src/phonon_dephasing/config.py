"""Run parameters from presets, key-value config files and ``--section.key=value`` flags.

Precedence is flag > file > preset/default. Every resolved field remembers
where it came from so that outputs can echo their full provenance.

File format::

    # comment
    material.name = Si
    geometry.d_nm = 10
    temperature.K = 4
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

from .oracle.quadrature import QuadratureConfig
from .params import NM, Geometry, Material, material_preset

ENV_VAR = "PHONON_DEPHASING_CONFIG"

_FLOAT_KEYS = (
    "material.rho_m",
    "material.s",
    "material.D_eV",
    "geometry.d_nm",
    "geometry.R_plus_nm",
    "geometry.R_minus_nm",
    "temperature.K",
    "quadrature.rel_tol",
    "quadrature.abs_tol",
    "quadrature.cutoff_ratio",
)
_INT_KEYS = ("quadrature.max_subdivisions", "quadrature.workers")
KEYS = ("material.name",) + _FLOAT_KEYS + _INT_KEYS

_DEFAULTS = {
    "material.name": "Si",
    "geometry.d_nm": 10.0,
    "geometry.R_plus_nm": 1.0,
    "geometry.R_minus_nm": 1.0,
    "temperature.K": 300.0,
    "quadrature.rel_tol": QuadratureConfig.rel_tol,
    "quadrature.abs_tol": QuadratureConfig.abs_tol,
    "quadrature.cutoff_ratio": QuadratureConfig.cutoff_ratio,
    "quadrature.max_subdivisions": QuadratureConfig.max_subdivisions,
    "quadrature.workers": QuadratureConfig.workers,
}

_POSITIVE = (
    "material.rho_m",
    "material.s",
    "material.D_eV",
    "geometry.d_nm",
    "geometry.R_plus_nm",
    "geometry.R_minus_nm",
    "quadrature.rel_tol",
    "quadrature.cutoff_ratio",
    "quadrature.max_subdivisions",
    "quadrature.workers",
)


class ConfigError(ValueError):
    """Invalid configuration entry; ``key`` names the offending setting."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class RunParameters:
    material: Material
    geometry: Geometry
    temperature: float
    quad: QuadratureConfig
    values: dict
    provenance: dict

    def header(self):
        """``key=value`` pairs echoing every field and its source."""
        out = {}
        for key in KEYS:
            out[key] = f"{self.values[key]} ({self.provenance[key]})"
        return out


def read_config_file(path):
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}", f"expected 'key = value', got {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            entries[key] = value
    return entries


def parse_flags(flags):
    """Turn ``['--geometry.d_nm=12', ...]`` into a key-value mapping."""
    entries = {}
    for flag in flags:
        body = flag[2:] if flag.startswith("--") else flag
        if "=" not in body:
            raise ConfigError(body, "flags take the form --section.key=value")
        key, value = body.split("=", 1)
        entries[key.strip()] = value.strip()
    return entries


def _convert(key, raw):
    if key not in KEYS:
        raise ConfigError(key, f"unknown key; known keys: {', '.join(KEYS)}")
    if key == "material.name":
        return str(raw)
    try:
        value = int(raw) if key in _INT_KEYS else float(raw)
    except (TypeError, ValueError):
        kind = "an integer" if key in _INT_KEYS else "a number"
        raise ConfigError(key, f"expected {kind}, got {raw!r}") from None
    if isinstance(value, float) and not math.isfinite(value):
        raise ConfigError(key, f"must be finite, got {raw!r}")
    if key in _POSITIVE and not value > 0:
        raise ConfigError(key, f"must be positive, got {raw!r}")
    if key in ("temperature.K", "quadrature.abs_tol") and value < 0:
        raise ConfigError(key, f"must be non-negative, got {raw!r}")
    return value


def parse_config(path=None, flags=None, env=None):
    """Resolve a fully validated parameter set.

    Parameters
    ----------
    path : str or None
        Config file. Falls back to the file named by ``PHONON_DEPHASING_CONFIG``.
    flags : mapping or list of str, optional
        Overrides, either ``{"temperature.K": "4"}`` or ``["--temperature.K=4"]``.
    env : mapping, optional
        Environment to consult, ``os.environ`` by default.

    Raises
    ------
    ConfigError
    """
    env = os.environ if env is None else env
    if path is None and env.get(ENV_VAR):
        path = env[ENV_VAR]
    layers = []
    if path is not None:
        layers.append((f"file:{path}", read_config_file(path)))
    if flags:
        layers.append(("flag", dict(flags) if isinstance(flags, dict) else parse_flags(flags)))

    values, provenance = {}, {}
    for key, value in _DEFAULTS.items():
        values[key], provenance[key] = value, "default"
    converted = [(source, {k: _convert(k, v) for k, v in entries.items()}) for source, entries in layers]

    for source, entries in converted:
        if "material.name" in entries:
            values["material.name"], provenance["material.name"] = entries["material.name"], source
    try:
        preset = material_preset(values["material.name"])
    except KeyError as exc:
        raise ConfigError("material.name", exc.args[0]) from None
    preset_source = f"preset:{preset.name}"
    values["material.name"] = preset.name
    for key, value in (
        ("material.rho_m", preset.mass_density),
        ("material.s", preset.sound_speed),
        ("material.D_eV", preset.deformation_ev),
    ):
        values[key], provenance[key] = value, preset_source
    for source, entries in converted:
        for key, value in entries.items():
            if key != "material.name":
                values[key], provenance[key] = value, source

    d = values["geometry.d_nm"]
    for key in ("geometry.R_plus_nm", "geometry.R_minus_nm"):
        if values[key] >= d:
            raise ConfigError(
                key, f"Bohr radius {values[key]} nm must be smaller than d = {d} nm"
            )

    overridden = any(provenance[k] != preset_source for k in ("material.rho_m", "material.s", "material.D_eV"))
    material = Material.from_ev(
        values["material.rho_m"],
        values["material.s"],
        values["material.D_eV"],
        name=f"{preset.name}*" if overridden else preset.name,
    )
    geometry = Geometry(
        values["geometry.d_nm"] * NM,
        values["geometry.R_plus_nm"] * NM,
        values["geometry.R_minus_nm"] * NM,
    )
    if not values["quadrature.cutoff_ratio"] < 1:
        raise ConfigError("quadrature.cutoff_ratio", "must lie in (0, 1)")
    quad = QuadratureConfig(
        rel_tol=values["quadrature.rel_tol"],
        abs_tol=values["quadrature.abs_tol"],
        max_subdivisions=values["quadrature.max_subdivisions"],
        cutoff_ratio=values["quadrature.cutoff_ratio"],
        workers=values["quadrature.workers"],
    )
    return RunParameters(material, geometry, values["temperature.K"], quad, values, provenance)
