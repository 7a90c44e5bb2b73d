"""YAML run configuration: schema validation and resolution to specs.

Every unit-bearing key carries its unit in the name (``sigma_fs``,
``length_cm``, ...).  Unknown keys are rejected with their full path.
PyYAML's 1.1 resolver reads some scientific-notation literals as strings
(``5e13``), so numeric fields transparently accept strings that parse as
floats; ``inf`` (or ``.inf``) is allowed where noted and ``auto`` where a
derived default exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import yaml

from . import units
from .protocol import AnalysisPolicy, ScenarioConfig
from .rotor import RotorParams
from .specs import (
    AtomSpec,
    MediumSpec,
    MoleculeSpec,
    PropagationConfig,
    PulseSpec,
    SignalSpec,
)


class ConfigError(ValueError):
    """Configuration file is malformed or violates the schema."""


AUTO = object()

_SCHEMA = {
    "molecule": {
        "name": (str, "CO2"),
        "b0_cm1": (float, 0.3902),
        "alpha_perp_A3": (float, 1.97),
        "delta_alpha_A3": (float, 2.04),
        "spin_weight_even": (float, 1.0),
        "spin_weight_odd": (float, 0.0),
    },
    "atom": {
        "transition_wavelength_nm": (float, 795.0),
        "dipole_ea0": (float, 2.99),
        "t1_fs": ("float_inf", math.inf),
        "t2_fs": ("float_inf", math.inf),
    },
    "medium": {
        "molecular_density_cm3": (float, 1.0e21),
        "atomic_density_cm3": (float, 1.35e16),
    },
    "temperature_K": (float, 295.0),
    "pump_pulses": [
        {
            "center_ps": (float, None),
            "sigma_fs": (float, None),
            "intensity_W_cm2": (float, None),
        }
    ],
    "signal": {
        "center_ps": (float, 21.42),
        "sigma_fs": (float, 50.0),
        "carrier_eV": (float, 1.4),
        "amplitude_au": ("float_auto", AUTO),
    },
    "grid": {
        "tau_start_ps": (float, 20.8),
        "tau_end_ps": (float, 22.8),
        "carrier_samples": (float, 24.0),
        "alignment_dt_fs": (float, 2.0),
        "pulse_step_au": ("float_auto", AUTO),
        "alignment_start_ps": ("float_auto", AUTO),
        "alignment_end_ps": ("float_auto", AUTO),
    },
    "propagation": {
        "length_cm": (float, 1.0),
        "n_z_steps": (int, 400),
        "store_every": (int, 0),
        "bloch_substeps": (int, 2),
        "bloch_tolerance": (float, 1.0e-6),
    },
    "analysis": {
        "emission_edge_fraction": (float, 0.01),
        "emission_floor": (float, 1.0e-4),
        "exclusion_halfwidth_sigmas": (float, 4.0),
        "fringe_band_eV": ("float_pair", (1.30, 1.60)),
    },
    "rotor": {
        "thermal_tolerance": (float, 1.0e-4),
        "leak_tolerance": (float, 1.0e-10),
        "jmax_margin": (int, 20),
        "step_tolerance": (float, 1.0e-8),
    },
    "sweep": {
        "depths": ("float_list", (5.0, 10.0, 20.0, 40.0)),
    },
}

# Weak-field default: peak Rabi frequency mu*E0 = 1e-4 * omega_ba, well
# inside the linear regime even for deep-echo scenarios (saturation errors
# scale as E0^2 and compound along the medium).
WEAK_FIELD_RABI_FRACTION = 1e-4


def _coerce(kind, value, path: str):
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if kind == "float_pair":
        if (
            not isinstance(value, (list, tuple))
            or len(value) != 2
        ):
            raise ConfigError(f"{path}: expected a pair [lo, hi], got {value!r}")
        return tuple(_coerce(float, v, f"{path}[{i}]") for i, v in enumerate(value))
    if kind == "float_list":
        if not isinstance(value, (list, tuple)) or not value:
            raise ConfigError(f"{path}: expected a non-empty list, got {value!r}")
        return tuple(_coerce(float, v, f"{path}[{i}]") for i, v in enumerate(value))
    if kind == "float_auto" and isinstance(value, str) and value == "auto":
        return AUTO
    # float / float_inf, possibly spelled as a string (PyYAML quirk)
    if isinstance(value, bool):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            raise ConfigError(f"{path}: expected a number, got {value!r}") from None
    if not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    value = float(value)
    if kind is float and not math.isfinite(value):
        raise ConfigError(f"{path}: must be finite, got {value!r}")
    return value


def _apply_schema(schema, data, path: str):
    if isinstance(schema, dict):
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path or 'top level'}: expected a mapping")
        for key in data:
            if key not in schema:
                raise ConfigError(f"unknown key '{(path + '.' if path else '') + key}'")
        out = {}
        for key, sub in schema.items():
            sub_path = f"{path}.{key}" if path else key
            if isinstance(sub, (dict, list)):
                out[key] = _apply_schema(sub, data.get(key), sub_path)
            else:
                kind, default = sub
                if key in data:
                    out[key] = _coerce(kind, data[key], sub_path)
                elif default is None:
                    raise ConfigError(f"missing required key '{sub_path}'")
                else:
                    out[key] = default
        return out
    if isinstance(schema, list):
        item_schema = schema[0]
        if data is None:
            return []
        if not isinstance(data, list):
            raise ConfigError(f"{path}: expected a list")
        return [
            _apply_schema(item_schema, item, f"{path}[{i}]")
            for i, item in enumerate(data)
        ]
    raise AssertionError("bad schema node")


@dataclass(frozen=True)
class ResolvedRun:
    scenario: ScenarioConfig
    fringe_band: tuple[float, float]       # a.u.
    sweep_depths: tuple[float, ...]
    alignment_window: tuple[float, float]  # a.u.
    echo: dict                             # fully resolved, lab units


def load_raw(path: Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"YAML parse error: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping at the top level")
    return data


def resolve(
    data: dict, grid_scale: float = 1.0, threads: int = 1
) -> ResolvedRun:
    if grid_scale < 1.0:
        raise ConfigError(f"grid scale must be >= 1, got {grid_scale}")
    cfg = _apply_schema(_SCHEMA, data, "")
    if "pump_pulses" not in data:
        # reference pump; an explicitly empty list stays empty
        cfg["pump_pulses"] = [
            {"center_ps": 0.0, "sigma_fs": 50.0, "intensity_W_cm2": 5.0e13}
        ]

    molecule = MoleculeSpec.from_lab(
        cfg["molecule"]["name"],
        b0_cm1=cfg["molecule"]["b0_cm1"],
        alpha_perp_A3=cfg["molecule"]["alpha_perp_A3"],
        delta_alpha_A3=cfg["molecule"]["delta_alpha_A3"],
        spin_weight_even=cfg["molecule"]["spin_weight_even"],
        spin_weight_odd=cfg["molecule"]["spin_weight_odd"],
    )
    atom = AtomSpec.from_lab(
        wavelength_nm=cfg["atom"]["transition_wavelength_nm"],
        dipole_ea0=cfg["atom"]["dipole_ea0"],
        t1_fs=cfg["atom"]["t1_fs"],
        t2_fs=cfg["atom"]["t2_fs"],
    )
    medium = MediumSpec.from_lab(
        molecule,
        atom,
        molecular_density_cm3=cfg["medium"]["molecular_density_cm3"],
        atomic_density_cm3=cfg["medium"]["atomic_density_cm3"],
    )
    pulses = tuple(
        PulseSpec.from_lab(p["center_ps"], p["sigma_fs"], p["intensity_W_cm2"])
        for p in cfg["pump_pulses"]
    )

    amplitude = cfg["signal"]["amplitude_au"]
    if amplitude is AUTO:
        amplitude = WEAK_FIELD_RABI_FRACTION * atom.transition_omega / atom.dipole
    signal = SignalSpec.from_lab(
        center_ps=cfg["signal"]["center_ps"],
        sigma_fs=cfg["signal"]["sigma_fs"],
        carrier_eV=cfg["signal"]["carrier_eV"],
        amplitude_au=amplitude,
    )

    carrier_samples = cfg["grid"]["carrier_samples"] / grid_scale
    if carrier_samples < 20.0 - 1e-9:
        raise ConfigError(
            f"grid scale {grid_scale} leaves {carrier_samples:.1f} samples per "
            f"carrier period; the field grid requires at least 20"
        )
    fastest = max(signal.carrier_omega, atom.transition_omega)
    tau_dt = (2.0 * math.pi / fastest) / carrier_samples

    n_z = max(1, int(round(cfg["propagation"]["n_z_steps"] / grid_scale)))
    propagation = PropagationConfig.from_lab(
        cfg["propagation"]["length_cm"],
        n_z_steps=n_z,
        store_every=cfg["propagation"]["store_every"],
        bloch_substeps=cfg["propagation"]["bloch_substeps"],
        bloch_tolerance=cfg["propagation"]["bloch_tolerance"],
    )

    pulse_step = cfg["grid"]["pulse_step_au"]
    rotor_params = RotorParams(
        pulse_step=None if pulse_step is AUTO else pulse_step * grid_scale,
        step_tolerance=cfg["rotor"]["step_tolerance"],
        jmax_margin=cfg["rotor"]["jmax_margin"],
        leak_tolerance=cfg["rotor"]["leak_tolerance"],
        thermal_tolerance=cfg["rotor"]["thermal_tolerance"],
        threads=threads,
    )
    analysis = AnalysisPolicy(
        edge_fraction=cfg["analysis"]["emission_edge_fraction"],
        absolute_floor=cfg["analysis"]["emission_floor"],
        exclusion_halfwidth=cfg["analysis"]["exclusion_halfwidth_sigmas"],
    )

    scenario = ScenarioConfig(
        medium=medium,
        pump_pulses=pulses,
        signal=signal,
        propagation=propagation,
        temperature=cfg["temperature_K"],
        tau_window=(
            units.ps_to_au(cfg["grid"]["tau_start_ps"]),
            units.ps_to_au(cfg["grid"]["tau_end_ps"]),
        ),
        tau_dt=tau_dt,
        alignment_dt=units.fs_to_au(cfg["grid"]["alignment_dt_fs"]) * grid_scale,
        rotor_params=rotor_params,
        analysis=analysis,
    )

    align_start = cfg["grid"]["alignment_start_ps"]
    align_end = cfg["grid"]["alignment_end_ps"]
    if align_start is AUTO:
        starts = [units.au_to_fs(p.support[0]) / 1000.0 for p in pulses] or [0.0]
        align_start = min(starts + [0.0]) - 0.3
    if align_end is AUTO:
        align_end = cfg["grid"]["tau_end_ps"]
    if align_end <= align_start:
        raise ConfigError("alignment window must have end > start")

    echo = {
        k: (
            {
                kk: (
                    "auto"
                    if vv is AUTO
                    else ("inf" if isinstance(vv, float) and math.isinf(vv) else
                          list(vv) if isinstance(vv, tuple) else vv)
                )
                for kk, vv in v.items()
            }
            if isinstance(v, dict)
            else v
        )
        for k, v in cfg.items()
    }
    echo["resolved"] = {
        "signal_amplitude_au": amplitude,
        "tau_dt_au": tau_dt,
        "n_z_steps": n_z,
        "grid_scale": grid_scale,
        "threads": threads,
        "alignment_window_ps": [align_start, align_end],
        "pulse_step_au": (
            "auto" if pulse_step is AUTO else pulse_step * grid_scale
        ),
    }

    return ResolvedRun(
        scenario=scenario,
        fringe_band=(
            units.ev_to_hartree(cfg["analysis"]["fringe_band_eV"][0]),
            units.ev_to_hartree(cfg["analysis"]["fringe_band_eV"][1]),
        ),
        sweep_depths=tuple(cfg["sweep"]["depths"]),
        alignment_window=(
            units.ps_to_au(align_start),
            units.ps_to_au(align_end),
        ),
        echo=echo,
    )


def load(path: Path, grid_scale: float = 1.0, threads: int = 1) -> ResolvedRun:
    return resolve(load_raw(path), grid_scale=grid_scale, threads=threads)
