"""End-to-end memory scenarios: write, store, read, analyze.

A scenario runs the chain

    rotor (thermal alignment) -> medium (index trace on the field grid)
    -> signal synthesis -> Maxwell-Bloch z-march -> emission detection
    -> efficiency / storage-time / time-bandwidth analysis.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import medium as medium_mod
from . import rotor as rotor_mod
from .errors import NoEmissionError
from .field import FieldGrid, energy, fringe_spacing, make_signal, spectrum
from .maxwell_bloch import PropagationResult, propagate
from .rotor import RotorParams
from .specs import (
    MediumSpec,
    PropagationConfig,
    PulseSpec,
    SignalSpec,
    SpecError,
    TimeGrid,
)


@dataclass(frozen=True)
class AnalysisPolicy:
    """Emission-window detection rules."""

    edge_fraction: float = 0.01          # window edge at 1% of the emission peak
    absolute_floor: float = 1e-4         # vs the input peak intensity
    exclusion_halfwidth: float = 4.0     # input window, units of signal sigma


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved memory scenario (atomic units throughout)."""

    medium: MediumSpec
    pump_pulses: tuple[PulseSpec, ...]
    signal: SignalSpec
    propagation: PropagationConfig
    temperature: float                    # Kelvin
    tau_window: tuple[float, float]
    tau_dt: float
    alignment_dt: float
    rotor_params: RotorParams = RotorParams()
    analysis: AnalysisPolicy = AnalysisPolicy()

    def __post_init__(self):
        lo, hi = self.tau_window
        if not (lo < self.signal.center_time < hi):
            raise SpecError("signal center time must lie inside the tau window")


@dataclass(frozen=True)
class MemoryResult:
    efficiency: float
    storage_time: float | None           # a.u.; None when nothing was emitted
    emission_window: tuple[float, float] | None
    leakage_fraction: float
    time_bandwidth_product: float | None
    field_in: FieldGrid
    field_out: FieldGrid
    propagation: PropagationResult
    diagnostics: dict

    def __post_init__(self):
        if not (-1e-12 <= self.efficiency <= 1.0 + 1e-6):
            raise SpecError(f"efficiency {self.efficiency} outside [0, 1 + 1e-6]")
        if self.emission_window is not None:
            t_a, t_b = self.emission_window
            if t_b <= t_a:
                raise SpecError("emission window must have t_b > t_a")


def efficiency(
    field_in: FieldGrid, field_out: FieldGrid, window: tuple[float, float]
) -> float:
    """Energy ratio of the output inside [t_a, t_b] to the total input."""
    t_a, t_b = window
    if t_b <= t_a:
        raise SpecError("degenerate efficiency window")
    tau = field_out.times()
    mask = (tau >= t_a) & (tau <= t_b)
    if int(mask.sum()) < 2:
        raise SpecError("efficiency window contains fewer than two samples")
    out = float(np.trapezoid(np.abs(field_out.samples[mask]) ** 2, dx=field_out.dt))
    total_in = energy(field_in)
    if total_in <= 0.0:
        raise SpecError("input field carries no energy")
    return out / total_in


def detect_emission_window(
    output: FieldGrid,
    exclusion: tuple[float, float],
    input_peak_intensity: float,
    policy: AnalysisPolicy = AnalysisPolicy(),
) -> tuple[float, float]:
    """Window around the dominant intensity peak outside the input window.

    The window is bounded by the nearest samples where the intensity falls
    below ``edge_fraction`` of that peak; a peak below ``absolute_floor``
    times the input peak intensity counts as no emission.
    """
    tau = output.times()
    intensity = np.abs(output.samples) ** 2
    outside = (tau < exclusion[0]) | (tau > exclusion[1])
    if not np.any(outside):
        raise SpecError("exclusion window covers the whole grid")
    masked = np.where(outside, intensity, 0.0)
    peak_idx = int(np.argmax(masked))
    peak = masked[peak_idx]
    if peak <= policy.absolute_floor * input_peak_intensity:
        raise NoEmissionError(
            f"no emission above {policy.absolute_floor:g} of the input peak"
        )
    cut = policy.edge_fraction * peak
    lo = peak_idx
    while lo > 0 and intensity[lo - 1] >= cut:
        lo -= 1
    hi = peak_idx
    while hi < intensity.size - 1 and intensity[hi + 1] >= cut:
        hi += 1
    return float(tau[lo]), float(tau[hi])


def time_bandwidth(storage_time: float, signal_sigma: float) -> float:
    """Storage time over pulse duration, the broadband-memory figure of merit."""
    if signal_sigma <= 0.0:
        raise SpecError("signal duration must be positive")
    return storage_time / signal_sigma


def _peak_time(field_grid: FieldGrid, window: tuple[float, float] | None = None) -> float:
    tau = field_grid.times()
    intensity = np.abs(field_grid.samples) ** 2
    if window is not None:
        mask = (tau >= window[0]) & (tau <= window[1])
        intensity = np.where(mask, intensity, 0.0)
    return float(tau[int(np.argmax(intensity))])


def alignment_for_scenario(config: ScenarioConfig) -> rotor_mod.AlignmentTrace:
    """Thermal alignment on a coarse grid covering pumps and the tau window."""
    pulses = list(config.pump_pulses)
    starts = [p.support[0] for p in pulses if p.field_strength > 0.0]
    t_start = min(starts + [config.tau_window[0]]) - 2.0 * config.alignment_dt
    t_end = config.tau_window[1] + 2.0 * config.alignment_dt
    grid = TimeGrid.spanning(t_start, t_end, config.alignment_dt)
    return rotor_mod.thermal_alignment(
        config.medium.molecule, pulses, config.temperature, grid, config.rotor_params
    )


def index_for_scenario(
    config: ScenarioConfig, alignment: rotor_mod.AlignmentTrace | None = None
) -> medium_mod.IndexTrace:
    if alignment is None:
        alignment = alignment_for_scenario(config)
    fine = TimeGrid.spanning(config.tau_window[0], config.tau_window[1], config.tau_dt)
    resampled = medium_mod.resample_alignment(alignment, fine)
    return medium_mod.index_trace(resampled, config.medium)


def run_memory(
    config: ScenarioConfig,
    alignment: rotor_mod.AlignmentTrace | None = None,
) -> MemoryResult:
    """Execute the full storage/retrieval protocol for one scenario.

    A precomputed alignment trace may be passed in to share the rotor
    solution between scenarios that differ only downstream (atomic
    density, read-out analysis, signal amplitude).
    """
    index = index_for_scenario(config, alignment)
    fine = index.grid()
    field_in = make_signal(config.signal, fine)
    result = propagate(field_in, index, config.medium, config.propagation)
    field_out = result.field_out

    e_in = energy(field_in)
    input_peak = float(np.max(np.abs(field_in.samples) ** 2))
    half = config.analysis.exclusion_halfwidth * config.signal.sigma
    exclusion = (
        config.signal.center_time - half,
        config.signal.center_time + half,
    )
    tau = field_out.times()
    exclusion_mask = (tau >= exclusion[0]) & (tau <= exclusion[1])
    transmitted = float(
        np.trapezoid(
            np.abs(field_out.samples[exclusion_mask]) ** 2, dx=field_out.dt
        )
    ) / e_in

    diagnostics = {
        "input_energy": e_in,
        "output_energy": energy(field_out),
        "transmitted_fraction": transmitted,
        "n_z_used": result.n_z_used,
        "tau_samples": fine.n,
    }

    try:
        window = detect_emission_window(
            field_out, exclusion, input_peak, config.analysis
        )
    except NoEmissionError as exc:
        diagnostics["no_emission_reason"] = str(exc)
        return MemoryResult(
            efficiency=0.0,
            storage_time=None,
            emission_window=None,
            leakage_fraction=(energy(field_out) / e_in),
            time_bandwidth_product=None,
            field_in=field_in,
            field_out=field_out,
            propagation=result,
            diagnostics=diagnostics,
        )

    eff = efficiency(field_in, field_out, window)
    storage = _peak_time(field_out, window) - _peak_time(field_in)
    leakage = max(0.0, energy(field_out) / e_in - eff)
    return MemoryResult(
        efficiency=eff,
        storage_time=storage,
        emission_window=window,
        leakage_fraction=leakage,
        time_bandwidth_product=time_bandwidth(storage, config.signal.sigma),
        field_in=field_in,
        field_out=field_out,
        propagation=result,
        diagnostics=diagnostics,
    )


def absorption_ramp(config: ScenarioConfig,
                    alignment: rotor_mod.AlignmentTrace | None = None
                    ) -> medium_mod.RampSegment:
    """Linear fit of the index over the signal's transit window."""
    index = index_for_scenario(config, alignment)
    half = 1.5 * config.signal.sigma
    return medium_mod.extract_ramp(
        index,
        (config.signal.center_time - half, config.signal.center_time + half),
    )


def sweep_optical_depth(
    base: ScenarioConfig, depth_values: list[float], threads: int = 1
) -> list[tuple[float, float]]:
    """One memory run per optical depth, varying N_a at fixed ramp.

    The effective depth is linear in the atomic density, so each
    requested depth maps to N_a = N_a_ref * d / d_ref where d_ref is the
    depth of the base scenario's absorption ramp.  Returns (depth,
    efficiency) pairs in the requested order; points are independent and
    may run on a thread pool.
    """
    alignment = alignment_for_scenario(base)
    ramp = absorption_ramp(base, alignment)
    d_ref = medium_mod.optical_depth(
        base.medium, ramp, base.signal.carrier_omega
    )
    for d in depth_values:
        if d < 0.0:
            raise SpecError(f"negative optical depth {d}")

    def run_point(d: float) -> tuple[float, float]:
        if d == 0.0:
            return (0.0, 0.0)
        scaled = replace(
            base,
            medium=replace(
                base.medium,
                atomic_density=base.medium.atomic_density * d / d_ref,
            ),
        )
        return (d, run_memory(scaled, alignment).efficiency)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run_point, depth_values))
    return [run_point(d) for d in depth_values]


def output_fringe_spacing(result: MemoryResult) -> float:
    """Fringe spacing of the output spectrum (transmitted + emitted pulses)."""
    omega, amp = spectrum(result.field_out)
    return fringe_spacing(omega, amp)


def storage_fringe_spacing(
    result: MemoryResult,
    band: tuple[float, float],
    min_maxima: int = 4,
) -> float:
    """Fringe spacing of the storage comb, measured mid-propagation.

    While the pulse is being absorbed, the surviving input and the
    building echo coexist with a relative delay of the storage time, and
    their joint spectrum carries a comb of period 2 pi / tau.  The comb
    is measured on the first z snapshot (ascending z) whose band-limited
    spectrum shows at least ``min_maxima`` fringe maxima; requires a run
    recorded with ``store_every``.
    """
    if not result.propagation.history:
        raise SpecError("no z history recorded; rerun with store_every set")
    for f in result.propagation.history:
        omega, amp = spectrum(f)
        mask = (omega >= band[0]) & (omega <= band[1])
        try:
            spacing = fringe_spacing(omega[mask], amp[mask])
        except SpecError:
            continue
        a = np.abs(amp[mask])
        peak = a.max()
        n_max = int(
            np.sum((a[1:-1] > a[:-2]) & (a[1:-1] >= a[2:]) & (a[1:-1] > 0.1 * peak))
        )
        if n_max >= min_maxima:
            return spacing
    raise NoEmissionError("no snapshot shows a measurable storage fringe comb")
