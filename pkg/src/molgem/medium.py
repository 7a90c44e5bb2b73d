"""Refractive-index dynamics generated by the aligned molecules.

n(tau) = 1 + 2 pi N_m [alpha_perp + delta_alpha <cos^2(theta)>_T(tau)];
the baseline n0 corresponds to the isotropic value <cos^2> = 1/3 and sets
the pump-frame velocity v_s = c / n0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .rotor import AlignmentTrace
from .specs import MediumSpec, SpecError, TimeGrid
from .units import SPEED_OF_LIGHT_AU


@dataclass(frozen=True)
class IndexTrace:
    """Refractive index on a uniform moving-frame time grid (a.u.)."""

    t0: float
    dt: float
    n_values: np.ndarray
    n0: float
    pump_frame_velocity: float

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_values.size)

    def grid(self) -> TimeGrid:
        return TimeGrid(self.t0, self.dt, self.n_values.size)


@dataclass(frozen=True)
class RampSegment:
    """Least-squares linear fit of n(tau) over a window."""

    t_start: float
    t_end: float
    slope: float                 # dn/dtau, signed, 1/a.u.
    linear_fit_residual: float   # RMS deviation from the fitted line

    def __post_init__(self):
        if self.t_end <= self.t_start:
            raise SpecError("ramp window must have t_end > t_start")


def baseline_index(medium: MediumSpec) -> float:
    mol = medium.molecule
    return 1.0 + 2.0 * math.pi * medium.molecular_density * (
        mol.alpha_perp + mol.delta_alpha / 3.0
    )


def index_trace(alignment: AlignmentTrace, medium: MediumSpec) -> IndexTrace:
    """Pointwise n(tau) from an alignment trace (same grid)."""
    mol = medium.molecule
    n_values = 1.0 + 2.0 * math.pi * medium.molecular_density * (
        mol.alpha_perp + mol.delta_alpha * alignment.values
    )
    n0 = baseline_index(medium)
    return IndexTrace(
        t0=alignment.t0,
        dt=alignment.dt,
        n_values=n_values,
        n0=n0,
        pump_frame_velocity=SPEED_OF_LIGHT_AU / n0,
    )


def resample_alignment(alignment: AlignmentTrace, grid: TimeGrid) -> AlignmentTrace:
    """Cubic-spline resampling onto a (typically much finer) grid.

    The alignment is band-limited by the highest rotational beat frequency,
    so a spline from a grid that resolves those oscillations is accurate to
    the spline's O(dt^4) error.
    """
    src = alignment.times()
    if grid.t0 < src[0] - 1e-9 or grid.t_end > src[-1] + 1e-9:
        raise SpecError(
            f"resample target [{grid.t0:.6g}, {grid.t_end:.6g}] outside "
            f"alignment domain [{src[0]:.6g}, {src[-1]:.6g}]"
        )
    spline = CubicSpline(src, alignment.values)
    vals = np.clip(spline(grid.times()), 0.0, 1.0)
    return AlignmentTrace(grid.t0, grid.dt, vals, alignment.temperature)


def extract_ramp(index: IndexTrace, window: tuple[float, float]) -> RampSegment:
    """Least-squares line fit of n(tau) over the window."""
    t_start, t_end = window
    tau = index.times()
    if t_start < tau[0] - 1e-9 or t_end > tau[-1] + 1e-9:
        raise SpecError("ramp window outside the index trace domain")
    mask = (tau >= t_start) & (tau <= t_end)
    if int(mask.sum()) < 3:
        raise SpecError(f"ramp window contains {int(mask.sum())} samples; need >= 3")
    t = tau[mask]
    y = index.n_values[mask]
    slope, intercept = np.polyfit(t, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * t + intercept)) ** 2)))
    return RampSegment(
        t_start=t_start, t_end=t_end, slope=float(slope), linear_fit_residual=resid
    )


def scan_linear_ramp(
    index: IndexTrace,
    search: tuple[float, float],
    residual_fraction: float = 0.02,
    min_width: float | None = None,
) -> RampSegment:
    """Widest window inside ``search`` whose fit residual stays below a
    fraction of the total index swing.

    Used to pick the reference absorption/emission ramps on a revival edge.
    """
    tau = index.times()
    mask = (tau >= search[0]) & (tau <= search[1])
    if int(mask.sum()) < 8:
        raise SpecError("search window too small")
    swing = float(index.n_values[mask].max() - index.n_values[mask].min())
    if swing <= 0.0:
        raise SpecError("index is constant over the search window")
    limit = residual_fraction * swing
    t_lo, t_hi = search
    width = t_hi - t_lo
    if min_width is None:
        min_width = width / 16.0
    best: RampSegment | None = None
    for frac in np.linspace(1.0, min_width / width, 24):
        w = width * frac
        for start in np.linspace(t_lo, t_hi - w, 16):
            seg = extract_ramp(index, (start, start + w))
            if seg.linear_fit_residual <= limit:
                if best is None or (seg.t_end - seg.t_start) > (
                    best.t_end - best.t_start
                ):
                    best = seg
        if best is not None:
            return best
    raise SpecError(
        f"no window in {search} with residual below {residual_fraction:.0%} of swing"
    )


def optical_depth(medium: MediumSpec, ramp: RampSegment, omega0: float) -> float:
    """Effective depth d = (2 pi N_a mu^2 / omega0) * (n0 / |ndot|).

    The slope magnitude is used; its sign (absorption vs emission ramp)
    travels separately on the RampSegment.
    """
    if ramp.slope == 0.0:
        raise SpecError("zero ramp slope: optical depth undefined (no broadening)")
    if omega0 <= 0.0:
        raise SpecError("carrier frequency must be positive")
    n0 = baseline_index(medium)
    mu = medium.atom.dipole
    return (
        2.0
        * math.pi
        * medium.atomic_density
        * mu**2
        / omega0
        * n0
        / abs(ramp.slope)
    )
