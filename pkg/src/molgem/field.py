"""Signal-field construction and spectral diagnostics.

Fields are stored as complex analytic signals with the carrier included
(E ~ envelope * exp(-i omega0 tau)); spectra are reported on the positive
angular-frequency axis conjugate to that convention, normalized so that the
time- and frequency-domain energies agree exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .specs import SignalSpec, SpecError, TimeGrid

CARRIER_SAMPLES_MIN = 20   # grid points per carrier period


@dataclass(frozen=True)
class FieldGrid:
    """Complex signal field on a uniform moving-frame time grid (a.u.)."""

    t0: float
    dt: float
    samples: np.ndarray
    carrier_omega: float

    def __post_init__(self):
        if self.dt <= 0.0 or self.samples.ndim != 1:
            raise SpecError("bad field grid")

    @property
    def n(self) -> int:
        return self.samples.size

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    def grid(self) -> TimeGrid:
        return TimeGrid(self.t0, self.dt, self.n)

    def with_samples(self, samples: np.ndarray) -> "FieldGrid":
        return replace(self, samples=samples)

    def envelope(self) -> np.ndarray:
        """Samples demodulated by the carrier (slowly varying)."""
        return self.samples * np.exp(1j * self.carrier_omega * self.times())


def check_carrier_resolved(dt: float, omega: float) -> None:
    if dt > (2.0 * math.pi / omega) / CARRIER_SAMPLES_MIN:
        raise SpecError(
            f"grid spacing {dt:.4g} too coarse for carrier {omega:.4g} "
            f"(need <= {(2.0 * math.pi / omega) / CARRIER_SAMPLES_MIN:.4g})"
        )


def make_signal(spec: SignalSpec, grid: TimeGrid) -> FieldGrid:
    """Gaussian signal E0 exp(-4 ln2 (tau-t0)^2/sigma^2) exp(-i omega0 tau).

    ``sigma`` is the FWHM of the field amplitude: |E| reaches half its peak
    exactly at tau = t0 +- sigma/2.
    """
    check_carrier_resolved(grid.dt, spec.carrier_omega)
    if spec.amplitude != 0.0 and (
        grid.t0 > spec.center_time - 3.0 * spec.sigma
        or grid.t_end < spec.center_time + 3.0 * spec.sigma
    ):
        raise SpecError("grid must span at least t0 +- 3 sigma of the signal")
    tau = grid.times()
    env = spec.amplitude * np.exp(
        -4.0 * math.log(2.0) * (tau - spec.center_time) ** 2 / spec.sigma**2
    )
    samples = env * np.exp(-1j * spec.carrier_omega * tau)
    return FieldGrid(grid.t0, grid.dt, samples, spec.carrier_omega)


def energy(field: FieldGrid) -> float:
    """int |E|^2 dtau by the trapezoid rule."""
    return float(np.trapezoid(np.abs(field.samples) ** 2, dx=field.dt))


def spectrum(field: FieldGrid) -> tuple[np.ndarray, np.ndarray]:
    """Complex amplitude spectrum E~(omega) on the grid's conjugate axis.

    Analysis convention E~(omega) = (dtau/sqrt(2 pi)) sum E(tau) e^{+i omega tau},
    so a carrier e^{-i omega0 tau} peaks at omega = +omega0.  Normalization is
    Parseval-exact on the grid: sum|E|^2 dtau = sum|E~|^2 domega.
    """
    if field.n == 0:
        raise SpecError("empty field")
    n = field.n
    amp = np.fft.ifft(field.samples) * n * field.dt / math.sqrt(2.0 * math.pi)
    omega = 2.0 * math.pi * np.fft.fftfreq(n, d=field.dt)
    # e^{+i omega t0} phase reference for the grid origin
    amp = amp * np.exp(1j * omega * field.t0)
    order = np.argsort(omega)
    return omega[order], amp[order]


def spectral_centroid(omega: np.ndarray, amp: np.ndarray) -> float:
    """Intensity-weighted mean angular frequency."""
    w = np.abs(amp) ** 2
    total = w.sum()
    if total <= 0.0:
        raise SpecError("zero spectrum has no centroid")
    return float((omega * w).sum() / total)


def spectrogram_over_z(
    history: list[FieldGrid], z_positions: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Amplitude map |E~(omega)| at successive propagation distances.

    Returns (omega, z, amplitude[n_omega, n_z]); this is the frequency-vs-z
    view of a stored z-stack of field snapshots.
    """
    if len(history) < 2:
        raise SpecError("need at least two field snapshots")
    cols = []
    omega_ref = None
    for f in history:
        omega, amp = spectrum(f)
        if omega_ref is None:
            omega_ref = omega
        cols.append(np.abs(amp))
    return omega_ref, np.asarray(z_positions, dtype=float), np.stack(cols, axis=1)


def spectrogram_over_time(
    field: FieldGrid, window_width: float, hop: float | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Windowed transform |E~(omega)| vs window-center time.

    Gaussian window of amplitude-FWHM ``window_width``; hop defaults to a
    quarter of the window.  Visualization aid only.
    """
    if hop is None:
        hop = window_width / 4.0
    tau = field.times()
    centers = np.arange(tau[0], tau[-1] + 0.5 * hop, hop)
    n = field.n
    omega = np.sort(2.0 * math.pi * np.fft.fftfreq(n, d=field.dt))
    out = np.empty((omega.size, centers.size))
    for k, c in enumerate(centers):
        win = np.exp(-4.0 * math.log(2.0) * (tau - c) ** 2 / window_width**2)
        _, amp = spectrum(field.with_samples(field.samples * win))
        out[:, k] = np.abs(amp)
    return omega, centers, out


def fringe_spacing(omega: np.ndarray, amp: np.ndarray, floor: float = 0.10) -> float:
    """Mean spacing between adjacent spectral fringe maxima.

    Maxima below ``floor`` of the global peak are ignored; fewer than three
    maxima means there is no fringe pattern to measure.
    """
    a = np.abs(amp)
    peak = a.max()
    if peak <= 0.0:
        raise SpecError("empty spectrum")
    interior = (a[1:-1] > a[:-2]) & (a[1:-1] >= a[2:]) & (a[1:-1] > floor * peak)
    locs = omega[1:-1][interior]
    if locs.size < 3:
        raise SpecError(f"only {locs.size} fringe maxima above {floor:.0%} of peak")
    return float(np.mean(np.diff(locs)))
