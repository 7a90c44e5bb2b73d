"""Signal synthesis and spectral diagnostics."""

import math

import numpy as np
import pytest

from molgem import units
from molgem.field import (
    FieldGrid,
    energy,
    fringe_spacing,
    make_signal,
    spectral_centroid,
    spectrogram_over_time,
    spectrogram_over_z,
    spectrum,
)
from molgem.specs import SignalSpec, SpecError, TimeGrid

from oracles import gaussian_energy, gaussian_spectrum_amplitude_fwhm

OMEGA0 = units.ev_to_hartree(1.4)
SIGMA = units.fs_to_au(50.0)


def gaussian_signal(amplitude=1.0, sigma=SIGMA, center=0.0, omega=OMEGA0):
    return SignalSpec(
        amplitude=amplitude, sigma=sigma, center_time=center, carrier_omega=omega
    )


@pytest.fixture(scope="module")
def grid():
    return TimeGrid.spanning(-6.0 * SIGMA, 6.0 * SIGMA, 4.0)


def test_zero_amplitude(grid):
    f = make_signal(gaussian_signal(0.0), grid)
    assert np.all(f.samples == 0.0)
    assert energy(f) == 0.0


def test_fwhm_of_amplitude(grid):
    f = make_signal(gaussian_signal(), grid)
    tau = f.times()
    amp = np.abs(f.samples)
    for sign in (-1.0, 1.0):
        i = np.argmin(np.abs(tau - sign * SIGMA / 2.0))
        assert amp[i] / amp.max() == pytest.approx(0.5, abs=1e-3)


def test_grid_too_coarse_rejected():
    coarse = TimeGrid.spanning(-6.0 * SIGMA, 6.0 * SIGMA, 40.0)
    with pytest.raises(SpecError):
        make_signal(gaussian_signal(), coarse)


def test_grid_must_span_three_sigma():
    small = TimeGrid.spanning(-SIGMA, SIGMA, 4.0)
    with pytest.raises(SpecError):
        make_signal(gaussian_signal(), small)


def test_energy_closed_form(grid):
    f = make_signal(gaussian_signal(amplitude=0.7), grid)
    assert energy(f) == pytest.approx(gaussian_energy(0.7, SIGMA), rel=1e-10)


def test_parseval(grid):
    f = make_signal(gaussian_signal(), grid)
    omega, amp = spectrum(f)
    domega = omega[1] - omega[0]
    spectral = float(np.sum(np.abs(amp) ** 2) * domega)
    direct = float(np.sum(np.abs(f.samples) ** 2) * f.dt)
    assert spectral == pytest.approx(direct, rel=1e-10)


def test_spectrum_gaussian_center_and_width(grid):
    f = make_signal(gaussian_signal(), grid)
    omega, amp = spectrum(f)
    a = np.abs(amp)
    domega = omega[1] - omega[0]
    assert abs(spectral_centroid(omega, amp) - OMEGA0) < domega

    # half-maximum crossings located by linear interpolation between bins
    half = 0.5 * a.max()
    above = np.nonzero(a > half)[0]
    lo, hi = above[0], above[-1]
    left = omega[lo - 1] + (half - a[lo - 1]) / (a[lo] - a[lo - 1]) * domega
    right = omega[hi] + (a[hi] - half) / (a[hi] - a[hi + 1]) * domega
    expected = gaussian_spectrum_amplitude_fwhm(SIGMA)
    assert right - left == pytest.approx(expected, rel=0.01)


def test_pure_carrier_single_bin():
    grid = TimeGrid(0.0, 4.0, 4096)
    tau = grid.times()
    n_cyc = round(OMEGA0 * grid.dt * grid.n / (2 * math.pi))
    omega_fit = 2 * math.pi * n_cyc / (grid.dt * grid.n)  # integer cycles fit
    f = FieldGrid(grid.t0, grid.dt, np.exp(-1j * omega_fit * tau), omega_fit)
    omega, amp = spectrum(f)
    a = np.abs(amp)
    k = int(np.argmax(a))
    assert omega[k] == pytest.approx(omega_fit, rel=1e-12)
    assert a[k] > 100.0 * np.partition(a, -2)[-2]


def test_double_pulse_fringes():
    sep = units.fs_to_au(300.0)
    grid = TimeGrid.spanning(-8.0 * SIGMA, sep + 8.0 * SIGMA, 4.0)
    tau = grid.times()
    env = np.exp(-4 * math.log(2) * tau**2 / SIGMA**2) + np.exp(
        -4 * math.log(2) * (tau - sep) ** 2 / SIGMA**2
    )
    f = FieldGrid(grid.t0, grid.dt, env * np.exp(-1j * OMEGA0 * tau), OMEGA0)
    omega, amp = spectrum(f)
    spacing = fringe_spacing(omega, amp)
    assert spacing == pytest.approx(2.0 * math.pi / sep, rel=0.05)


def test_single_gaussian_has_no_fringes(grid):
    f = make_signal(gaussian_signal(), grid)
    omega, amp = spectrum(f)
    with pytest.raises(SpecError):
        fringe_spacing(omega, amp)


def test_spectrogram_vacuum_constant_over_z(grid):
    f = make_signal(gaussian_signal(), grid)
    history = [f, f.with_samples(f.samples.copy()), f.with_samples(f.samples.copy())]
    omega, z, mat = spectrogram_over_z(history, np.array([0.0, 1.0, 2.0]))
    assert mat.shape == (omega.size, 3)
    assert np.max(np.abs(mat[:, 1] - mat[:, 0])) < 1e-14
    assert np.max(np.abs(mat[:, 2] - mat[:, 0])) < 1e-14


def test_spectrogram_linear_ramp_drifts_linearly(grid):
    # successive phase-ramped copies emulate propagation under a linear
    # index ramp; centroid must drift linearly across z
    f = make_signal(gaussian_signal(), grid)
    ndot = -2.0e-8
    tau = f.times()
    zs = np.array([0.0, 0.5, 1.0]) * units.cm_to_au(0.1)
    history = [
        f.with_samples(
            f.samples * np.exp(1j * OMEGA0 * ndot * (tau - tau[0]) * z
                               / units.SPEED_OF_LIGHT_AU)
        )
        for z in zs
    ]
    omega, z, mat = spectrogram_over_z(history, zs)
    centroids = [
        float(np.sum(omega * mat[:, k] ** 2) / np.sum(mat[:, k] ** 2))
        for k in range(3)
    ]
    d1 = centroids[1] - centroids[0]
    d2 = centroids[2] - centroids[1]
    assert d1 == pytest.approx(d2, rel=0.02)
    expected = -(OMEGA0 * (zs[1] - zs[0]) / units.SPEED_OF_LIGHT_AU) * ndot
    assert d1 == pytest.approx(expected, rel=0.03)


def test_spectrogram_needs_two_slices(grid):
    f = make_signal(gaussian_signal(), grid)
    with pytest.raises(SpecError):
        spectrogram_over_z([f], np.array([0.0]))


def test_windowed_spectrogram_shape(grid):
    f = make_signal(gaussian_signal(), grid)
    omega, centers, mat = spectrogram_over_time(f, window_width=4.0 * SIGMA)
    assert mat.shape == (omega.size, centers.size)
    # energy concentrated near the pulse center
    col = int(np.argmin(np.abs(centers - 0.0)))
    edge = int(np.argmin(np.abs(centers - centers[-1])))
    assert mat[:, col].max() > 10.0 * mat[:, edge].max()
