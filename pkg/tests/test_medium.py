"""Refractive-index traces, ramp extraction, optical depth."""

import math

import numpy as np
import pytest

from molgem import medium, units
from molgem.rotor import AlignmentTrace
from molgem.specs import AtomSpec, MediumSpec, SpecError, TimeGrid


@pytest.fixture(scope="module")
def atom():
    return AtomSpec.from_lab(795.0, 2.99)


@pytest.fixture(scope="module")
def co2_medium(co2, atom):
    return MediumSpec.from_lab(co2, atom, 1.0e21, 1.35e16)


def flat_alignment(value, n=64, dt=100.0):
    return AlignmentTrace(0.0, dt, np.full(n, value), 295.0)


def test_baseline_index_paper_constants(co2_medium):
    # n0 = 1 + 2 pi N_m (alpha_perp + dalpha/3) with the reference constants
    idx = medium.index_trace(flat_alignment(1.0 / 3.0), co2_medium)
    assert idx.n0 == pytest.approx(1.01665, abs=1e-5)
    assert np.allclose(idx.n_values, idx.n0, atol=1e-15)
    assert idx.pump_frame_velocity * idx.n0 == pytest.approx(
        units.SPEED_OF_LIGHT_AU, rel=1e-15
    )


def test_zero_alignment_gives_perp_only(co2, atom):
    med = MediumSpec.from_lab(co2, atom, 1.0e21, 0.0)
    idx = medium.index_trace(flat_alignment(0.0), med)
    expected = 1.0 + 2.0 * math.pi * med.molecular_density * co2.alpha_perp
    assert np.allclose(idx.n_values, expected, rtol=1e-15)


def test_vacuum(co2, atom):
    med = MediumSpec.from_lab(co2, atom, 0.0, 0.0)
    idx = medium.index_trace(flat_alignment(0.2), med)
    assert np.all(idx.n_values == 1.0)
    assert idx.pump_frame_velocity == pytest.approx(units.SPEED_OF_LIGHT_AU)


def test_affine_superposition(co2_medium, rng):
    a1 = rng.uniform(0.0, 1.0, 40)
    a2 = rng.uniform(0.0, 1.0, 40)
    c1, c2 = 0.3, 0.7
    mix = AlignmentTrace(0.0, 50.0, c1 * a1 + c2 * a2, 295.0)
    t1 = AlignmentTrace(0.0, 50.0, a1, 295.0)
    t2 = AlignmentTrace(0.0, 50.0, a2, 295.0)
    n_mix = medium.index_trace(mix, co2_medium).n_values
    n1 = medium.index_trace(t1, co2_medium).n_values
    n2 = medium.index_trace(t2, co2_medium).n_values
    base = medium.baseline_index(co2_medium)
    k = 2.0 * math.pi * co2_medium.molecular_density * co2_medium.molecule.delta_alpha
    # contributions add linearly around the alpha_perp offset
    assert np.allclose(
        n_mix - 1.0 - 2.0 * math.pi * co2_medium.molecular_density
        * co2_medium.molecule.alpha_perp,
        c1 * k * a1 + c2 * k * a2,
        rtol=1e-12,
    )
    assert base == pytest.approx(1.0166, abs=1e-3)


def test_ramp_fit_exact_line(co2_medium):
    grid = TimeGrid(0.0, 10.0, 200)
    slope = 3.2e-8
    n_values = 1.016 + slope * grid.times()
    idx = medium.IndexTrace(0.0, 10.0, n_values, 1.016, units.SPEED_OF_LIGHT_AU / 1.016)
    seg = medium.extract_ramp(idx, (100.0, 1800.0))
    assert seg.slope == pytest.approx(slope, rel=1e-12)
    assert seg.linear_fit_residual < 1e-15


def test_ramp_fit_symmetric_quadratic_has_zero_slope():
    grid = TimeGrid(-1000.0, 10.0, 201)
    t = grid.times()
    n_values = 1.016 + 4.0e-12 * t**2
    idx = medium.IndexTrace(grid.t0, grid.dt, n_values, 1.016, 1.0)
    seg = medium.extract_ramp(idx, (-1000.0, 1000.0))
    assert abs(seg.slope) < 1e-18
    assert seg.linear_fit_residual > 0.0


def test_ramp_window_needs_three_samples():
    idx = medium.IndexTrace(0.0, 100.0, np.ones(50), 1.0, 1.0)
    with pytest.raises(SpecError):
        medium.extract_ramp(idx, (0.0, 150.0))


def test_optical_depth_scalings(co2, atom):
    seg = medium.RampSegment(0.0, 100.0, -2.0e-7, 0.0)
    omega0 = units.ev_to_hartree(1.4)
    med1 = MediumSpec.from_lab(co2, atom, 1.0e21, 1.0e16)
    med2 = MediumSpec.from_lab(co2, atom, 1.0e21, 2.0e16)
    d1 = medium.optical_depth(med1, seg, omega0)
    d2 = medium.optical_depth(med2, seg, omega0)
    assert d2 == pytest.approx(2.0 * d1, rel=1e-12)
    steep = medium.RampSegment(0.0, 100.0, -4.0e-7, 0.0)
    assert medium.optical_depth(med1, steep, omega0) == pytest.approx(
        0.5 * d1, rel=1e-12
    )
    # sign travels on the ramp; depth uses |slope|
    rising = medium.RampSegment(0.0, 100.0, 2.0e-7, 0.0)
    assert medium.optical_depth(med1, rising, omega0) == pytest.approx(d1, rel=1e-12)


def test_optical_depth_rejects_zero_slope(co2_medium):
    seg = medium.RampSegment(0.0, 100.0, 0.0, 0.0)
    with pytest.raises(SpecError):
        medium.optical_depth(co2_medium, seg, units.ev_to_hartree(1.4))


def test_resample_roundtrip(co2_medium):
    t = np.arange(600) * 80.0
    vals = 1.0 / 3.0 + 0.05 * np.sin(2 * np.pi * t / 8000.0)
    src = AlignmentTrace(0.0, 80.0, vals, 295.0)
    fine = TimeGrid.spanning(1000.0, 40000.0, 5.0)
    out = medium.resample_alignment(src, fine)
    expected = 1.0 / 3.0 + 0.05 * np.sin(2 * np.pi * fine.times() / 8000.0)
    assert np.max(np.abs(out.values - expected)) < 1e-6


def test_resample_rejects_extrapolation(co2_medium):
    src = AlignmentTrace(0.0, 80.0, np.full(100, 0.33), 295.0)
    with pytest.raises(SpecError):
        medium.resample_alignment(src, TimeGrid.spanning(-500.0, 400.0, 10.0))


def test_susceptibility_scale_warning(co2, atom):
    with pytest.warns(UserWarning):
        MediumSpec.from_lab(co2, atom, 1.2e23, 0.0)
