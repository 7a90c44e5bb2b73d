"""Single-state rotor evolution: stationary states, unitarity, periodicity."""

import math

import numpy as np
import pytest

from molgem import rotor, units
from molgem.errors import ConvergenceError
from molgem.specs import PulseSpec, SpecError, TimeGrid

from oracles import rotor_reference_trace

FAST = rotor.RotorParams(pulse_step=2.0)


def zero_pulse(center_fs=0.0, sigma_fs=30.0):
    return PulseSpec.from_lab(center_fs / 1000.0, sigma_fs, 0.0)


def test_zero_intensity_ground_state_is_isotropic(co2):
    grid = TimeGrid.spanning(-2000.0, 20000.0, 500.0)
    trace = rotor.evolve_single((0, 0), [zero_pulse()], grid, co2, FAST)
    assert np.allclose(trace, 1.0 / 3.0, atol=1e-13)


def test_stationary_j1_matches_operator_diagonal(co2):
    grid = TimeGrid.spanning(-2000.0, 20000.0, 500.0)
    trace = rotor.evolve_single((1, 0), [zero_pulse()], grid, co2, FAST)
    assert np.allclose(trace, 3.0 / 5.0, atol=1e-13)
    trace = rotor.evolve_single((1, 1), [zero_pulse()], grid, co2, FAST)
    assert np.allclose(trace, 1.0 / 5.0, atol=1e-13)


def test_matches_dense_expm_reference(co2):
    pulse = PulseSpec.from_lab(0.0, 20.0, 4.0e12)
    grid = TimeGrid.spanning(pulse.support[0], pulse.support[1] + 6000.0, 150.0)
    block = rotor._ParityBlock(1, 0, 40, co2)
    dense = np.diag(block.diag)
    idx = np.arange(block.dim - 1)
    dense[idx, idx + 1] = block.offdiag
    dense[idx + 1, idx] = block.offdiag
    trace = rotor.evolve_single((2, 1), [pulse], grid, co2, FAST)
    ref = rotor_reference_trace(
        block.j_values,
        block.energies,
        dense,
        lambda t: pulse.interaction_strength(t, co2.delta_alpha),
        block.initial_column(2),
        grid.times(),
        dt=0.25,
    )
    assert np.max(np.abs(trace - ref)) < 5e-9


def test_norm_conserved_and_bounded(co2, pump):
    state = rotor.evolve_state((4, 2), [pump], pump.support[1] + 1e5, co2, FAST)
    assert abs(state.norm() - 1.0) < 1e-10
    grid = TimeGrid.spanning(pump.support[0], pump.support[1] + 5.0e4, 400.0)
    trace = rotor.evolve_single((4, 2), [pump], grid, co2, FAST)
    assert trace.min() >= 0.0 and trace.max() <= 1.0


def test_post_pulse_periodicity_paper_pump(co2, pump):
    # After the pulse the trace repeats with period pi/B0 (~42.7 ps for CO2).
    revival = math.pi / co2.rotational_constant
    assert revival / units.PS_TO_AU == pytest.approx(42.74, abs=0.05)
    n_per_rev = 4096
    dt = revival / n_per_rev
    grid = TimeGrid(pump.support[0] - dt, dt, n_per_rev + 600)
    trace = rotor.evolve_single((2, 0), [pump], grid, co2, FAST)
    t = grid.times()
    start = np.searchsorted(t, pump.support[1]) + 1
    base = trace[start : start + 500]
    shifted = trace[start + n_per_rev : start + n_per_rev + 500]
    scale = max(1.0, np.max(np.abs(base)))
    assert np.max(np.abs(base - shifted)) / scale < 1e-6


def test_m_degeneracy(co2, pump):
    grid = TimeGrid.spanning(pump.support[0], pump.support[1] + 4.0e4, 500.0)
    plus = rotor.evolve_single((3, 1), [pump], grid, co2, FAST)
    minus = rotor.evolve_single((3, -1), [pump], grid, co2, FAST)
    assert np.array_equal(plus, minus)


def test_overlapping_pulses_summed(co2):
    # two overlapped weak pulses behave like their summed interaction
    p1 = PulseSpec.from_lab(0.0, 30.0, 2.0e12)
    p2 = PulseSpec.from_lab(0.010, 30.0, 2.0e12)
    grid = TimeGrid.spanning(p1.support[0], p2.support[1] + 4000.0, 200.0)
    windows = rotor._merge_windows([p1, p2])
    assert len(windows) == 1
    block = rotor._ParityBlock(0, 0, 30, co2)
    dense = np.diag(block.diag)
    idx = np.arange(block.dim - 1)
    dense[idx, idx + 1] = block.offdiag
    dense[idx + 1, idx] = block.offdiag
    trace = rotor.evolve_single((0, 0), [p1, p2], grid, co2, FAST)
    ref = rotor_reference_trace(
        block.j_values,
        block.energies,
        dense,
        lambda t: (
            p1.interaction_strength(t, co2.delta_alpha)
            + p2.interaction_strength(t, co2.delta_alpha)
        ),
        block.initial_column(0),
        grid.times(),
        dt=0.25,
    )
    assert np.max(np.abs(trace - ref)) < 5e-9


def test_step_halving_criterion_on_paper_pump(co2, pump):
    # the documented step rule: halving the calibrated step changes the
    # trace by less than 1e-8
    step = rotor._resolve_step(co2, [pump], rotor.RotorParams(), 40)
    grid = TimeGrid.spanning(pump.support[0], pump.support[1] + 8.0e4, 450.0)
    a = rotor.evolve_single((0, 0), [pump], grid, co2, rotor.RotorParams(pulse_step=step))
    b = rotor.evolve_single(
        (0, 0), [pump], grid, co2, rotor.RotorParams(pulse_step=step / 2.0)
    )
    assert np.max(np.abs(a - b)) < 1e-8


def test_grid_must_cover_pulse_support(co2, pump):
    grid = TimeGrid.spanning(pump.support[1] + 100.0, pump.support[1] + 5000.0, 100.0)
    with pytest.raises(SpecError):
        rotor.evolve_single((0, 0), [pump], grid, co2, FAST)


def test_escalation_cap_reports_leak(co2, pump):
    grid = TimeGrid.spanning(pump.support[0], pump.support[1] + 4000.0, 400.0)
    tiny = rotor.RotorParams(pulse_step=4.0, jmax_margin=2, jmax_cap=6)
    with pytest.raises(ConvergenceError) as err:
        rotor.evolve_single((0, 0), [pump], grid, co2, tiny)
    assert err.value.residual is not None and err.value.residual > 0.0


def test_rejects_bad_initial_state(co2, pump):
    grid = TimeGrid.spanning(pump.support[0], pump.support[1] + 4000.0, 400.0)
    with pytest.raises(SpecError):
        rotor.evolve_single((1, 2), [pump], grid, co2, FAST)
