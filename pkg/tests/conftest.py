import numpy as np
import pytest

from molgem.specs import MoleculeSpec, PulseSpec

# Reference medium: CO2 polarizabilities from the simulation configs; the
# rotational constant and even-J spin statistics are standard CO2 facts.
CO2_B0_CM1 = 0.3902
CO2_ALPHA_PERP_A3 = 1.97
CO2_DELTA_ALPHA_A3 = 2.04
PUMP_INTENSITY_W_CM2 = 5.0e13
PUMP_SIGMA_FS = 50.0
ROOM_TEMPERATURE_K = 295.0


@pytest.fixture(scope="session")
def co2() -> MoleculeSpec:
    return MoleculeSpec.from_lab(
        "CO2",
        b0_cm1=CO2_B0_CM1,
        alpha_perp_A3=CO2_ALPHA_PERP_A3,
        delta_alpha_A3=CO2_DELTA_ALPHA_A3,
        spin_weight_even=1.0,
        spin_weight_odd=0.0,
    )


@pytest.fixture(scope="session")
def pump() -> PulseSpec:
    return PulseSpec.from_lab(
        center_ps=0.0, sigma_fs=PUMP_SIGMA_FS, intensity_W_cm2=PUMP_INTENSITY_W_CM2
    )


@pytest.fixture(scope="session")
def rng() -> np.random.Generator:
    return np.random.default_rng(20260809)
