"""Unit conversions between lab units and atomic units.

All physics inside the package is done in Hartree atomic units
(hbar = e = m_e = 1).  Configuration files and CSV outputs use lab
units (fs, ps, cm^-1, Angstrom^3, W/cm^2, cm^-3, eV, nm, K, cm); the
converters here are the only place the two systems meet.
"""

from __future__ import annotations

import math

# CODATA 2018 values.
AU_TIME_SECONDS = 2.4188843265857e-17
BOHR_METERS = 5.29177210903e-11
HARTREE_EV = 27.211386245988
HARTREE_PER_CM1 = 4.556335252912e-6       # 1 cm^-1 in Hartree
BOLTZMANN_HA_PER_K = 3.1668115634556e-6   # k_B in Hartree/K
SPEED_OF_LIGHT_AU = 137.035999084
# Atomic unit of intensity for the peak-field convention I = eps0*c*E^2/2.
INTENSITY_AU_W_CM2 = 3.50944758e16

FS_TO_AU = 1e-15 / AU_TIME_SECONDS
PS_TO_AU = 1e-12 / AU_TIME_SECONDS
ANGSTROM3_TO_AU = (1e-10 / BOHR_METERS) ** 3
PER_CM3_TO_AU = (BOHR_METERS * 100.0) ** 3   # number density cm^-3 -> a0^-3
CM_TO_AU = 1e-2 / BOHR_METERS


def fs_to_au(t_fs: float) -> float:
    return t_fs * FS_TO_AU


def au_to_fs(t_au: float) -> float:
    return t_au / FS_TO_AU


def ps_to_au(t_ps: float) -> float:
    return t_ps * PS_TO_AU


def cm1_to_hartree(e_cm1: float) -> float:
    return e_cm1 * HARTREE_PER_CM1


def ev_to_hartree(e_ev: float) -> float:
    return e_ev / HARTREE_EV


def hartree_to_ev(e_ha: float) -> float:
    return e_ha * HARTREE_EV


def angstrom3_to_au(a3: float) -> float:
    return a3 * ANGSTROM3_TO_AU


def per_cm3_to_au(n_cm3: float) -> float:
    return n_cm3 * PER_CM3_TO_AU


def cm_to_au(l_cm: float) -> float:
    return l_cm * CM_TO_AU


def kelvin_to_hartree(t_kelvin: float) -> float:
    return t_kelvin * BOLTZMANN_HA_PER_K


def intensity_to_field_au(i_w_cm2: float) -> float:
    """Peak field strength (a.u.) of a pulse with the given peak intensity."""
    if i_w_cm2 < 0.0:
        raise ValueError(f"intensity must be non-negative, got {i_w_cm2}")
    return math.sqrt(i_w_cm2 / INTENSITY_AU_W_CM2)


def wavelength_nm_to_omega_au(lambda_nm: float) -> float:
    """Angular frequency (a.u.) of light with vacuum wavelength lambda_nm."""
    if lambda_nm <= 0.0:
        raise ValueError(f"wavelength must be positive, got {lambda_nm}")
    lambda_au = lambda_nm * 1e-9 / BOHR_METERS
    return 2.0 * math.pi * SPEED_OF_LIGHT_AU / lambda_au
