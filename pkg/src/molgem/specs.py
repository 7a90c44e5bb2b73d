"""Immutable parameter records shared across the simulation modules.

Everything here stores atomic units.  The ``from_lab`` constructors accept
the lab units used in configuration files (cm^-1, Angstrom^3, fs, W/cm^2,
nm or eV, cm^-3, cm) and convert once at construction time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import units


class SpecError(ValueError):
    """Invalid physical parameters."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid: t0 + dt*k for k in 0..n-1 (atomic units)."""

    t0: float
    dt: float
    n: int

    def __post_init__(self):
        if self.dt <= 0.0 or self.n < 1:
            raise SpecError(f"bad time grid: dt={self.dt}, n={self.n}")

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (self.n - 1)

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    @classmethod
    def spanning(cls, t_start: float, t_end: float, dt: float) -> "TimeGrid":
        n = int(math.ceil((t_end - t_start) / dt)) + 1
        return cls(t_start, dt, n)


@dataclass(frozen=True)
class MoleculeSpec:
    """Rigid linear rotor with anisotropic polarizability.

    spin_weights maps J parity (0 = even, 1 = odd) to the nuclear-spin
    statistical weight g_J.
    """

    name: str
    rotational_constant: float        # B0, Hartree
    alpha_perp: float                 # a0^3
    delta_alpha: float                # a0^3
    spin_weights: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        if self.rotational_constant <= 0.0:
            raise SpecError(f"B0 must be positive, got {self.rotational_constant}")
        if self.alpha_perp < 0.0:
            raise SpecError(f"alpha_perp must be non-negative, got {self.alpha_perp}")
        if any(g < 0.0 for g in self.spin_weights) or not any(
            g > 0.0 for g in self.spin_weights
        ):
            raise SpecError(f"bad spin weights {self.spin_weights}")

    @classmethod
    def from_lab(
        cls,
        name: str,
        b0_cm1: float,
        alpha_perp_A3: float,
        delta_alpha_A3: float,
        spin_weight_even: float = 1.0,
        spin_weight_odd: float = 1.0,
    ) -> "MoleculeSpec":
        return cls(
            name=name,
            rotational_constant=units.cm1_to_hartree(b0_cm1),
            alpha_perp=units.angstrom3_to_au(alpha_perp_A3),
            delta_alpha=units.angstrom3_to_au(delta_alpha_A3),
            spin_weights=(spin_weight_even, spin_weight_odd),
        )

    def rotational_energy(self, j: int | np.ndarray) -> float | np.ndarray:
        return self.rotational_constant * j * (j + 1)


@dataclass(frozen=True)
class PulseSpec:
    """Non-resonant alignment pulse (pump or control).

    The interaction strength follows a sin^2 half-cycle of full width
    2*sigma centered on ``center_time``: it is exactly zero outside
    [center_time - sigma, center_time + sigma] and peaks at the center.
    ``field_strength`` is the peak field amplitude E0 (a.u.).
    """

    center_time: float      # a.u.
    sigma: float            # pulse duration sigma_p, a.u.
    field_strength: float   # E0, a.u.

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise SpecError(f"pulse duration must be positive, got {self.sigma}")
        if self.field_strength < 0.0:
            raise SpecError(f"field strength must be non-negative, got {self.field_strength}")

    @classmethod
    def from_lab(cls, center_ps: float, sigma_fs: float, intensity_W_cm2: float) -> "PulseSpec":
        return cls(
            center_time=units.ps_to_au(center_ps),
            sigma=units.fs_to_au(sigma_fs),
            field_strength=units.intensity_to_field_au(intensity_W_cm2),
        )

    @property
    def support(self) -> tuple[float, float]:
        return (self.center_time - self.sigma, self.center_time + self.sigma)

    def interaction_strength(self, t: float | np.ndarray, delta_alpha: float):
        """U0(t) = delta_alpha * E0^2 / 4 * sin^2 envelope, zero off support."""
        peak = 0.25 * delta_alpha * self.field_strength**2
        x = np.asarray(t, dtype=float) - self.center_time
        inside = np.abs(x) <= self.sigma
        env = np.where(
            inside,
            np.sin(0.5 * np.pi * (x + self.sigma) / self.sigma) ** 2,
            0.0,
        )
        out = peak * env
        return float(out) if np.isscalar(t) else out


@dataclass(frozen=True)
class AtomSpec:
    """Two-level atom: transition frequency, dipole, optional relaxation."""

    transition_omega: float   # omega_ba, a.u.
    dipole: float             # mu_ba, a.u. (real positive by convention)
    t1: float = math.inf      # population lifetime, a.u.
    t2: float = math.inf      # coherence lifetime, a.u.

    def __post_init__(self):
        if self.transition_omega <= 0.0:
            raise SpecError(f"transition frequency must be positive, got {self.transition_omega}")
        if self.dipole <= 0.0:
            raise SpecError(f"dipole must be positive, got {self.dipole}")
        if self.t1 <= 0.0 or self.t2 <= 0.0:
            raise SpecError("relaxation times must be positive (inf allowed)")

    @classmethod
    def from_lab(
        cls,
        wavelength_nm: float,
        dipole_ea0: float,
        t1_fs: float = math.inf,
        t2_fs: float = math.inf,
    ) -> "AtomSpec":
        return cls(
            transition_omega=units.wavelength_nm_to_omega_au(wavelength_nm),
            dipole=dipole_ea0,
            t1=units.fs_to_au(t1_fs) if math.isfinite(t1_fs) else math.inf,
            t2=units.fs_to_au(t2_fs) if math.isfinite(t2_fs) else math.inf,
        )


@dataclass(frozen=True)
class MediumSpec:
    """Mixed gas: aligned molecules plus two-level atoms, both uniform in z."""

    molecule: MoleculeSpec
    atom: AtomSpec
    molecular_density: float   # N_m, a0^-3
    atomic_density: float      # N_a, a0^-3

    def __post_init__(self):
        if self.molecular_density < 0.0 or self.atomic_density < 0.0:
            raise SpecError("densities must be non-negative")
        scale = self.susceptibility_scale
        if scale > 0.1:
            import warnings

            warnings.warn(
                f"molecular susceptibility scale 2*pi*N_m*(alpha_perp+delta_alpha)"
                f" = {scale:.3g} is large; the linear index formula assumes it << 1",
                stacklevel=2,
            )

    @property
    def susceptibility_scale(self) -> float:
        mol = self.molecule
        return 2.0 * math.pi * self.molecular_density * (mol.alpha_perp + mol.delta_alpha)

    @classmethod
    def from_lab(
        cls,
        molecule: MoleculeSpec,
        atom: AtomSpec,
        molecular_density_cm3: float,
        atomic_density_cm3: float,
    ) -> "MediumSpec":
        return cls(
            molecule=molecule,
            atom=atom,
            molecular_density=units.per_cm3_to_au(molecular_density_cm3),
            atomic_density=units.per_cm3_to_au(atomic_density_cm3),
        )


@dataclass(frozen=True)
class SignalSpec:
    """Weak Gaussian signal pulse (analytic-signal convention).

    ``sigma`` is the full width at half maximum of the field amplitude
    envelope; the envelope is E0*exp(-4 ln2 (t-t0)^2 / sigma^2).
    """

    amplitude: float        # E0, a.u.
    sigma: float            # FWHM of |E|, a.u.
    center_time: float      # t0, a.u.
    carrier_omega: float    # omega_0, a.u.

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise SpecError(f"signal duration must be positive, got {self.sigma}")
        if self.carrier_omega <= 0.0:
            raise SpecError(f"carrier frequency must be positive, got {self.carrier_omega}")

    @classmethod
    def from_lab(
        cls,
        center_ps: float,
        sigma_fs: float,
        carrier_eV: float,
        amplitude_au: float,
    ) -> "SignalSpec":
        return cls(
            amplitude=amplitude_au,
            sigma=units.fs_to_au(sigma_fs),
            center_time=units.ps_to_au(center_ps),
            carrier_omega=units.ev_to_hartree(carrier_eV),
        )


@dataclass(frozen=True)
class PropagationConfig:
    """Controls for the z-march through the medium."""

    length: float                 # L, a.u.
    n_z_steps: int = 200
    store_every: int = 0          # 0 disables history snapshots
    bloch_substeps: int = 2       # tau substeps per grid interval
    bloch_tolerance: float = 1e-6 # allowed relative change on substep doubling

    def __post_init__(self):
        if self.length <= 0.0:
            raise SpecError(f"length must be positive, got {self.length}")
        if self.n_z_steps < 1:
            raise SpecError(f"need at least one z step, got {self.n_z_steps}")
        if self.bloch_substeps < 1:
            raise SpecError("bloch_substeps must be >= 1")

    @classmethod
    def from_lab(cls, length_cm: float, **kwargs) -> "PropagationConfig":
        return cls(length=units.cm_to_au(length_cm), **kwargs)
