"""Pulse schedules and control-field envelopes.

All quantities SI: seconds, meters, joules, rad/s.  Pulse durations are
intensity FWHM.  Control pulse timing is referenced to the cell center
in the retarded frame of the signal, so a counter-propagating control
centered at t0 meets the signal mid-cell at t0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.constants as sc

from ..errors import ConfigurationError, DomainError
from ..atomphys.species import SpeciesRecord

__all__ = [
    "SignalPulse",
    "ControlPulse",
    "ProtocolSchedule",
    "Calibration",
    "ControlEnvelope",
    "build_control_envelope",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class SignalPulse:
    """Weak input pulse: Gaussian envelope with unit-photon normalization."""

    center: float            # s
    fwhm: float              # s, intensity FWHM
    wavelength: float        # m
    mean_photons: float = 1.0

    def __post_init__(self):
        if self.fwhm <= 0 or self.wavelength <= 0:
            raise DomainError("signal fwhm and wavelength must be positive")
        if self.mean_photons < 0:
            raise DomainError("mean_photons must be non-negative")

    def amplitude(self, t):
        """Flux amplitude sqrt(photons/s); |amplitude|^2 integrates to mean_photons."""
        t = np.asarray(t, dtype=float)
        peak = math.sqrt(self.mean_photons * math.sqrt(4.0 * _LN2 / math.pi) / self.fwhm)
        return peak * np.exp(-2.0 * _LN2 * ((t - self.center) / self.fwhm) ** 2)


@dataclass(frozen=True)
class ControlPulse:
    """Strong classical pulse defined by its energy, duration and waist."""

    center: float        # s
    fwhm: float          # s, intensity FWHM
    energy: float        # J
    wavelength: float    # m
    waist: float         # m, 1/e^2 intensity radius
    role: str = "in"     # "in" drives storage, "out" drives retrieval

    def __post_init__(self):
        if self.fwhm <= 0 or self.wavelength <= 0 or self.waist <= 0:
            raise DomainError("control fwhm, wavelength and waist must be positive")
        if self.energy < 0:
            raise DomainError("control energy must be non-negative")
        if self.role not in ("in", "out"):
            raise ConfigurationError(f"control role must be 'in' or 'out', got {self.role!r}")


@dataclass(frozen=True)
class ProtocolSchedule:
    """One storage / retrieval sequence.

    ``detuning`` is the signal detuning from the populated ground level
    to the intermediate-manifold centroid, in rad/s (the working point
    sits a few GHz below the line).  ``storage_time`` is the
    center-to-center separation between the read-in and read-out
    control pulses.  ``geometry`` selects co- or counter-propagating
    control.
    """

    signal: SignalPulse
    controls: tuple[ControlPulse, ...]
    detuning: float
    two_photon_detuning: float = 0.0
    geometry: str = "counter"

    def __post_init__(self):
        if self.geometry not in ("counter", "co"):
            raise ConfigurationError("geometry must be 'counter' or 'co'")
        if not self.controls:
            raise ConfigurationError("schedule needs at least one control pulse")
        roles = [c.role for c in self.controls]
        if roles.count("in") > 1 or roles.count("out") > 1:
            raise ConfigurationError("at most one control per role")

    def control(self, role: str) -> ControlPulse | None:
        for c in self.controls:
            if c.role == role:
                return c
        return None

    @property
    def storage_time(self) -> float:
        """Center-to-center read-in to read-out separation (0 if no read-out)."""
        cin, cout = self.control("in"), self.control("out")
        if cin is None or cout is None:
            return 0.0
        return cout.center - cin.center

    def with_storage_time(self, tau: float) -> "ProtocolSchedule":
        """New schedule with the read-out control moved to read-in + tau."""
        cin = self.control("in")
        cout = self.control("out")
        if cin is None or cout is None:
            raise ConfigurationError("schedule needs both 'in' and 'out' controls")
        moved = replace(cout, center=cin.center + tau)
        controls = tuple(moved if c.role == "out" else c for c in self.controls)
        return replace(self, controls=controls)

    def with_energy(self, energy: float) -> "ProtocolSchedule":
        """New schedule with every control pulse set to the given energy."""
        controls = tuple(replace(c, energy=energy) for c in self.controls)
        return replace(self, controls=controls)


@dataclass(frozen=True)
class Calibration:
    """Model calibration shared by all runs of one setup.

    The two leg dipoles and the pulse overlap are the free parameters
    of the model.  dipole_scale multiplies the signal-leg reduced
    dipole (collective coupling and optical depth);
    control_dipole_scale the control-leg dipole (Rabi frequency per
    root pulse energy), defaulting to dipole_scale when unset;
    overlap_delay shifts every control pulse relative to the signal, in
    seconds, absorbing path-length differences of the real beams.
    """

    dipole_scale: float = 1.0
    overlap_delay: float = 0.0
    control_dipole_scale: float | None = None

    def __post_init__(self):
        if self.dipole_scale <= 0:
            raise DomainError("dipole_scale must be positive")
        if self.control_dipole_scale is not None and self.control_dipole_scale <= 0:
            raise DomainError("control_dipole_scale must be positive")

    @property
    def control_scale(self) -> float:
        return self.dipole_scale if self.control_dipole_scale is None else self.control_dipole_scale


@dataclass(frozen=True)
class ControlEnvelope:
    """Gaussian Rabi-frequency envelope Omega(t), rad/s."""

    peak_rabi: float
    center: float
    fwhm: float                 # intensity FWHM of the underlying pulse
    pulse: ControlPulse = field(repr=False, default=None)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.peak_rabi * np.exp(-2.0 * _LN2 * ((t - self.center) / self.fwhm) ** 2)

    def pulse_energy(self, species: SpeciesRecord, dipole_scale: float = 1.0) -> float:
        """Invert the envelope back to pulse energy (round-trip check)."""
        d_eff = _effective_dipole(species, dipole_scale)
        # integral of Omega(t)^2 over time for a Gaussian envelope
        omega_sq_integral = self.peak_rabi**2 * self.fwhm * math.sqrt(math.pi / (4.0 * _LN2))
        intensity_integral = 0.5 * sc.epsilon_0 * sc.c * (sc.hbar / d_eff) ** 2 * omega_sq_integral
        return intensity_integral * 0.5 * math.pi * self.pulse.waist**2


def _effective_dipole(species: SpeciesRecord, dipole_scale: float) -> float:
    """Scalar coupling dipole of the upper leg for linear polarization."""
    _, upper = species.ladder_transitions
    return dipole_scale * upper.reduced_dipole / math.sqrt(3.0)


def build_control_envelope(
    pulse: ControlPulse,
    species: SpeciesRecord,
    dipole_scale: float = 1.0,
    delay: float = 0.0,
) -> ControlEnvelope:
    """Convert a control pulse spec into a Rabi-frequency envelope.

    Peak intensity of a Gaussian beam and pulse: I0 = 2 E / (pi w0^2 T)
    * sqrt(4 ln2 / pi); the Rabi frequency follows from the peak field
    and the effective upper-leg dipole.
    """
    d_eff = _effective_dipole(species, dipole_scale)
    peak_intensity = (
        2.0 * pulse.energy / (math.pi * pulse.waist**2 * pulse.fwhm)
        * math.sqrt(4.0 * _LN2 / math.pi)
    )
    peak_field = math.sqrt(2.0 * peak_intensity / (sc.epsilon_0 * sc.c))
    peak_rabi = d_eff * peak_field / sc.hbar
    return ControlEnvelope(
        peak_rabi=peak_rabi, center=pulse.center + delay, fwhm=pulse.fwhm, pulse=pulse
    )
