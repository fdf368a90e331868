"""Helpers shared by the test modules."""

import dataclasses
import math

from orcasim.mbsolver import ControlPulse, ProtocolSchedule, SignalPulse

CS_SIGNAL_NM = 852.34727582e-9
CS_CONTROL_NM = 917.4834e-9


def surgery(species, gamma_e=None, gamma_s=None):
    """Copy of a species with the e/s manifold decay rates replaced."""
    manifolds = dict(species.manifolds)
    for name, gamma in ((species.ladder[1], gamma_e), (species.ladder[2], gamma_s)):
        if gamma is not None:
            manifolds[name] = dataclasses.replace(manifolds[name], linewidth=gamma)
    return dataclasses.replace(species, manifolds=manifolds)


def ladder_schedule(species, energy_in=0.21e-9, energy_out=0.97e-9,
                    storage_time=3.5e-9, detuning=2 * math.pi * 6e9,
                    mean_photons=1.0, geometry="counter",
                    signal_fwhm=540e-12, control_fwhm=500e-12, waist=300e-6):
    """Storage-plus-retrieval schedule with working-point defaults."""
    lower, upper = species.ladder_transitions
    signal = SignalPulse(center=0.0, fwhm=signal_fwhm,
                         wavelength=lower.wavelength, mean_photons=mean_photons)
    c_in = ControlPulse(center=0.0, fwhm=control_fwhm, energy=energy_in,
                        wavelength=upper.wavelength, waist=waist, role="in")
    c_out = dataclasses.replace(c_in, center=storage_time, energy=energy_out,
                                role="out")
    return ProtocolSchedule(signal=signal, controls=(c_in, c_out),
                            detuning=detuning, geometry=geometry)
