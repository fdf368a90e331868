"""Atomic structure, thermal ensembles and linear absorption."""

from .angular import wigner_6j, relative_line_strength, decay_branching
from .species import (
    HyperfineLevel,
    Manifold,
    Transition,
    VaporPressureModel,
    SpeciesRecord,
    hyperfine_offset,
    load_species,
)
from .thermal import ThermalEnsemble, thermal_speed, velocity_quadrature, make_ensemble
from .absorption import voigt_absorption, transmission_spectrum, fit_temperature

__all__ = [
    "wigner_6j",
    "relative_line_strength",
    "decay_branching",
    "HyperfineLevel",
    "Manifold",
    "Transition",
    "VaporPressureModel",
    "SpeciesRecord",
    "hyperfine_offset",
    "load_species",
    "ThermalEnsemble",
    "thermal_speed",
    "velocity_quadrature",
    "make_ensemble",
    "voigt_absorption",
    "transmission_spectrum",
    "fit_temperature",
]
