"""Closed-form reference models: dephasing, beats, noise metric, and a
single-atom master-equation oracle."""

from .dephasing import DephasingModel, residual_wavevector, doppler_lifetime
from .beats import BeatModel, beat_envelope, storage_beat_model
from .noise import mu1
from .lindblad import LindbladResult, single_atom_lindblad

__all__ = [
    "DephasingModel",
    "residual_wavevector",
    "doppler_lifetime",
    "BeatModel",
    "beat_envelope",
    "storage_beat_model",
    "mu1",
    "LindbladResult",
    "single_atom_lindblad",
]
