"""Noise figure of merit for heralded single-photon storage."""

from __future__ import annotations

from ..errors import DomainError

__all__ = ["mu1"]


def mu1(noise_photons: float, efficiency: float) -> float:
    """Mean noise photons per pulse divided by memory efficiency.

    Single-photon operation is safe when the herald rate in front of
    the memory comfortably exceeds this ratio.
    """
    if efficiency <= 0.0:
        raise DomainError("efficiency must be positive")
    if noise_photons < 0.0:
        raise DomainError("noise_photons must be non-negative")
    return noise_photons / efficiency
