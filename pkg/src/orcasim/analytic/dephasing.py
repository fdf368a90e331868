"""Motion-induced dephasing of the stored two-photon coherence.

An atom moving at velocity v accumulates phase k_r v t on the
ground-storage coherence, where k_r is the part of the signal-minus-
control wavevector that survives the chosen geometry.  Averaging
exp(i k_r v t) over a 1-D Maxwell distribution with rms speed v_s
gives a Gaussian intensity envelope exp(-(t / tau_D)^2) with
tau_D = 1/(k_r v_s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..atomphys.species import SpeciesRecord
from ..atomphys.thermal import thermal_speed

__all__ = ["DephasingModel", "residual_wavevector", "doppler_lifetime"]


def residual_wavevector(lambda_s: float, lambda_c: float, geometry: str = "counter") -> float:
    """Signed axial wavevector mismatch in m^-1.

    Counter-propagating control subtracts the control wavevector from
    the signal one; co-propagating adds it (the phases then wind at
    optical rates and the coherence is short-lived).
    """
    if lambda_s <= 0 or lambda_c <= 0:
        raise DomainError("wavelengths must be positive")
    if geometry not in ("counter", "co"):
        raise DomainError(f"geometry must be 'counter' or 'co', got {geometry!r}")
    k_s = 2.0 * math.pi / lambda_s
    k_c = 2.0 * math.pi / lambda_c
    return k_s - k_c if geometry == "counter" else k_s + k_c


@dataclass(frozen=True)
class DephasingModel:
    """Gaussian dephasing envelope parameters.

    k_r in m^-1 (signed), v_s in m/s.  tau_D is derived so that
    tau_D * |k_r| * v_s = 1 holds by construction.
    """

    k_r: float
    v_s: float

    def __post_init__(self):
        if self.v_s <= 0:
            raise DomainError("v_s must be positive")

    @property
    def tau_d(self) -> float:
        """1/e time of the intensity envelope; +inf for perfect matching."""
        if self.k_r == 0.0:
            return math.inf
        return 1.0 / (abs(self.k_r) * self.v_s)

    def envelope(self, tau):
        """Normalized retrieval efficiency exp(-(tau/tau_D)^2)."""
        tau = np.asarray(tau, dtype=float)
        if self.k_r == 0.0:
            out = np.ones_like(tau)
        else:
            out = np.exp(-((tau * abs(self.k_r) * self.v_s) ** 2))
        return float(out) if out.ndim == 0 else out


def doppler_lifetime(
    lambda_s: float,
    lambda_c: float,
    temperature: float,
    species: SpeciesRecord,
    geometry: str = "counter",
) -> float:
    """1/e intensity lifetime 1/(|k_r| v_s) in seconds.

    Returns +inf when the wavevectors cancel exactly (equal
    wavelengths, counter-propagating).
    """
    if temperature <= 0:
        raise DomainError("temperature must be positive")
    model = DephasingModel(
        k_r=residual_wavevector(lambda_s, lambda_c, geometry),
        v_s=thermal_speed(species, temperature),
    )
    return model.tau_d
