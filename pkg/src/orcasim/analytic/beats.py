"""Hyperfine beating of the retrieved field.

The stored coherence is distributed over the storage-manifold
hyperfine components reachable from the populated ground level.  Each
component F'' evolves at its own offset omega_F, so at read-out the
amplitudes re-interfere:

    eta_N(tau) = |sum_F c_F exp(i omega_F tau)|^2 * exp(-(tau/tau_D)^2)

with amplitudes normalized to sum to one so eta_N(0) = 1.  The default
amplitudes follow the same signed line-strength products as the
propagation solver: storing through any intermediate level and
retrieving through any other both contribute one factor of
sum_Fe s(Fg,Fe) s(Fe,Fs), so each component is weighted by the square
of that sum.  Intermediate-manifold splittings are neglected against
the one-photon detuning (a few percent correction at a few GHz).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..atomphys.species import SpeciesRecord
from ..atomphys.angular import relative_line_strength
from ..atomphys.thermal import thermal_speed
from .dephasing import residual_wavevector

__all__ = ["BeatModel", "beat_envelope", "storage_beat_model"]


@dataclass(frozen=True)
class BeatModel:
    """Amplitudes c_F (complex) and offsets omega_F (rad/s), plus tau_D."""

    components: tuple[tuple[complex, float], ...]
    tau_d: float

    def __post_init__(self):
        if not self.components:
            raise DomainError("beat model needs at least one component")
        if self.tau_d <= 0:
            raise DomainError("tau_d must be positive (use math.inf for no dephasing)")
        total = sum(c for c, _ in self.components)
        if abs(total - 1.0) > 1e-9:
            raise DomainError(
                f"component amplitudes must sum to 1 (got {total!r}); "
                "use BeatModel.normalized()"
            )

    @classmethod
    def normalized(cls, components, tau_d: float) -> "BeatModel":
        """Scale amplitudes by their sum so the tau=0 retrieval is 1."""
        comps = [(complex(c), float(w)) for c, w in components]
        total = sum(c for c, _ in comps)
        if abs(total) == 0.0:
            raise DomainError("component amplitudes sum to zero")
        return cls(tuple((c / total, w) for c, w in comps), tau_d)


def beat_envelope(model: BeatModel, tau):
    """Normalized retrieval efficiency at storage time tau (s)."""
    tau = np.asarray(tau, dtype=float)
    amp = np.zeros(tau.shape, dtype=complex)
    for c, w in model.components:
        amp += c * np.exp(1j * w * tau)
    out = np.abs(amp) ** 2
    if math.isfinite(model.tau_d):
        out = out * np.exp(-((tau / model.tau_d) ** 2))
    return float(out) if out.ndim == 0 else out


def storage_beat_model(
    species: SpeciesRecord,
    temperature: float,
    geometry: str = "counter",
    pumped: bool = False,
    amplitudes: dict[float, float] | None = None,
) -> BeatModel:
    """Beat model of the retrieved field for a warm vapor.

    One component per storage hyperfine level F reachable from the
    populated ground level, weighted by the squared two-photon
    line-strength sum (store and retrieve each contribute one factor).
    ``amplitudes`` overrides the default weights, keyed by F, for
    optically pumped or otherwise engineered populations; zero-weight
    components are dropped.  ``pumped=True`` is shorthand for keeping
    only the stretch component F_g + 2.
    """
    if temperature <= 0:
        raise DomainError("temperature must be positive")
    g_name, e_name, s_name = species.ladder
    man_g = species.manifold(g_name)
    man_e = species.manifold(e_name)
    man_s = species.manifold(s_name)
    Fg = species.memory_ground_F
    I = species.nuclear_spin

    lower, upper = species.ladder_transitions
    k_r = residual_wavevector(lower.wavelength, upper.wavelength, geometry)
    v_s = thermal_speed(species, temperature)
    tau_d = math.inf if k_r == 0.0 else 1.0 / (abs(k_r) * v_s)

    comps = []
    for ls in man_s.levels:
        if pumped and abs(ls.F - (Fg + 2)) > 1e-9:
            continue
        two_photon = sum(
            relative_line_strength(Fg, le.F, man_g.J, man_e.J, I)
            * relative_line_strength(le.F, ls.F, man_e.J, man_s.J, I)
            for le in man_e.levels
        )
        weight = two_photon**2 if amplitudes is None else amplitudes.get(ls.F, 0.0)
        if weight == 0.0:
            continue
        comps.append((weight, ls.offset))
    if not comps:
        raise DomainError("no storage component carries weight")
    return BeatModel.normalized(comps, tau_d)
