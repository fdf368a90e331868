"""Solver state containers.

The ensemble state keeps one intermediate coherence amplitude per
retained intermediate hyperfine level and one storage coherence per
storage level, for every (z node, velocity node).  Levels shared by
several ladder chains appear once, which keeps the linearized
dynamics of the full multilevel ladder exact.

Normalization: the field amplitude A is in sqrt(photons/s); the
atomic amplitudes are scaled so that

    sum_z w_z sum_v w_v (|P|^2 + |S|^2)

is an excitation number directly comparable to photon numbers, and
field + atoms + integrated spontaneous loss is conserved.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import ConfigurationError, DomainError

__all__ = ["CouplingSet", "EnsembleState", "MemoryResult"]


@dataclass(frozen=True)
class CouplingSet:
    """Frozen per-run coupling tables shared by storage and retrieval."""

    z: np.ndarray            # (n_z+1,) node positions, m
    v: np.ndarray            # (n_v,) velocity nodes, m/s
    w_v: np.ndarray          # (n_v,) quadrature weights, sum 1
    F_e: np.ndarray          # (n_e,) retained intermediate levels
    F_s: np.ndarray          # (n_s,) retained storage levels
    kappa: np.ndarray        # (n_e,) field-atom coupling, sqrt(1/(m s))
    W: np.ndarray            # (n_e, n_s) control coupling weights
    omega_e: np.ndarray      # (n_e,) hyperfine offsets, rad/s (scaled)
    omega_s: np.ndarray      # (n_s,)
    gamma_e: float           # population decay rates, rad/s
    gamma_s: float
    k_s: float               # signal wavenumber, rad/m
    k_r: float               # residual two-photon wavenumber, rad/m
    detuning: float          # one-photon detuning, rad/s
    two_photon_detuning: float
    slip: float              # control arrival slip d(t_arrival)/dz, s/m
    length: float            # cell length, m

    @property
    def dz(self) -> float:
        return float(self.z[1] - self.z[0])

    @property
    def z_weights(self) -> np.ndarray:
        """Composite Simpson weights over the z nodes (trapezoid fallback).

        Fourth-order quadrature keeps the norm bookkeeping well below
        the field-marching error; an even node count drops back to the
        trapezoid rule.
        """
        n = self.z.size
        if n < 3 or n % 2 == 0:
            w = np.full(n, self.dz)
            w[0] *= 0.5
            w[-1] *= 0.5
            return w
        w = np.full(n, 2.0, dtype=float)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        return w * (self.dz / 3.0)

    def rate_e(self) -> np.ndarray:
        """Complex decay+rotation rate of P, shape (n_v, n_e)."""
        det = self.detuning + self.omega_e[None, :] + self.k_s * self.v[:, None]
        return -(0.5 * self.gamma_e) - 1j * det

    def rate_s(self) -> np.ndarray:
        """Complex decay+rotation rate of S, shape (n_v, n_s)."""
        det = self.two_photon_detuning + self.omega_s[None, :] + self.k_r * self.v[:, None]
        return -(0.5 * self.gamma_s) - 1j * det


@dataclass
class EnsembleState:
    """Atomic amplitudes over (z, velocity, level) at one instant."""

    P: np.ndarray            # (n_z+1, n_v, n_e) complex
    S: np.ndarray            # (n_z+1, n_v, n_s) complex
    time: float              # s
    coupling: CouplingSet
    input_norm: float = 0.0  # photons in the stored input pulse
    eta_in: float = 0.0

    def copy(self) -> "EnsembleState":
        return replace(self, P=self.P.copy(), S=self.S.copy())

    def stored_norm(self) -> float:
        """Total atomic excitation number (P and S together)."""
        wz = self.coupling.z_weights
        wv = self.coupling.w_v
        dens = (np.abs(self.P) ** 2).sum(axis=2) + (np.abs(self.S) ** 2).sum(axis=2)
        return float(wz @ (dens @ wv))

    def spin_wave_norm(self) -> float:
        """Excitation number held in the storage coherences only."""
        wz = self.coupling.z_weights
        wv = self.coupling.w_v
        return float(wz @ (((np.abs(self.S) ** 2).sum(axis=2)) @ wv))

    def retrievable_norm(self) -> float:
        """Norm of the velocity-averaged (phase-matched) spin wave.

        Motional dephasing randomizes the velocity phases; what a
        phase-matched read-out can collect scales with the coherent
        velocity average, so this is the quantity whose decay sets the
        memory lifetime.
        """
        wz = self.coupling.z_weights
        mean = np.tensordot(self.S, self.coupling.w_v, axes=([1], [0]))  # (n_z+1, n_s)
        return float(wz @ (np.abs(mean) ** 2).sum(axis=1))


def _require_positive(name, value):
    if value is None or value <= 0:
        raise DomainError(f"{name} must be positive")


@dataclass
class MemoryResult:
    """Efficiencies and field envelopes of one storage (+ retrieval) run."""

    eta_in: float
    eta_total: float | None = None
    time_in: np.ndarray | None = None
    input_envelope: np.ndarray | None = None
    transmitted_envelope: np.ndarray | None = None
    time_out: np.ndarray | None = None
    recalled_envelope: np.ndarray | None = None
    stored_series_time: np.ndarray | None = None
    stored_series: np.ndarray | None = None
    conservation_defect: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not -1e-9 <= self.eta_in <= 1.0 + 1e-9:
            raise ConfigurationError(f"eta_in out of range: {self.eta_in}")
        if self.eta_total is not None:
            if self.eta_total < -1e-9 or self.eta_total > self.eta_in + 1e-9:
                raise ConfigurationError(
                    f"eta_total {self.eta_total} outside [0, eta_in={self.eta_in}]"
                )

    @property
    def eta_out(self) -> float | None:
        """Retrieval efficiency of the stored excitation."""
        if self.eta_total is None:
            return None
        if self.eta_in == 0.0:
            return 0.0
        return self.eta_total / self.eta_in
