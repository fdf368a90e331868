"""Derived memory curves: lifetime, efficiency versus energy, 1/e fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, DomainError, LifetimeRangeError
from ..atomphys.species import SpeciesRecord
from ..atomphys.thermal import ThermalEnsemble
from .schedule import ProtocolSchedule, Calibration
from .grid import SolverGrid
from .propagate import propagate_storage, propagate_retrieval

__all__ = ["LifetimeCurve", "EfficiencyPoint", "LifetimeFit",
           "lifetime_curve", "efficiency_vs_energy", "fit_lifetime"]


@dataclass
class LifetimeCurve:
    """Normalized memory efficiency versus storage time.

    Iterating yields (tau, eta_normalized) pairs.  eta_normalized is
    eta_total(tau) / eta_total(0), where the zero-delay reference
    extends the dark evolution back to the read-in time, so the curve
    starts at 1 by construction.
    """

    taus: np.ndarray
    eta_normalized: np.ndarray
    eta_total: np.ndarray
    eta_in: float
    reference_eta_total: float
    diagnostics: dict = field(default_factory=dict)

    def __iter__(self):
        return iter(zip(self.taus.tolist(), self.eta_normalized.tolist()))

    def __len__(self):
        return self.taus.size


def lifetime_curve(
    schedule: ProtocolSchedule,
    taus,
    grid: SolverGrid,
    ensemble: ThermalEnsemble,
    species: SpeciesRecord,
    calibration: Calibration | None = None,
) -> LifetimeCurve:
    """Storage once, then one retrieval per requested storage time.

    taus are center-to-center read-in to read-out separations in
    seconds; they must clear the read-out window half width or the
    staged model would overlap its own read-in (except for the
    internal zero-delay reference, which is defined by continuation).
    """
    taus = np.asarray(sorted(float(t) for t in taus))
    if taus.size == 0:
        raise DomainError("need at least one storage time")
    if np.any(taus < 0):
        raise DomainError("storage times must be non-negative")

    state, st_result = propagate_storage(schedule, grid, ensemble, species, calibration)

    def run(tau, allow_rewind=False):
        sched = schedule.with_storage_time(tau)
        res = propagate_retrieval(state, sched, grid, species, calibration,
                                  allow_rewind=allow_rewind)
        return res.eta_total

    reference = run(0.0, allow_rewind=True)
    eta_tot = np.array([run(tau, allow_rewind=True) for tau in taus])
    if reference <= 0.0:
        raise ConfigurationError("zero-delay retrieval efficiency vanished; "
                                 "check control energy and overlap")
    return LifetimeCurve(
        taus=taus,
        eta_normalized=eta_tot / reference,
        eta_total=eta_tot,
        eta_in=state.eta_in,
        reference_eta_total=reference,
        diagnostics={"storage": st_result.diagnostics},
    )


@dataclass(frozen=True)
class EfficiencyPoint:
    energy: float      # J per control pulse (both pulses equal)
    eta_total: float
    eta_in: float


def efficiency_vs_energy(
    schedule: ProtocolSchedule,
    energies,
    grid: SolverGrid,
    ensemble: ThermalEnsemble,
    species: SpeciesRecord,
    calibration: Calibration | None = None,
) -> list[EfficiencyPoint]:
    """Total efficiency against control pulse energy at fixed storage time.

    Both control pulses are set to the same energy at every point,
    matching how the read-out pulse tracks the read-in pulse on the
    real setup.
    """
    energies = [float(e) for e in energies]
    if any(e < 0 for e in energies):
        raise DomainError("pulse energies must be non-negative")
    points = []
    for e in energies:
        sched = schedule.with_energy(e)
        if e == 0.0:
            # no control, nothing stored or retrieved
            state, res = propagate_storage(sched, grid, ensemble, species, calibration)
            points.append(EfficiencyPoint(e, 0.0, res.eta_in))
            continue
        state, _ = propagate_storage(sched, grid, ensemble, species, calibration)
        res = propagate_retrieval(state, sched, grid, species, calibration,
                                  allow_rewind=True)
        points.append(EfficiencyPoint(e, res.eta_total, res.eta_in))
    return points


@dataclass(frozen=True)
class LifetimeFit:
    """First 1/e crossing of a normalized decay curve.

    value is the interpolated crossing time; crossings lists every
    downward 1/e crossing found, and oscillatory is set when the curve
    re-crosses after the first passage (beating curves do).
    """

    value: float
    crossings: tuple[float, ...]
    oscillatory: bool

    def __float__(self):
        return self.value


def fit_lifetime(curve) -> LifetimeFit:
    """Locate 1/e crossings of (tau, eta_normalized) samples.

    Accepts a LifetimeCurve or any iterable of (tau, eta) pairs.
    Linear interpolation between the bracketing samples; raises
    LifetimeRangeError if the curve never reaches 1/e.
    """
    pairs = np.asarray([(float(a), float(b)) for a, b in curve])
    if pairs.shape[0] < 2:
        raise DomainError("need at least two samples to locate a crossing")
    tau, eta = pairs[:, 0], pairs[:, 1]
    if np.any(np.diff(tau) <= 0):
        raise DomainError("storage times must be strictly increasing")

    target = 1.0 / math.e
    crossings = []
    for i in range(tau.size - 1):
        if eta[i] >= target > eta[i + 1]:
            frac = (eta[i] - target) / (eta[i] - eta[i + 1])
            crossings.append(float(tau[i] + frac * (tau[i + 1] - tau[i])))
    if not crossings:
        raise LifetimeRangeError(
            f"curve stays above 1/e out to {tau[-1]:.3e} s; extend the scan"
        )
    return LifetimeFit(
        value=crossings[0],
        crossings=tuple(crossings),
        oscillatory=len(crossings) > 1,
    )
