"""Doppler-broadened linear absorption and temperature fitting.

The absorption coefficient sums one Voigt profile per resolved
hyperfine component F_l -> F_u, weighted by the thermal population of
F_l and the squared relative line strength.  Each component carries an
integrated area 2 pi kappa^2 with

    kappa^2 = n p(F_l) w(F_l,F_u)^2 omega d^2 / (6 hbar eps0 c),

the same field-atom coupling normalization the propagation solver
uses, so a fitted spectrum and a simulated pulse see one consistent
optical depth.  d is the reduced J -> J' dipole; the factor 1/3 is the
isotropic average for linearly polarized light on an unpolarized
ensemble.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.constants as sc
from scipy.optimize import least_squares
from scipy.special import voigt_profile

from ..errors import DomainError, FitConvergenceError
from .species import SpeciesRecord
from .thermal import ThermalEnsemble, make_ensemble
from .angular import relative_line_strength

__all__ = ["voigt_absorption", "transmission_spectrum", "fit_temperature"]


def _components(species: SpeciesRecord, lower: str, upper: str, splitting_scale: float):
    """Yield (center offset rad/s, squared strength * population) per line."""
    man_l = species.manifold(lower)
    man_u = species.manifold(upper)
    I = species.nuclear_spin
    g_total = sum(2 * lv.F + 1 for lv in man_l.levels)
    out = []
    for ll in man_l.levels:
        pop = (2 * ll.F + 1) / g_total
        for lu in man_u.levels:
            w = relative_line_strength(ll.F, lu.F, man_l.J, man_u.J, I)
            if w == 0.0:
                continue
            center = splitting_scale * (lu.offset - ll.offset)
            out.append((center, pop * w * w))
    return out


def voigt_absorption(
    detuning,
    ensemble: ThermalEnsemble,
    species: SpeciesRecord,
    lower: str | None = None,
    upper: str | None = None,
    splitting_scale: float = 1.0,
):
    """Absorption coefficient (m^-1) at the given detuning(s) in rad/s.

    Detuning is measured from the hyperfine centroid of the chosen
    transition (default: the lower leg of the species ladder).  Accepts
    a scalar or an array and returns the matching shape.
    """
    if lower is None or upper is None:
        lower, upper = species.ladder[0], species.ladder[1]
    tr = species.transition(lower, upper)
    gamma_e = species.manifold(upper).linewidth

    sigma_d = tr.wavenumber * ensemble.thermal_speed  # Doppler rms width, rad/s
    kappa_scale = (
        ensemble.number_density
        * tr.angular_frequency
        * tr.reduced_dipole**2
        / (6.0 * sc.hbar * sc.epsilon_0 * sc.c)
    )

    delta = np.asarray(detuning, dtype=float)
    alpha = np.zeros_like(delta)
    for center, weight in _components(species, lower, upper, splitting_scale):
        alpha += (
            2.0 * math.pi * kappa_scale * weight
            * voigt_profile(delta - center, sigma_d, 0.5 * gamma_e)
        )
    if np.isscalar(detuning):
        return float(alpha)
    return alpha


def transmission_spectrum(detuning, ensemble, species, lower=None, upper=None):
    """exp(-alpha L) across the cell for the given detunings."""
    alpha = voigt_absorption(detuning, ensemble, species, lower, upper)
    return np.exp(-np.asarray(alpha) * ensemble.cell_length)


def fit_temperature(
    spectrum,
    species: SpeciesRecord,
    cell_length: float,
    lower: str | None = None,
    upper: str | None = None,
    initial_temperature: float = 330.0,
) -> float:
    """Fit a cell temperature to a measured transmission spectrum.

    ``spectrum`` is an iterable of (detuning rad/s, transmission) pairs.
    The number density is tied to the saturated vapor pressure at the
    trial temperature, so temperature is the only free parameter.
    Returns the fitted temperature in K.
    """
    data = np.asarray(list(spectrum), dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 5:
        raise DomainError("spectrum must contain at least 5 (detuning, transmission) pairs")
    delta, trans = data[:, 0], data[:, 1]
    if np.any(trans < -1e-6) or np.any(trans > 1.0 + 1e-3):
        raise DomainError("transmission values must lie in [0, 1]")
    if cell_length <= 0:
        raise DomainError("cell_length must be positive")

    def residual(params):
        (temp,) = params
        if temp <= 1.0:
            return np.full_like(trans, 1e3)
        ens = make_ensemble(species, temp, cell_length)
        model = np.exp(-voigt_absorption(delta, ens, species, lower, upper) * cell_length)
        return model - trans

    res = least_squares(
        residual,
        x0=[initial_temperature],
        bounds=([10.0], [2000.0]),
        xtol=1e-12,
        ftol=1e-12,
    )
    if not res.success:
        raise FitConvergenceError(
            "temperature fit did not converge", {"status": res.status, "cost": res.cost}
        )
    rms = math.sqrt(2.0 * res.cost / len(trans))
    if rms > 0.2:
        raise FitConvergenceError(
            "temperature fit converged to a poor solution", {"rms_residual": rms}
        )
    depth = float(np.max(-residual([res.x[0]]) + (1.0 - trans)))
    if depth < 1e-3:
        raise FitConvergenceError(
            "spectrum shows no absorption line; temperature unidentifiable",
            {"fitted_depth": depth},
        )
    return float(res.x[0])
