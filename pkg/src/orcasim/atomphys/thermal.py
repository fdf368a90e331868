"""Thermal ensembles and Gauss-Hermite velocity quadrature."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.constants as sc
from numpy.polynomial.hermite import hermgauss

from ..errors import DomainError
from .species import SpeciesRecord

__all__ = ["ThermalEnsemble", "thermal_speed", "velocity_quadrature", "make_ensemble"]


def thermal_speed(species: SpeciesRecord, temperature: float) -> float:
    """One-dimensional rms speed sqrt(kB T / m) in m/s."""
    if temperature <= 0:
        raise DomainError("temperature must be positive")
    return math.sqrt(sc.k * temperature / species.mass)


@dataclass(frozen=True)
class ThermalEnsemble:
    """A warm vapor column: temperature, density, rms speed, cell length.

    All SI: K, m^-3, m/s, m.
    """

    temperature: float
    number_density: float
    thermal_speed: float
    cell_length: float

    def __post_init__(self):
        if self.temperature <= 0 or self.cell_length <= 0:
            raise DomainError("temperature and cell_length must be positive")
        if self.number_density < 0:
            raise DomainError("number_density must be non-negative")
        if self.thermal_speed <= 0:
            raise DomainError("thermal_speed must be positive")


def make_ensemble(
    species: SpeciesRecord,
    temperature: float,
    cell_length: float,
    number_density: float | None = None,
) -> ThermalEnsemble:
    """Build an ensemble; density defaults to the saturated vapor value."""
    if number_density is None:
        number_density = species.vapor_pressure.number_density(temperature)
    return ThermalEnsemble(
        temperature=temperature,
        number_density=number_density,
        thermal_speed=thermal_speed(species, temperature),
        cell_length=cell_length,
    )


def velocity_quadrature(ensemble: ThermalEnsemble, n_points: int) -> list[tuple[float, float]]:
    """Nodes and weights integrating the 1-D Maxwell velocity density.

    Gauss-Hermite quadrature mapped to velocity: nodes sqrt(2) v_s x_k,
    weights w_k / sqrt(pi).  Weights sum to 1 exactly and the rule is
    exact for polynomials in v up to degree 2 n_points - 1, which makes
    Doppler phase averages exp(i k v t) accurate to machine precision
    for k v_s t up to a few radians at n_points ~ 64.
    """
    if n_points < 1:
        raise DomainError("n_points must be >= 1")
    x, w = hermgauss(n_points)
    v = math.sqrt(2.0) * ensemble.thermal_speed * x
    wt = w / math.sqrt(math.pi)
    return [(float(vi), float(wi)) for vi, wi in zip(v, wt)]
