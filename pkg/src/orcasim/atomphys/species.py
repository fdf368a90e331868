"""Species records: masses, hyperfine manifolds, transitions, vapor pressure.

Data ships as YAML under ``orcasim/data``; ``load_species`` accepts a
bundled species name (with common aliases) or an explicit path to a
file with the same layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import scipy.constants as sc
import yaml

from ..errors import ConfigurationError, DomainError

__all__ = [
    "HyperfineLevel",
    "Manifold",
    "Transition",
    "VaporPressureModel",
    "SpeciesRecord",
    "hyperfine_offset",
    "load_species",
]

_ALIASES = {
    "cesium-133": "cesium133",
    "cesium133": "cesium133",
    "cs": "cesium133",
    "cs133": "cesium133",
    "rubidium-87": "rubidium87",
    "rubidium87": "rubidium87",
    "rb": "rubidium87",
    "rb87": "rubidium87",
}


def hyperfine_offset(F, I, J, A, B) -> float:
    """Hyperfine energy offset of level F about the manifold centroid.

    A and B are the magnetic-dipole and electric-quadrupole constants in
    rad/s; the result is in rad/s.  The (2F+1)-weighted mean over the
    manifold vanishes by construction.
    """
    K = F * (F + 1) - I * (I + 1) - J * (J + 1)
    e = 0.5 * A * K
    if B != 0.0:
        denom = 2 * I * (2 * I - 1) * 2 * J * (2 * J - 1)
        if denom == 0:
            raise DomainError("quadrupole constant requires I,J >= 1")
        e += B * (1.5 * K * (K + 1) - 2 * I * (I + 1) * J * (J + 1)) / denom
    return e


@dataclass(frozen=True)
class HyperfineLevel:
    F: float
    offset: float  # rad/s about the manifold centroid


@dataclass(frozen=True)
class Manifold:
    name: str
    J: float
    A: float          # rad/s
    B: float          # rad/s
    linewidth: float  # population decay rate Gamma, rad/s
    levels: tuple[HyperfineLevel, ...]

    def level(self, F) -> HyperfineLevel:
        for lv in self.levels:
            if abs(lv.F - F) < 1e-9:
                return lv
        raise DomainError(f"manifold {self.name} has no F={F}")


@dataclass(frozen=True)
class Transition:
    lower: str
    upper: str
    wavelength: float      # m
    reduced_dipole: float  # C m, <J'||d||J>

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def angular_frequency(self) -> float:
        return 2.0 * math.pi * sc.c / self.wavelength


@dataclass(frozen=True)
class VaporPressureModel:
    a: float
    b: float
    citation: str = ""

    def pressure(self, temperature: float) -> float:
        """Vapor pressure in Pa (input model is log10 of torr)."""
        if temperature <= 0:
            raise DomainError("temperature must be positive")
        return 10.0 ** (self.a - self.b / temperature) * 133.322387415

    def number_density(self, temperature: float) -> float:
        """Saturated number density in m^-3 at the given temperature."""
        return self.pressure(temperature) / (sc.k * temperature)


@dataclass(frozen=True)
class SpeciesRecord:
    name: str
    mass: float
    nuclear_spin: float
    manifolds: dict[str, Manifold]
    transitions: dict[tuple[str, str], Transition]
    vapor_pressure: VaporPressureModel
    ladder: tuple[str, ...] = field(default=())
    memory_ground_F: float = 0.0

    def manifold(self, name: str) -> Manifold:
        try:
            return self.manifolds[name]
        except KeyError:
            raise DomainError(f"{self.name} has no manifold {name!r}") from None

    def transition(self, lower: str, upper: str) -> Transition:
        try:
            return self.transitions[(lower, upper)]
        except KeyError:
            raise DomainError(
                f"{self.name} has no transition {lower} -> {upper}"
            ) from None

    @property
    def ladder_transitions(self) -> tuple[Transition, Transition]:
        """(lower leg, upper leg) of the cascade."""
        g, e, s = self.ladder
        return self.transition(g, e), self.transition(e, s)


def _build_manifold(name: str, raw: dict, I: float) -> Manifold:
    J = float(raw["J"])
    A = 2.0 * math.pi * 1e6 * float(raw["A_MHz"])
    B = 2.0 * math.pi * 1e6 * float(raw.get("B_MHz", 0.0))
    gamma = 2.0 * math.pi * 1e6 * float(raw.get("linewidth_MHz", 0.0))
    f_min, f_max = abs(J - I), J + I
    n = int(round(f_max - f_min)) + 1
    levels = tuple(
        HyperfineLevel(F=f_min + k, offset=hyperfine_offset(f_min + k, I, J, A, B))
        for k in range(n)
    )
    return Manifold(name=name, J=J, A=A, B=B, linewidth=gamma, levels=levels)


def load_species(name_or_path: str | Path) -> SpeciesRecord:
    """Load a bundled species by name (e.g. ``"cesium-133"``) or a YAML path."""
    p = Path(str(name_or_path))
    if p.suffix in (".yaml", ".yml") or p.exists():
        text = p.read_text()
    else:
        key = _ALIASES.get(str(name_or_path).lower())
        if key is None:
            raise ConfigurationError(
                f"unknown species {name_or_path!r}; bundled: cesium-133, rubidium-87"
            )
        text = resources.files("orcasim.data").joinpath(f"{key}.yaml").read_text()

    raw = yaml.safe_load(text)
    try:
        I = float(raw["nuclear_spin"])
        manifolds = {
            mname: _build_manifold(mname, mraw, I)
            for mname, mraw in raw["manifolds"].items()
        }
        transitions = {}
        for tname, traw in raw["transitions"].items():
            lower, upper = tname.split("-", 1)
            transitions[(lower, upper)] = Transition(
                lower=lower,
                upper=upper,
                wavelength=float(traw["wavelength_nm"]) * 1e-9,
                reduced_dipole=float(traw["reduced_dipole_Cm"]),
            )
        vp = raw["vapor_pressure"]
        record = SpeciesRecord(
            name=str(raw["name"]),
            mass=float(raw["mass_kg"]),
            nuclear_spin=I,
            manifolds=manifolds,
            transitions=transitions,
            vapor_pressure=VaporPressureModel(
                a=float(vp["coefficients"]["a"]),
                b=float(vp["coefficients"]["b"]),
                citation=str(vp.get("citation", "")),
            ),
            ladder=tuple(raw.get("ladder", ())),
            memory_ground_F=float(raw.get("memory_ground_F", 0.0)),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigurationError(f"malformed species file: missing {exc}") from exc

    for mname in record.ladder:
        if mname not in record.manifolds:
            raise ConfigurationError(f"ladder names unknown manifold {mname!r}")
    return record
