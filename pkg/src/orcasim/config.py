"""Config file loading, resolution, hashing and model builders.

Configs are YAML trees; named presets ship inside the package and a
path on disk works the same way.  Builders translate validated
sub-trees into the solver and counting models, so the CLI and the
tests construct runs identically.
"""

from __future__ import annotations

import hashlib
import json
import os
from importlib import resources

import yaml

from orcasim.atomphys import load_species, make_ensemble
from orcasim.errors import ConfigurationError
from orcasim.mbsolver import (
    Calibration,
    ControlPulse,
    ProtocolSchedule,
    SignalPulse,
    make_grid,
)
from orcasim.photonstats import (
    DetectorModel,
    GateSpec,
    MemoryChannelModel,
    PairSourceModel,
)

_DETECTOR_ALIASES = {"idler": "i", "i": "i", "s1": "s1", "s2": "s2"}


def available_configs() -> list[str]:
    """Names of the packaged preset configs."""
    root = resources.files("orcasim.configs")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def load_config(name_or_path: str) -> dict:
    """Read a YAML config from disk or from the packaged presets."""
    if os.path.exists(name_or_path):
        with open(name_or_path) as fh:
            text = fh.read()
    else:
        name = name_or_path if name_or_path.endswith(".yaml") \
            else name_or_path + ".yaml"
        ref = resources.files("orcasim.configs").joinpath(name)
        if not ref.is_file():
            raise ConfigurationError(
                f"no config file or preset named {name_or_path!r}; "
                f"presets: {', '.join(available_configs())}")
        text = ref.read_text()
    data = yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {name_or_path!r} is not a mapping")
    return data


def canonical_json(obj) -> str:
    """Deterministic JSON rendering used for hashing and reports."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def config_hash(resolved: dict) -> str:
    """Short content hash of the resolved config tree."""
    return hashlib.sha256(canonical_json(resolved).encode()).hexdigest()[:16]


def _require(cfg: dict, key: str, context: str) -> object:
    if key not in cfg:
        raise ConfigurationError(f"{context} config is missing {key!r}")
    return cfg[key]


def build_species(cfg: dict):
    return load_species(str(_require(cfg, "species", "run")))


def build_ensemble(cfg: dict, species):
    ens = _require(cfg, "ensemble", "run")
    density = ens.get("number_density")
    return make_ensemble(
        species,
        float(_require(ens, "temperature", "ensemble")),
        float(_require(ens, "cell_length", "ensemble")),
        number_density=None if density is None else float(density),
    )


def build_schedule(cfg: dict) -> ProtocolSchedule:
    sch = _require(cfg, "schedule", "run")
    sig = _require(sch, "signal", "schedule")
    signal = SignalPulse(
        center=float(sig.get("center", 0.0)),
        fwhm=float(_require(sig, "fwhm", "signal")),
        wavelength=float(_require(sig, "wavelength", "signal")),
        mean_photons=float(sig.get("mean_photons", 1.0)),
    )
    controls = []
    for entry in _require(sch, "controls", "schedule"):
        controls.append(ControlPulse(
            center=float(_require(entry, "center", "control")),
            fwhm=float(_require(entry, "fwhm", "control")),
            energy=float(_require(entry, "energy", "control")),
            wavelength=float(_require(entry, "wavelength", "control")),
            waist=float(_require(entry, "waist", "control")),
            role=str(entry.get("role", "in")),
        ))
    return ProtocolSchedule(
        signal=signal,
        controls=tuple(controls),
        detuning=float(_require(sch, "detuning", "schedule")),
        two_photon_detuning=float(sch.get("two_photon_detuning", 0.0)),
        geometry=str(sch.get("geometry", "counter")),
    )


def build_calibration(cfg: dict) -> Calibration:
    cal = cfg.get("calibration", {})
    scale = cal.get("control_dipole_scale")
    return Calibration(
        dipole_scale=float(cal.get("dipole_scale", 1.0)),
        overlap_delay=float(cal.get("overlap_delay", 0.0)),
        control_dipole_scale=None if scale is None else float(scale),
    )


def build_grid(cfg: dict, species, ensemble, splitting_scale: float | None = None):
    g = cfg.get("grid", {})
    kwargs = dict(
        n_z=int(g.get("n_z", 32)),
        dt=float(g.get("dt", 4.0e-12)),
        n_velocity=int(g.get("n_velocity", 24)),
        pumped=bool(g.get("pumped", False)),
    )
    if splitting_scale is None:
        splitting_scale = g.get("splitting_scale")
    if splitting_scale is not None:
        kwargs["splitting_scale"] = float(splitting_scale)
    return make_grid(species, ensemble, **kwargs)


def build_source_model(cfg: dict) -> PairSourceModel:
    src = _require(cfg, "source", "counts")
    detectors = {}
    for name, det in _require(src, "detectors", "source").items():
        key = _DETECTOR_ALIASES.get(str(name))
        if key is None:
            raise ConfigurationError(f"unknown detector name {name!r}")
        detectors[key] = DetectorModel(
            efficiency=float(_require(det, "efficiency", f"detector {name}")),
            dark_rate_hz=float(det.get("dark_hz", det.get("dark_rate_hz", 0.0))),
        )
    return PairSourceModel(
        mu=float(_require(src, "mu", "source")),
        eta_signal=float(_require(src, "eta_signal", "source")),
        eta_idler=float(_require(src, "eta_idler", "source")),
        detectors=detectors,
        pulse_period_ps=float(src.get("pulse_period_ps", 12500.0)),
        trigger_period_ps=float(src.get("trigger_period_ps", 50000.0)),
        pair_slots=str(src.get("pair_slots", "trigger")),
        n_max=int(src.get("n_max", 10)),
        jitter_ps=float(src.get("jitter_ps", 350.0)),
    )


def build_memory_model(cfg: dict) -> MemoryChannelModel:
    mem = _require(cfg, "memory", "counts")
    slots = {float(k): float(v)
             for k, v in (mem.get("slots") or {}).items()}
    return MemoryChannelModel(
        read_in_efficiency=float(_require(mem, "read_in_efficiency", "memory")),
        slots=slots,
        added_noise=float(mem.get("added_noise", 0.0)),
        noise_kind=str(mem.get("noise_kind", "thermal")),
    )


def build_gates(cfg: dict) -> GateSpec:
    g = _require(cfg, "gates", "counts")
    return GateSpec(
        read_in_center_ps=float(_require(g, "read_in_center_ps", "gates")),
        read_in_width_ps=float(g.get("read_in_width_ps", 2500.0)),
        read_out_offset_ps=float(g.get("read_out_offset_ps", 3500.0)),
        read_out_width_ps=float(g.get("read_out_width_ps", 2500.0)),
        coincidence_width_ps=float(g.get("coincidence_width_ps", 3500.0)),
        arrival_bin_ps=float(g.get("arrival_bin_ps", 200.0)),
        coincidence_bin_ps=float(g.get("coincidence_bin_ps", 100.0)),
    )
