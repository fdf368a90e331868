"""Command-line front end: reproducible runs with plot-ready outputs.

Every output file embeds the tool version and a hash of the resolved
config, and reruns with the same config and seed are byte-identical:
no timestamps, fixed column orders, canonical JSON and %.12g floats.
"""

from __future__ import annotations

import argparse
import copy
import os
import sys
from dataclasses import asdict, replace

import numpy as np

import orcasim
from orcasim import config as cfgmod
from orcasim.analytic import (
    BeatModel,
    beat_envelope,
    doppler_lifetime,
    mu1,
    storage_beat_model,
)
from orcasim.atomphys import fit_temperature, transmission_spectrum
from orcasim.errors import (
    ConfigurationError,
    DomainError,
    EstimatorUndefinedError,
    FitConvergenceError,
    LifetimeRangeError,
    SolverInstabilityError,
    TruncationError,
)
from orcasim.mbsolver import efficiency_vs_energy, fit_lifetime, lifetime_curve
from orcasim.photonstats import (
    arrival_histogram,
    exact_click_probabilities,
    g2h,
    gated_counts,
    heralding_budget,
    readout_series,
    simulate_event_streams,
    startstop_histogram,
    write_stream,
)

_CONFIG_EXIT = 2
_NUMERICAL_EXIT = 3


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _write_csv(path: str, header: str, columns, rows) -> None:
    lines = [header, ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _stamp(digest: str) -> str:
    return f"# orcasim {orcasim.__version__} config {digest}"


def _sanitize(obj):
    """Make a config echo JSON-serializable (tuples, numpy scalars)."""
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _write_report(path: str, digest: str, payload: dict, fmt: str) -> None:
    record = {"version": orcasim.__version__, "config_hash": digest}
    record.update(payload)
    record = _sanitize(record)
    if fmt == "json":
        with open(path, "w") as fh:
            fh.write(cfgmod.canonical_json(record) + "\n")
        return
    # csv flavor: flattened key,value rows
    rows = []

    def flatten(prefix, obj):
        if isinstance(obj, dict):
            for key in sorted(obj):
                flatten(f"{prefix}{key}." if prefix else f"{key}.", obj[key])
            return
        if isinstance(obj, list):
            for i, item in enumerate(obj):
                flatten(f"{prefix}{i}.", item)
            return
        rows.append((prefix.rstrip("."), "" if obj is None else _fmt(obj)))

    flatten("", record)
    _write_csv(path, _stamp(digest), ("key", "value"), rows)


def _report_path(out_dir: str, stem: str, fmt: str) -> str:
    return os.path.join(out_dir, f"{stem}.{'json' if fmt == 'json' else 'csv'}")


def _add_common(parser: argparse.ArgumentParser, default_config: str | None) -> None:
    parser.add_argument("--config", default=default_config,
                        help="preset name or YAML path")
    parser.add_argument("--seed", type=int, default=1, help="RNG seed")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default="json",
                        help="report flavor (data tables are always CSV)")


def cmd_lifetime(args) -> int:
    name = args.config
    if name is None:
        if args.species == "rb87":
            name = "lifetime_rb87"
        elif args.pumped:
            name = "lifetime_cs_pumped"
        else:
            name = "lifetime_cs"
    cfg = copy.deepcopy(cfgmod.load_config(name))
    if args.pumped:
        cfg.setdefault("grid", {})["pumped"] = True
    if args.splittings is not None:
        cfg.setdefault("grid", {})["splitting_scale"] = args.splittings
    digest = cfgmod.config_hash(cfg)

    species = cfgmod.build_species(cfg)
    ensemble = cfgmod.build_ensemble(cfg, species)
    schedule = cfgmod.build_schedule(cfg)
    calibration = cfgmod.build_calibration(cfg)
    grid = cfgmod.build_grid(cfg, species, ensemble)
    taus = [float(t) for t in cfg.get("lifetime", {}).get("taus", [])]
    if not taus:
        raise ConfigurationError("lifetime config needs lifetime.taus")

    curve = lifetime_curve(schedule, taus, grid, ensemble, species, calibration)
    fit = fit_lifetime(curve)

    scale = cfg.get("grid", {}).get("splitting_scale", 1.0)
    pumped = bool(cfg.get("grid", {}).get("pumped", False))
    cin = schedule.control("in")
    tau_d = doppler_lifetime(schedule.signal.wavelength, cin.wavelength,
                             ensemble.temperature, species, schedule.geometry)
    beats = storage_beat_model(species, ensemble.temperature,
                               schedule.geometry, pumped=pumped)
    if scale != 1.0:
        beats = BeatModel(
            components=tuple((c, w * scale) for c, w in beats.components),
            tau_d=beats.tau_d)
    tau_arr = np.asarray(curve.taus)
    doppler_env = (np.exp(-((tau_arr / tau_d) ** 2)) if np.isfinite(tau_d)
                   else np.ones_like(tau_arr))
    beat_env = beat_envelope(beats, tau_arr)

    os.makedirs(args.out, exist_ok=True)
    rows = zip(curve.taus.tolist(), curve.eta_normalized.tolist(),
               curve.eta_total.tolist(), doppler_env.tolist(),
               beat_env.tolist())
    _write_csv(os.path.join(args.out, "lifetime_curve.csv"), _stamp(digest),
               ("tau_s", "eta_normalized", "eta_total",
                "doppler_envelope", "beat_envelope"), rows)
    payload = {
        "fitted_lifetime_s": fit.value,
        "crossings_s": list(fit.crossings),
        "oscillatory": fit.oscillatory,
        "doppler_lifetime_s": tau_d if np.isfinite(tau_d) else None,
        "eta_in": curve.eta_in,
        "reference_eta_total": curve.reference_eta_total,
        "resolved_config": cfg,
    }
    _write_report(_report_path(args.out, "lifetime", args.format),
                  digest, payload, args.format)
    return 0


def cmd_efficiency_sweep(args) -> int:
    cfg = copy.deepcopy(cfgmod.load_config(args.config))
    digest = cfgmod.config_hash(cfg)
    species = cfgmod.build_species(cfg)
    ensemble = cfgmod.build_ensemble(cfg, species)
    schedule = cfgmod.build_schedule(cfg)
    calibration = cfgmod.build_calibration(cfg)
    grid = cfgmod.build_grid(cfg, species, ensemble)
    sweep = cfg.get("sweep", {})
    energies = [float(e) for e in sweep.get("energies", [])]
    if not energies:
        raise ConfigurationError("sweep config needs sweep.energies")
    fit_below = float(sweep.get("fit_below", 0.0))

    points = efficiency_vs_energy(schedule, energies, grid, ensemble,
                                  species, calibration)
    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "efficiency_sweep.csv"), _stamp(digest),
               ("energy_j", "eta_total", "eta_in"),
               [(p.energy, p.eta_total, p.eta_in) for p in points])

    best = max(points, key=lambda p: p.eta_total)
    exponent = None
    small = [p for p in points if 0.0 < p.energy <= fit_below
             and p.eta_total > 0.0]
    if len(small) >= 2:
        slope = np.polyfit(np.log([p.energy for p in small]),
                           np.log([p.eta_total for p in small]), 1)[0]
        exponent = float(slope)
    payload = {
        "max": {"energy_j": best.energy, "eta_total": best.eta_total,
                "eta_in": best.eta_in},
        "low_energy_exponent": exponent,
        "points": [{"energy_j": p.energy, "eta_total": p.eta_total,
                    "eta_in": p.eta_in} for p in points],
        "resolved_config": cfg,
    }
    _write_report(_report_path(args.out, "efficiency_sweep", args.format),
                  digest, payload, args.format)
    return 0


def _try_correlation(func, counts):
    try:
        res = func(counts)
    except EstimatorUndefinedError as exc:
        return {"value": None, "sigma": None, "note": str(exc),
                "counts": counts.as_dict()}
    return {"value": res.value, "sigma": res.sigma,
            "threshold": res.threshold, "counts": dict(res.counts)}


def cmd_counts(args) -> int:
    cfg = copy.deepcopy(cfgmod.load_config(args.config))
    if args.mu is not None:
        cfg.setdefault("source", {})["mu"] = args.mu
    if args.memory_noise is not None:
        kind, _, value = args.memory_noise.partition(":")
        if not value:
            raise ConfigurationError(
                "--memory-noise takes kind:photons, like thermal:0.01")
        cfg.setdefault("memory", {})["noise_kind"] = kind
        cfg["memory"]["added_noise"] = float(value)
    if args.duration_s is not None:
        cfg["duration_s"] = args.duration_s
    digest = cfgmod.config_hash(cfg)

    source = cfgmod.build_source_model(cfg)
    memory = cfgmod.build_memory_model(cfg)
    gates = cfgmod.build_gates(cfg)
    duration = float(cfg.get("duration_s", 0.0))
    if duration <= 0.0:
        raise ConfigurationError("counts config needs a positive duration_s")

    streams = simulate_event_streams(source, memory, gates, duration,
                                     args.seed)
    os.makedirs(args.out, exist_ok=True)
    if not args.no_streams:
        for label, stream in streams.items():
            write_stream(stream, os.path.join(args.out, f"stream_{label}.txt"))

    period = source.pulse_period_ps
    table_rows = []
    series_payload = {}
    for label, stream in streams.items():
        entries = []
        for delay, res in readout_series(stream, gates,
                                         pulse_period_ps=period):
            if res is None:
                entries.append({"delay_ps": delay, "value": None,
                                "sigma": None})
                table_rows.append((label, delay, "", ""))
            else:
                entries.append({"delay_ps": delay, "value": res.value,
                                "sigma": res.sigma})
                table_rows.append((label, delay, res.value, res.sigma))
        series_payload[label] = entries
    _write_csv(os.path.join(args.out, "correlation_table.csv"),
               _stamp(digest), ("config", "delay_ps", "g11", "sigma"),
               table_rows)

    for label, stream in streams.items():
        hist = arrival_histogram(stream, gates.arrival_bin_ps,
                                 normalized=True)
        per_det = [arrival_histogram(stream, gates.arrival_bin_ps,
                                     detector=d).counts
                   for d in ("i", "s1", "s2")]
        _write_csv(os.path.join(args.out, f"arrival_{label}.csv"),
                   _stamp(digest),
                   ("bin_center_ps", "counts", "rate_hz",
                    "counts_i", "counts_s1", "counts_s2"),
                   zip(hist.centers_ps.tolist(), hist.counts.tolist(),
                       hist.rate_hz.tolist(), per_det[0].tolist(),
                       per_det[1].tolist(), per_det[2].tolist()))
        try:
            ss1 = startstop_histogram(stream, "s1", gates.coincidence_bin_ps,
                                      max_delta_ps=35000.0)
            ss2 = startstop_histogram(stream, "s2", gates.coincidence_bin_ps,
                                      max_delta_ps=35000.0)
            both = startstop_histogram(stream, "both",
                                       gates.coincidence_bin_ps,
                                       max_delta_ps=35000.0,
                                       coincidence_width_ps=gates.coincidence_width_ps)
        except ConfigurationError:
            continue
        _write_csv(os.path.join(args.out, f"startstop_{label}.csv"),
                   _stamp(digest),
                   ("delta_ps", "stops_s1", "stops_s2", "stops_both"),
                   zip(ss1.centers_ps.tolist(), ss1.counts.tolist(),
                       ss2.counts.tolist(), both.counts.tolist()))

    sig_in = gated_counts(streams["SIG"], gates, (0, "in"), period)
    mem_out = gated_counts(streams["MEM"], gates, (0, "out"), period)
    g2h_report = {"SIG_input": _try_correlation(g2h, sig_in),
                  "MEM_readout": _try_correlation(g2h, mem_out)}

    oracle = {}
    try:
        pin = exact_click_probabilities(source, memory, gates, "SIG",
                                        (0, "in"), period)
        pout = exact_click_probabilities(source, memory, gates, "MEM",
                                         (0, "out"), period)
        oracle = {"SIG_input": asdict(pin), "MEM_readout": asdict(pout)}
    except (TruncationError, ConfigurationError):
        oracle = {}

    klyshko = (sig_in.r_si / sig_in.r_i) if sig_in.r_i > 0 else None
    budget = None
    if klyshko and 0.0 < klyshko <= 1.0:
        budget = heralding_budget(
            klyshko, source.detector("s1").efficiency,
            source.eta_signal).as_dict()

    noise_metric = None
    if memory.slots:
        eta0 = memory.slots[0][1]
        if eta0 > 0.0:
            noise_metric = mu1(memory.added_noise, eta0)

    payload = {
        "duration_s": duration,
        "seed": args.seed,
        "g11_series": series_payload,
        "g2h": g2h_report,
        "oracle_probabilities": oracle,
        "klyshko_measured": klyshko,
        "heralding_budget": budget,
        "mu1": noise_metric,
        "resolved_config": cfg,
    }
    _write_report(_report_path(args.out, "counts", args.format),
                  digest, payload, args.format)
    return 0


def cmd_absorption(args) -> int:
    cfg = copy.deepcopy(cfgmod.load_config(args.config))
    digest = cfgmod.config_hash(cfg)
    species = cfgmod.build_species(cfg)
    ensemble = cfgmod.build_ensemble(cfg, species)
    ab = cfg.get("absorption", {})
    lo = float(ab.get("detuning_min", -7.5e10))
    hi = float(ab.get("detuning_max", 7.5e10))
    n = int(ab.get("n_points", 151))
    sigma = float(ab.get("noise_sigma", 0.0))
    if n < 2 or hi <= lo:
        raise ConfigurationError("absorption scan needs n_points >= 2 and "
                                 "detuning_max > detuning_min")

    detunings = np.linspace(lo, hi, n)
    model = transmission_spectrum(detunings, ensemble, species)
    rng = np.random.default_rng(args.seed)
    noisy = model + sigma * rng.standard_normal(n) if sigma > 0.0 else model
    noisy = np.clip(noisy, 1e-9, 1.0)
    fitted = fit_temperature(zip(detunings, noisy), species,
                             ensemble.cell_length,
                             initial_temperature=ensemble.temperature - 30.0)

    os.makedirs(args.out, exist_ok=True)
    _write_csv(os.path.join(args.out, "absorption_spectrum.csv"),
               _stamp(digest),
               ("detuning_rad_s", "transmission_model", "transmission_noisy"),
               zip(detunings.tolist(), model.tolist(), noisy.tolist()))
    payload = {
        "fitted_temperature_k": fitted,
        "true_temperature_k": ensemble.temperature,
        "noise_sigma": sigma,
        "resolved_config": cfg,
    }
    _write_report(_report_path(args.out, "absorption", args.format),
                  digest, payload, args.format)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orcasim",
        description="Cascade-memory simulation and counting analysis runs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lifetime", help="memory decay versus storage time")
    _add_common(p, None)
    p.add_argument("--species", choices=("cs", "rb87"), default="cs")
    p.add_argument("--pumped", action="store_true",
                   help="restrict storage to the stretch hyperfine path")
    p.add_argument("--splittings", type=float, default=None,
                   help="scale factor on all hyperfine splittings")
    p.set_defaults(func=cmd_lifetime)

    p = sub.add_parser("efficiency-sweep",
                       help="total efficiency versus control pulse energy")
    _add_common(p, "efficiency_sweep_cs")
    p.set_defaults(func=cmd_efficiency_sweep)

    p = sub.add_parser("counts",
                       help="detector streams plus the correlation pipeline")
    _add_common(p, "counts_heralded")
    p.add_argument("--mu", type=float, default=None,
                   help="override mean pairs per pulse")
    p.add_argument("--memory-noise", default=None, metavar="KIND:PHOTONS",
                   help="override added memory noise, like thermal:0.01")
    p.add_argument("--duration-s", type=float, default=None,
                   help="override acquisition duration")
    p.add_argument("--no-streams", action="store_true",
                   help="skip writing the event stream files")
    p.set_defaults(func=cmd_counts)

    p = sub.add_parser("absorption",
                       help="weak-probe transmission scan and temperature fit")
    _add_common(p, "absorption_cs")
    p.set_defaults(func=cmd_absorption)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, DomainError) as exc:
        print(f"orcasim: config error: {exc}", file=sys.stderr)
        return _CONFIG_EXIT
    except (SolverInstabilityError, FitConvergenceError, TruncationError,
            LifetimeRangeError) as exc:
        print(f"orcasim: numerical failure: {exc}", file=sys.stderr)
        return _NUMERICAL_EXIT


if __name__ == "__main__":
    sys.exit(main())
