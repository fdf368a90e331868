"""Event-stream generation for the four shutter configurations.

Per pumped pulse slot the pair number is drawn from the truncated
thermal law, both arms are thinned binomially, and signal photons are
routed through the memory channel according to the configuration:

  SIG   signal transmitted promptly (no control, transparent cell)
  MEM   leak at the pulse slot, retrieval at the configured delays
  RI    read-in only: the leak survives, absorbed photons never return
  CTRL  signal blocked; only control-induced noise reaches the s arm

The idler always reaches its detector.  Surviving photons split 50/50
onto s1/s2; each (detector, pulse, route) produces at most one click.
Dark counts are Poissonian and uniform over the frame; click times get
a Gaussian jitter smear.  Generation is block-parallel with an RNG
stream derived from (seed, configuration, block), so streams are
reproducible and independent of the block size boundaries only within
a block layout; the layout itself is fixed by ``block_triggers``.
"""

from __future__ import annotations

import numpy as np

from orcasim.errors import ConfigurationError
from orcasim.photonstats.events import EventStream
from orcasim.photonstats.models import (
    CONFIGURATIONS,
    GateSpec,
    MemoryChannelModel,
    PairSourceModel,
)

_CONFIG_CODE = {label: i for i, label in enumerate(CONFIGURATIONS)}


def _signal_routes(config: str, memory: MemoryChannelModel):
    """(delay ps, probability) routing table for source signal photons."""
    if config == "SIG":
        return ((0.0, 1.0),)
    if config == "RI":
        return ((0.0, 1.0 - memory.read_in_efficiency),)
    if config == "MEM":
        routes = [(0.0, 1.0 - memory.read_in_efficiency)]
        routes.extend(memory.slots)
        return tuple(routes)
    if config == "CTRL":
        return ()
    raise ConfigurationError(f"unknown configuration {config!r}")


def _noise_mean(config: str, memory: MemoryChannelModel) -> float:
    """Added-noise photons fire only when the read-out control does."""
    if config in ("MEM", "CTRL") and memory.storage_delay_ps is not None:
        return memory.added_noise
    return 0.0


def simulate_event_streams(
    source: PairSourceModel,
    memory: MemoryChannelModel,
    gates: GateSpec,
    duration_s: float,
    seed: int,
    configs=CONFIGURATIONS,
    block_triggers: int = 1 << 20,
):
    """Generate one EventStream per acquisition configuration.

    Returns a dict keyed by configuration label.  ``configs`` may be a
    subset when only some streams are needed.
    """
    if duration_s <= 0.0:
        raise ConfigurationError(f"duration must be positive, got {duration_s}")
    period = source.trigger_period_ps
    n_triggers = int(round(duration_s * 1e12 / period))
    if n_triggers < 1:
        raise ConfigurationError("duration shorter than one trigger frame")
    gates.validate_frame(period)
    for config in configs:
        if config not in CONFIGURATIONS:
            raise ConfigurationError(f"unknown configuration {config!r}")

    if source.pair_slots == "trigger":
        slot_times = (gates.read_in_center_ps,)
    else:
        count = int((period - gates.read_in_center_ps - 1e-9)
                    // source.pulse_period_ps) + 1
        slot_times = tuple(gates.read_in_center_ps + k * source.pulse_period_ps
                           for k in range(count))

    q1 = source.detector("s1").efficiency
    q2 = source.detector("s2").efficiency
    a_i = source.eta_idler * source.detector("i").efficiency
    split = np.array([0.5 * q1, 0.5 * q2, 0.0])
    split[2] = max(0.0, 1.0 - split[0] - split[1])

    out = {}
    for config in configs:
        routes = _signal_routes(config, memory)
        noise_mean = _noise_mean(config, memory)
        noise_delay = memory.storage_delay_ps
        route_p = np.array([p for _, p in routes] + [0.0])
        route_p[-1] = max(0.0, 1.0 - route_p[:-1].sum())
        pass_signal = config not in ("CTRL",)

        det_parts, trig_parts, time_parts = [], [], []

        def emit(det_code, trig, base_time, rng, jitter=True):
            if len(trig) == 0:
                return
            t = np.full(len(trig), base_time, dtype=np.float64)
            if jitter and source.jitter_ps > 0.0:
                t += source.jitter_ps * rng.standard_normal(len(trig))
            det_parts.append(np.full(len(trig), det_code, dtype=np.uint8))
            trig_parts.append(trig.astype(np.int64))
            time_parts.append(t)

        for block, start in enumerate(range(0, n_triggers, block_triggers)):
            size = min(block_triggers, n_triggers - start)
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=int(seed),
                                       spawn_key=(_CONFIG_CODE[config], block)))
            frame_ids = np.arange(start, start + size, dtype=np.int64)

            for slot_t in slot_times:
                if source.mu > 0.0:
                    n = rng.geometric(1.0 / (1.0 + source.mu), size) - 1
                    np.clip(n, 0, source.n_max, out=n)
                else:
                    n = np.zeros(size, dtype=np.int64)

                clicked_i = rng.binomial(n, a_i) > 0 if a_i > 0.0 else \
                    np.zeros(size, dtype=bool)
                emit(0, frame_ids[clicked_i], slot_t, rng)

                routed = None
                if pass_signal and routes and source.eta_signal > 0.0:
                    s_in = rng.binomial(n, source.eta_signal)
                    routed = rng.multinomial(s_in, route_p)

                for j, (delay, _) in enumerate(routes):
                    m = routed[:, j] if routed is not None else None
                    if noise_mean > 0.0 and delay == noise_delay:
                        if memory.noise_kind == "poisson":
                            raw = rng.poisson(noise_mean, size)
                        else:
                            raw = rng.geometric(1.0 / (1.0 + noise_mean), size) - 1
                        extra = rng.binomial(raw, source.eta_signal) \
                            if source.eta_signal > 0.0 else np.zeros(size, dtype=np.int64)
                        m = extra if m is None else m + extra
                    if m is None or not m.any():
                        continue
                    arms = rng.multinomial(m, split)
                    emit(1, frame_ids[arms[:, 0] > 0], slot_t + delay, rng)
                    emit(2, frame_ids[arms[:, 1] > 0], slot_t + delay, rng)

                # CTRL noise with no signal routes still reaches the s arm
                if not routes and noise_mean > 0.0 and noise_delay is not None:
                    if memory.noise_kind == "poisson":
                        raw = rng.poisson(noise_mean, size)
                    else:
                        raw = rng.geometric(1.0 / (1.0 + noise_mean), size) - 1
                    extra = rng.binomial(raw, source.eta_signal) \
                        if source.eta_signal > 0.0 else np.zeros(size, dtype=np.int64)
                    if extra.any():
                        arms = rng.multinomial(extra, split)
                        emit(1, frame_ids[arms[:, 0] > 0], slot_t + noise_delay, rng)
                        emit(2, frame_ids[arms[:, 1] > 0], slot_t + noise_delay, rng)

            # dark counts, uniform over the block
            span = size * period
            for code, det_id in enumerate(("i", "s1", "s2")):
                rate = source.detector(det_id).dark_rate_hz
                if rate <= 0.0:
                    continue
                n_dark = rng.poisson(rate * span * 1e-12)
                if n_dark == 0:
                    continue
                u = rng.uniform(0.0, span, n_dark)
                trig = start + (u // period).astype(np.int64)
                det_parts.append(np.full(n_dark, code, dtype=np.uint8))
                trig_parts.append(trig)
                time_parts.append(u % period)

        if det_parts:
            det = np.concatenate(det_parts)
            trig = np.concatenate(trig_parts)
            t = np.concatenate(time_parts)
            # jitter can push a click across a frame boundary
            g = trig.astype(np.float64) * period + t
            keep = (g >= 0.0) & (g < n_triggers * period)
            g = g[keep]
            det = det[keep]
            trig = np.floor_divide(g, period).astype(np.int64)
            t = g - trig * period
            neg = t < 0.0
            trig[neg] -= 1
            t[neg] += period
            over = t >= period
            trig[over] += 1
            t[over] -= period
            valid = (trig >= 0) & (trig < n_triggers)
            det, trig, t = det[valid], trig[valid], t[valid]
            order = np.lexsort((t, trig))
            det, trig, t = det[order], trig[order], t[order]
        else:
            det = np.zeros(0, dtype=np.uint8)
            trig = np.zeros(0, dtype=np.int64)
            t = np.zeros(0, dtype=np.float64)

        out[config] = EventStream(
            detector=det, trigger=trig, time_ps=t,
            trigger_period_ps=period, total_triggers=n_triggers,
            label=config)
    return out
