"""Source, memory-channel, gate and result types for the counting pipeline.

The pair source is a single-mode parametric model: the pair number per
pumped pulse is thermally distributed, P(n) = mu^n / (1 + mu)^(n + 1),
truncated at ``n_max``.  Detectors are threshold clicks without dead
time.  The memory channel is phenomenological: a read-in absorption
fraction plus a table of retrieval efficiencies at later pulse slots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from orcasim.errors import ConfigurationError

DETECTOR_IDS = ("i", "s1", "s2")
CONFIGURATIONS = ("SIG", "MEM", "RI", "CTRL")

# truncated thermal law must renormalize to better than this
TAIL_TOLERANCE = 1e-8


def thermal_tail(mu: float, n_max: int) -> float:
    """Probability mass above n_max for the thermal law with mean mu."""
    if mu == 0.0:
        return 0.0
    return (mu / (1.0 + mu)) ** (n_max + 1)


@dataclass(frozen=True)
class DetectorModel:
    """Threshold click detector: quantum efficiency plus a dark rate."""

    efficiency: float
    dark_rate_hz: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.efficiency <= 1.0:
            raise ConfigurationError(
                f"detector efficiency must be in [0, 1], got {self.efficiency}")
        if self.dark_rate_hz < 0.0:
            raise ConfigurationError(
                f"dark rate must be non-negative, got {self.dark_rate_hz}")


@dataclass(frozen=True)
class PairSourceModel:
    """Pulsed pair source feeding one idler and one split signal arm.

    ``pair_slots`` selects the pumping pattern within a trigger frame:
    "trigger" places pairs only in the trigger-synchronized pulse slot
    (pulse-picked pump), "all" pumps every pulse slot in the frame.
    """

    mu: float
    eta_signal: float
    eta_idler: float
    detectors: Mapping[str, DetectorModel]
    pulse_period_ps: float = 12500.0
    trigger_period_ps: float = 50000.0
    pair_slots: str = "trigger"
    n_max: int = 10
    jitter_ps: float = 350.0

    def __post_init__(self) -> None:
        if self.mu < 0.0:
            raise ConfigurationError(f"mu must be non-negative, got {self.mu}")
        for name, val in (("eta_signal", self.eta_signal),
                          ("eta_idler", self.eta_idler)):
            if not 0.0 <= val <= 1.0:
                raise ConfigurationError(
                    f"{name} must be in [0, 1], got {val}")
        missing = [d for d in DETECTOR_IDS if d not in self.detectors]
        if missing:
            raise ConfigurationError(f"missing detector models: {missing}")
        if self.pulse_period_ps <= 0.0:
            raise ConfigurationError("pulse period must be positive")
        if self.trigger_period_ps < self.pulse_period_ps:
            raise ConfigurationError(
                "trigger period must be at least one pulse period")
        if self.pair_slots not in ("all", "trigger"):
            raise ConfigurationError(
                f"pair_slots must be 'all' or 'trigger', got {self.pair_slots!r}")
        if self.n_max < 1:
            raise ConfigurationError("n_max must be at least 1")
        tail = thermal_tail(self.mu, self.n_max)
        if tail >= TAIL_TOLERANCE:
            raise ConfigurationError(
                f"truncation at n_max={self.n_max} leaves {tail:.2e} of the "
                f"photon-number mass for mu={self.mu}; raise n_max")
        if self.jitter_ps < 0.0:
            raise ConfigurationError("jitter must be non-negative")

    @property
    def pulses_per_trigger(self) -> int:
        return max(1, int(self.trigger_period_ps // self.pulse_period_ps))

    def detector(self, det_id: str) -> DetectorModel:
        return self.detectors[det_id]


@dataclass(frozen=True)
class MemoryChannelModel:
    """Read-in absorption plus retrieval efficiencies at later slots.

    ``slots`` maps delay after the pair pulse (ps) to the fraction of
    incident signal photons retrieved at that delay.  The unabsorbed
    fraction 1 - read_in_efficiency leaks through promptly; absorbed
    photons not covered by any slot are lost.  ``added_noise`` photons
    per pulse (Poissonian or single-mode thermal) are injected at the
    first retrieval slot whenever the read-out control fires.
    """

    read_in_efficiency: float
    slots: tuple = ()
    added_noise: float = 0.0
    noise_kind: str = "thermal"

    def __post_init__(self) -> None:
        if not 0.0 <= self.read_in_efficiency <= 1.0:
            raise ConfigurationError(
                f"read-in efficiency must be in [0, 1], got {self.read_in_efficiency}")
        if isinstance(self.slots, Mapping):
            items = tuple(sorted((float(k), float(v)) for k, v in self.slots.items()))
            object.__setattr__(self, "slots", items)
        else:
            items = tuple(sorted((float(d), float(e)) for d, e in self.slots))
            object.__setattr__(self, "slots", items)
        total = 0.0
        for delay, eta in self.slots:
            if delay <= 0.0:
                raise ConfigurationError(
                    f"retrieval delays must be positive, got {delay}")
            if eta < 0.0:
                raise ConfigurationError(
                    f"slot efficiency must be non-negative, got {eta}")
            total += eta
        if total > self.read_in_efficiency + 1e-12:
            raise ConfigurationError(
                f"total retrieval {total:.4f} exceeds the absorbed fraction "
                f"{self.read_in_efficiency:.4f}")
        if self.added_noise < 0.0:
            raise ConfigurationError("added noise must be non-negative")
        if self.noise_kind not in ("thermal", "poisson"):
            raise ConfigurationError(
                f"noise kind must be 'thermal' or 'poisson', got {self.noise_kind!r}")

    @property
    def storage_delay_ps(self) -> float | None:
        """Delay of the first retrieval slot, if any."""
        return self.slots[0][0] if self.slots else None

    @property
    def total_retrieval(self) -> float:
        return sum(eta for _, eta in self.slots)

    def retrieval_at(self, delay_ps: float, tol_ps: float = 1.0) -> float:
        for delay, eta in self.slots:
            if abs(delay - delay_ps) <= tol_ps:
                return eta
        return 0.0


@dataclass(frozen=True)
class GateSpec:
    """Time gates within a trigger frame and histogram bin widths."""

    read_in_center_ps: float
    read_in_width_ps: float = 2500.0
    read_out_offset_ps: float = 3500.0
    read_out_width_ps: float = 2500.0
    coincidence_width_ps: float = 3500.0
    arrival_bin_ps: float = 200.0
    coincidence_bin_ps: float = 100.0

    def __post_init__(self) -> None:
        for name in ("read_in_width_ps", "read_out_width_ps",
                     "coincidence_width_ps", "arrival_bin_ps",
                     "coincidence_bin_ps"):
            if getattr(self, name) <= 0.0:
                raise ConfigurationError(f"{name} must be positive")
        if self.read_out_offset_ps < 0.5 * (self.read_in_width_ps
                                            + self.read_out_width_ps):
            raise ConfigurationError(
                "read-in and read-out gates overlap; increase the offset")

    def validate_frame(self, trigger_period_ps: float) -> None:
        """Check that both primary gates sit inside [0, trigger period)."""
        lo_in = self.read_in_center_ps - 0.5 * self.read_in_width_ps
        hi_out = (self.read_in_center_ps + self.read_out_offset_ps
                  + 0.5 * self.read_out_width_ps)
        if lo_in < 0.0 or hi_out >= trigger_period_ps:
            raise ConfigurationError(
                f"gates [{lo_in:.0f}, {hi_out:.0f}] ps fall outside the "
                f"{trigger_period_ps:.0f} ps trigger frame")

    def slot_window(self, slot, pulse_period_ps: float = 12500.0):
        """(low, high) edges in ps for gate ``slot`` = (order k, 'in'|'out')."""
        order, kind = slot
        if order < 0:
            raise ConfigurationError(f"slot order must be non-negative, got {order}")
        center = self.read_in_center_ps + order * pulse_period_ps
        if kind == "in":
            width = self.read_in_width_ps
        elif kind == "out":
            center += self.read_out_offset_ps
            width = self.read_out_width_ps
        else:
            raise ConfigurationError(
                f"slot kind must be 'in' or 'out', got {kind!r}")
        return center - 0.5 * width, center + 0.5 * width


@dataclass(frozen=True)
class CorrelationResult:
    """Estimator value with propagated Poisson uncertainty.

    ``threshold`` records the classical bound the value is compared
    against (2 for the cross-correlation, 1 for the heralded
    autocorrelation).
    """

    value: float
    sigma: float
    counts: Mapping[str, int] = field(default_factory=dict)
    threshold: float = 0.0

    def __post_init__(self) -> None:
        if self.value < 0.0 or self.sigma < 0.0:
            raise ConfigurationError("value and sigma must be non-negative")
        for key, count in self.counts.items():
            if count < 0 or count != int(count):
                raise ConfigurationError(
                    f"count {key} must be a non-negative integer, got {count}")

    @property
    def exceeds_threshold(self) -> bool:
        return self.value > self.threshold
