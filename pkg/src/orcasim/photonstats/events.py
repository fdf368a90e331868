"""Detector event streams and their line-oriented text format."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from orcasim.errors import ConfigurationError
from orcasim.photonstats.models import CONFIGURATIONS, DETECTOR_IDS


@dataclass(frozen=True)
class EventStream:
    """Click records for one acquisition configuration.

    Events are stored column-wise: ``detector`` holds indices into
    DETECTOR_IDS, ``trigger`` the trigger-frame index and ``time_ps``
    the arrival time within the frame.  Records are sorted by
    (trigger, time).
    """

    detector: np.ndarray
    trigger: np.ndarray
    time_ps: np.ndarray
    trigger_period_ps: float
    total_triggers: int
    label: str

    def __post_init__(self) -> None:
        det = np.ascontiguousarray(self.detector, dtype=np.uint8)
        trig = np.ascontiguousarray(self.trigger, dtype=np.int64)
        t = np.ascontiguousarray(self.time_ps, dtype=np.float64)
        object.__setattr__(self, "detector", det)
        object.__setattr__(self, "trigger", trig)
        object.__setattr__(self, "time_ps", t)
        if not (len(det) == len(trig) == len(t)):
            raise ConfigurationError("event columns must have equal length")
        if self.total_triggers <= 0:
            raise ConfigurationError("total_triggers must be positive")
        if self.label not in CONFIGURATIONS:
            raise ConfigurationError(
                f"label must be one of {CONFIGURATIONS}, got {self.label!r}")
        if len(t):
            if det.max() >= len(DETECTOR_IDS):
                raise ConfigurationError("unknown detector index in stream")
            if t.min() < 0.0 or t.max() >= self.trigger_period_ps:
                raise ConfigurationError(
                    "event times must lie within [0, trigger period)")
            if trig.min() < 0 or trig.max() >= self.total_triggers:
                raise ConfigurationError("trigger index outside acquisition")
            key = trig.astype(np.float64) * self.trigger_period_ps + t
            if np.any(np.diff(key) < 0.0):
                raise ConfigurationError(
                    "records must be sorted by (trigger, time)")

    def __len__(self) -> int:
        return len(self.time_ps)

    @property
    def records(self):
        """Iterate (detector id, trigger index, time ps) tuples."""
        for d, k, t in zip(self.detector, self.trigger, self.time_ps):
            yield DETECTOR_IDS[d], int(k), float(t)

    def select(self, det_id: str):
        """(trigger, time_ps) arrays for one detector."""
        try:
            code = DETECTOR_IDS.index(det_id)
        except ValueError:
            raise ConfigurationError(f"unknown detector id {det_id!r}") from None
        mask = self.detector == code
        return self.trigger[mask], self.time_ps[mask]


def write_stream(stream: EventStream, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"#trigger_period_ps {stream.trigger_period_ps!r}\n")
        fh.write(f"#total_triggers {stream.total_triggers}\n")
        fh.write(f"#config {stream.label}\n")
        for det_id, trig, t in stream.records:
            fh.write(f"{det_id} {trig} {t!r}\n")


def read_stream(path) -> EventStream:
    period = None
    total = None
    label = None
    dets, trigs, times = [], [], []
    codes = {d: i for i, d in enumerate(DETECTOR_IDS)}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition(" ")
                if key == "trigger_period_ps":
                    period = float(value)
                elif key == "total_triggers":
                    total = int(value)
                elif key == "config":
                    label = value.strip()
                else:
                    raise ConfigurationError(f"unknown header {key!r}")
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ConfigurationError(f"malformed record line: {line!r}")
            if parts[0] not in codes:
                raise ConfigurationError(f"unknown detector id {parts[0]!r}")
            dets.append(codes[parts[0]])
            trigs.append(int(parts[1]))
            times.append(float(parts[2]))
    if period is None or total is None or label is None:
        raise ConfigurationError("stream file is missing required headers")
    return EventStream(
        detector=np.array(dets, dtype=np.uint8),
        trigger=np.array(trigs, dtype=np.int64),
        time_ps=np.array(times, dtype=np.float64),
        trigger_period_ps=period,
        total_triggers=total,
        label=label,
    )
