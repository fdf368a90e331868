"""Gated coincidence counting and the normalized correlation estimators.

Counting is per trigger frame: a frame contributes one count to R_i
when its idler gate holds at least one idler click, one to R_s1 when
the selected signal gate holds an s1 click, and so on for the joint
counts.  With that convention uncorrelated streams normalize to
g11 = 1 exactly in expectation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from orcasim.errors import EstimatorUndefinedError
from orcasim.photonstats.events import EventStream
from orcasim.photonstats.models import CorrelationResult, GateSpec

READOUT_SLOTS = ((0, "in"), (0, "out"), (1, "in"), (1, "out"),
                 (2, "in"), (2, "out"))


@dataclass(frozen=True)
class GatedCounts:
    """Frame counts feeding the correlation estimators."""

    r_i: int
    r_s1: int
    r_s2: int
    r_s1i: int
    r_s2i: int
    r_trip: int
    r_t: int

    @property
    def r_s(self) -> int:
        return self.r_s1 + self.r_s2

    @property
    def r_si(self) -> int:
        return self.r_s1i + self.r_s2i

    def as_dict(self):
        return {"r_i": self.r_i, "r_s1": self.r_s1, "r_s2": self.r_s2,
                "r_s": self.r_s, "r_s1i": self.r_s1i, "r_s2i": self.r_s2i,
                "r_si": self.r_si, "r_trip": self.r_trip, "r_t": self.r_t}


def _frames_with_click(stream: EventStream, det_id: str, window) -> np.ndarray:
    lo, hi = window
    trig, t = stream.select(det_id)
    mask = (t >= lo) & (t < hi)
    frames = np.zeros(stream.total_triggers, dtype=bool)
    frames[trig[mask]] = True
    return frames


def gated_counts(
    stream: EventStream,
    gates: GateSpec,
    slot=(0, "in"),
    pulse_period_ps: float = 12500.0,
) -> GatedCounts:
    """Count heralds, signal clicks and coincidences in one gate pair.

    The idler gate is always the trigger-synchronized read-in gate;
    ``slot`` = (pulse order k, "in"|"out") picks the signal gate.  Pure
    function of its inputs; record order within a frame is irrelevant.
    """
    idler_window = gates.slot_window((0, "in"), pulse_period_ps)
    signal_window = gates.slot_window(slot, pulse_period_ps)
    fi = _frames_with_click(stream, "i", idler_window)
    f1 = _frames_with_click(stream, "s1", signal_window)
    f2 = _frames_with_click(stream, "s2", signal_window)
    return GatedCounts(
        r_i=int(fi.sum()),
        r_s1=int(f1.sum()),
        r_s2=int(f2.sum()),
        r_s1i=int((fi & f1).sum()),
        r_s2i=int((fi & f2).sum()),
        r_trip=int((fi & f1 & f2).sum()),
        r_t=stream.total_triggers,
    )


def g11(counts: GatedCounts) -> CorrelationResult:
    """Normalized signal-idler cross-correlation.

    Value R_si R_T / (R_s R_i) with first-order Poisson error
    propagation on the four counts.  Values above 2 are non-classical
    for thermal-background light.
    """
    if counts.r_s <= 0 or counts.r_i <= 0:
        raise EstimatorUndefinedError(
            "cross-correlation needs nonzero signal and idler counts")
    value = counts.r_si * counts.r_t / (counts.r_s * counts.r_i)
    if counts.r_si > 0:
        rel = (1.0 / counts.r_si + 1.0 / counts.r_s
               + 1.0 / counts.r_i + 1.0 / counts.r_t)
        sigma = value * np.sqrt(rel)
    else:
        # zero coincidences: quote the one-count scale
        sigma = counts.r_t / (counts.r_s * counts.r_i)
    return CorrelationResult(value=value, sigma=float(sigma),
                             counts=counts.as_dict(), threshold=2.0)


def g2h(counts: GatedCounts) -> CorrelationResult:
    """Heralded autocorrelation of the signal arm.

    Value R_trip R_i / (R_s1i R_s2i); below 1 is sub-Poissonian, 0 for
    an ideal single photon.
    """
    if counts.r_s1i <= 0 or counts.r_s2i <= 0:
        raise EstimatorUndefinedError(
            "heralded autocorrelation needs nonzero pair coincidences")
    value = counts.r_trip * counts.r_i / (counts.r_s1i * counts.r_s2i)
    if counts.r_trip > 0:
        rel = (1.0 / counts.r_trip + 1.0 / counts.r_i
               + 1.0 / counts.r_s1i + 1.0 / counts.r_s2i)
        sigma = value * np.sqrt(rel)
    else:
        sigma = counts.r_i / (counts.r_s1i * counts.r_s2i)
    return CorrelationResult(value=value, sigma=float(sigma),
                             counts=counts.as_dict(), threshold=1.0)


def readout_series(
    stream: EventStream,
    gates: GateSpec,
    slots=READOUT_SLOTS,
    pulse_period_ps: float = 12500.0,
):
    """g11 against gate delay over successive read-in/read-out slots.

    Returns a list of (delay ps, CorrelationResult or None); None marks
    slots where the estimator is undefined (no clicks in the gate).
    """
    series = []
    for slot in slots:
        order, kind = slot
        delay = order * pulse_period_ps
        if kind == "out":
            delay += gates.read_out_offset_ps
        counts = gated_counts(stream, gates, slot, pulse_period_ps)
        try:
            result = g11(counts)
        except EstimatorUndefinedError:
            result = None
        series.append((delay, result))
    return series
