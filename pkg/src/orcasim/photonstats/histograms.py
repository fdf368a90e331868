"""Arrival-time and start-stop histograms over event streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from orcasim.errors import ConfigurationError
from orcasim.photonstats.events import EventStream
from orcasim.photonstats.models import DETECTOR_IDS


@dataclass(frozen=True)
class Histogram:
    edges_ps: np.ndarray
    counts: np.ndarray
    rate_hz: np.ndarray | None = None

    @property
    def centers_ps(self) -> np.ndarray:
        return 0.5 * (self.edges_ps[:-1] + self.edges_ps[1:])


def arrival_histogram(
    stream: EventStream,
    bin_width_ps: float = 200.0,
    detector: str | None = None,
    normalized: bool = False,
) -> Histogram:
    """Histogram of within-frame arrival times.

    Raw counts sum to the number of selected records.  With
    ``normalized`` the rate column divides by the acquisition duration
    (total triggers times the trigger period), giving Hz per bin.
    """
    if bin_width_ps <= 0.0:
        raise ConfigurationError("bin width must be positive")
    period = stream.trigger_period_ps
    n_bins = period / bin_width_ps
    if abs(n_bins - round(n_bins)) > 1e-9:
        raise ConfigurationError(
            f"bin width {bin_width_ps} ps does not divide the "
            f"{period} ps trigger period")
    n_bins = int(round(n_bins))
    if detector is None:
        times = stream.time_ps
    else:
        _, times = stream.select(detector)
    counts, edges = np.histogram(times, bins=n_bins, range=(0.0, period))
    rate = None
    if normalized:
        duration_s = stream.total_triggers * period * 1e-12
        rate = counts / duration_s
    return Histogram(edges_ps=edges, counts=counts, rate_hz=rate)


def _same_frame_pairs(trig_a, trig_b):
    """Index pairs (ia, ib) with matching trigger frames.

    Both trigger arrays must be sorted.  Returns every cross pairing
    within a frame.
    """
    left = np.searchsorted(trig_b, trig_a, side="left")
    right = np.searchsorted(trig_b, trig_a, side="right")
    mult = right - left
    ia = np.repeat(np.arange(len(trig_a)), mult)
    if len(ia) == 0:
        return ia, ia.copy()
    offsets = np.concatenate([np.arange(m) for m in mult if m > 0])
    ib = np.repeat(left, mult) + offsets
    return ia, ib


def startstop_histogram(
    stream: EventStream,
    stop: str = "s1",
    bin_width_ps: float = 100.0,
    max_delta_ps: float | None = None,
    coincidence_width_ps: float = 3500.0,
) -> Histogram:
    """Start-stop histogram: idler clicks start, s clicks stop.

    ``stop`` is "s1", "s2", or "both"; with "both" a stop needs both
    s detectors firing within the coincidence window, and the stop time
    is their midpoint.  Only same-frame pairs contribute.  The range is
    symmetric, (-max_delta, +max_delta), so jitter around zero delay
    stays visible.
    """
    if stop not in ("s1", "s2", "both"):
        raise ConfigurationError(f"stop must be 's1', 's2' or 'both', got {stop!r}")
    trig_i, t_i = stream.select("i")
    if len(trig_i) == 0:
        raise ConfigurationError("stream has no idler clicks to start on")
    if max_delta_ps is None:
        max_delta_ps = stream.trigger_period_ps
    n_bins = 2 * int(np.ceil(max_delta_ps / bin_width_ps))
    lo = -0.5 * n_bins * bin_width_ps
    hi = -lo

    if stop in ("s1", "s2"):
        trig_s, t_s = stream.select(stop)
        if len(trig_s) == 0:
            raise ConfigurationError(f"stream has no {stop} clicks to stop on")
    else:
        trig_1, t_1 = stream.select("s1")
        trig_2, t_2 = stream.select("s2")
        if len(trig_1) == 0 or len(trig_2) == 0:
            raise ConfigurationError("stream lacks clicks on one s detector")
        i1, i2 = _same_frame_pairs(trig_1, trig_2)
        close = np.abs(t_1[i1] - t_2[i2]) <= coincidence_width_ps
        trig_s = trig_1[i1][close]
        t_s = 0.5 * (t_1[i1][close] + t_2[i2][close])

    ii, ss = _same_frame_pairs(trig_i, trig_s)
    delta = t_s[ss] - t_i[ii]
    counts, edges = np.histogram(delta, bins=n_bins, range=(lo, hi))
    return Histogram(edges_ps=edges, counts=counts)
