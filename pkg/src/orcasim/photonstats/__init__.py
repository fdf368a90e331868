"""Detector-event simulation and the coincidence analysis pipeline."""

from orcasim.photonstats.correlations import (
    READOUT_SLOTS,
    GatedCounts,
    g2h,
    g11,
    gated_counts,
    readout_series,
)
from orcasim.photonstats.events import EventStream, read_stream, write_stream
from orcasim.photonstats.histograms import (
    Histogram,
    arrival_histogram,
    startstop_histogram,
)
from orcasim.photonstats.models import (
    CONFIGURATIONS,
    DETECTOR_IDS,
    CorrelationResult,
    DetectorModel,
    GateSpec,
    MemoryChannelModel,
    PairSourceModel,
)
from orcasim.photonstats.oracle import (
    BudgetReport,
    ClickProbabilities,
    exact_click_probabilities,
    heralded_g2_moments,
    heralding_budget,
    oracle_g2h,
    oracle_g11,
    truncated_thermal_pmf,
)
from orcasim.photonstats.simulate import simulate_event_streams

__all__ = [
    "CONFIGURATIONS",
    "DETECTOR_IDS",
    "READOUT_SLOTS",
    "BudgetReport",
    "ClickProbabilities",
    "CorrelationResult",
    "DetectorModel",
    "EventStream",
    "GateSpec",
    "GatedCounts",
    "Histogram",
    "MemoryChannelModel",
    "PairSourceModel",
    "arrival_histogram",
    "exact_click_probabilities",
    "g11",
    "g2h",
    "gated_counts",
    "heralded_g2_moments",
    "heralding_budget",
    "oracle_g11",
    "oracle_g2h",
    "read_stream",
    "readout_series",
    "simulate_event_streams",
    "startstop_histogram",
    "truncated_thermal_pmf",
    "write_stream",
]
