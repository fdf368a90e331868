"""Brute-force click-probability oracles and the heralding loss budget.

The enumeration oracle reproduces the per-frame counting semantics of
``gated_counts`` exactly: it sums the truncated photon-number law over
every pumped pulse slot feeding the selected gate, folds in binomial
loss, the 50/50 split, threshold detection, memory noise and dark
clicks, and reports the truncation mass it dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from orcasim.errors import ConfigurationError, DomainError, TruncationError
from orcasim.photonstats.models import (
    GateSpec,
    MemoryChannelModel,
    PairSourceModel,
    thermal_tail,
)
from orcasim.photonstats.simulate import _noise_mean, _signal_routes

ORACLE_N_MAX = 20


def truncated_thermal_pmf(mu: float, n_max: int) -> np.ndarray:
    """P(n) = mu^n / (1+mu)^(n+1) for n = 0..n_max, unnormalized tail dropped."""
    n = np.arange(n_max + 1)
    if mu == 0.0:
        pmf = np.zeros(n_max + 1)
        pmf[0] = 1.0
        return pmf
    return (mu / (1.0 + mu)) ** n / (1.0 + mu)


@dataclass(frozen=True)
class ClickProbabilities:
    """Per-frame click probabilities for one gate selection."""

    p_i: float
    p_s1: float
    p_s2: float
    p_s1i: float
    p_s2i: float
    p_trip: float
    truncation_error: float

    @property
    def p_s(self) -> float:
        return self.p_s1 + self.p_s2

    @property
    def p_si(self) -> float:
        return self.p_s1i + self.p_s2i


def _noise_factor(kind: str, mean: float, c: float) -> float:
    """E[(1 - c)^m] for m noise photons of the given law (closed form)."""
    if mean <= 0.0 or c <= 0.0:
        return 1.0
    if kind == "poisson":
        return float(np.exp(-mean * c))
    return 1.0 / (1.0 + mean * c)


def _slot_centers(source: PairSourceModel, gates: GateSpec):
    if source.pair_slots == "trigger":
        return (gates.read_in_center_ps,)
    count = int((source.trigger_period_ps - gates.read_in_center_ps - 1e-9)
                // source.pulse_period_ps) + 1
    return tuple(gates.read_in_center_ps + k * source.pulse_period_ps
                 for k in range(count))


def exact_click_probabilities(
    source: PairSourceModel,
    memory: MemoryChannelModel,
    gates: GateSpec,
    config: str = "MEM",
    slot=(0, "in"),
    pulse_period_ps: float = 12500.0,
    tol: float = 1e-8,
) -> ClickProbabilities:
    """Exact per-frame click probabilities under the counting semantics.

    Photon arrival times are taken at their nominal slot positions
    (jitter leakage out of the default gates is below 4e-4 and is not
    modeled).  Raises when the photon-number truncation leaves more
    than ``tol`` probability mass.
    """
    if source.n_max > ORACLE_N_MAX:
        raise ConfigurationError(
            f"oracle enumeration supports n_max <= {ORACLE_N_MAX}")
    tail = thermal_tail(source.mu, source.n_max)
    if tail > tol:
        raise TruncationError(
            f"truncation error {tail:.2e} exceeds {tol:.2e}; raise n_max")

    pmf = truncated_thermal_pmf(source.mu, source.n_max)
    pmf = pmf / pmf.sum()
    n = np.arange(source.n_max + 1)

    q_i = source.detector("i").efficiency
    q1 = source.detector("s1").efficiency
    q2 = source.detector("s2").efficiency
    a_i = source.eta_idler * q_i

    idler_lo, idler_hi = gates.slot_window((0, "in"), pulse_period_ps)
    gate_lo, gate_hi = gates.slot_window(slot, pulse_period_ps)
    gate_width = gate_hi - gate_lo

    d_i = source.detector("i").dark_rate_hz * (idler_hi - idler_lo) * 1e-12
    d1 = source.detector("s1").dark_rate_hz * gate_width * 1e-12
    d2 = source.detector("s2").dark_rate_hz * gate_width * 1e-12

    routes = _signal_routes(config, memory)
    noise_mean = _noise_mean(config, memory)
    noise_delay = memory.storage_delay_ps
    centers = _slot_centers(source, gates)

    # per pumped slot: probability a signal photon reaches the gate
    r_slot = []
    for center in centers:
        r = sum(p for delay, p in routes if gate_lo <= center + delay < gate_hi)
        r_slot.append(source.eta_signal * r)

    # noise photons landing in the gate, per pumped slot
    noise_hits = 0
    if noise_mean > 0.0 and noise_delay is not None:
        noise_hits = sum(1 for center in centers
                         if gate_lo <= center + noise_delay < gate_hi)

    def no_click(c_vals):
        """P(no click) factor over uncorrelated slots (index >= 1)."""
        out = 1.0
        for m, c in enumerate(c_vals):
            if m == 0 or c <= 0.0:
                continue
            out *= float(pmf @ (1.0 - c) ** n)
        return out

    c1 = [0.5 * q1 * r for r in r_slot]
    c2 = [0.5 * q2 * r for r in r_slot]
    c12 = [x + y for x, y in zip(c1, c2)]

    noise1 = _noise_factor(memory.noise_kind,
                           noise_mean * source.eta_signal, 0.5 * q1) ** noise_hits
    noise2 = _noise_factor(memory.noise_kind,
                           noise_mean * source.eta_signal, 0.5 * q2) ** noise_hits
    noise12 = _noise_factor(memory.noise_kind,
                            noise_mean * source.eta_signal,
                            0.5 * q1 + 0.5 * q2) ** noise_hits

    # uncorrelated background from pumped slots other than the trigger slot
    b1 = no_click(c1) * noise1 * (1.0 - d1)
    b2 = no_click(c2) * noise2 * (1.0 - d2)
    b12 = no_click(c12) * noise12 * (1.0 - d1) * (1.0 - d2)

    p_i_given_n = 1.0 - (1.0 - a_i) ** n * (1.0 - d_i)
    no1_given_n = (1.0 - c1[0]) ** n * b1
    no2_given_n = (1.0 - c2[0]) ** n * b2
    no12_given_n = (1.0 - c12[0]) ** n * b12

    p_i = float(pmf @ p_i_given_n)
    p_s1 = float(pmf @ (1.0 - no1_given_n))
    p_s2 = float(pmf @ (1.0 - no2_given_n))
    p_s1i = float(pmf @ (p_i_given_n * (1.0 - no1_given_n)))
    p_s2i = float(pmf @ (p_i_given_n * (1.0 - no2_given_n)))
    p_trip = float(pmf @ (p_i_given_n
                          * (1.0 - no1_given_n - no2_given_n + no12_given_n)))

    return ClickProbabilities(
        p_i=p_i, p_s1=p_s1, p_s2=p_s2, p_s1i=p_s1i, p_s2i=p_s2i,
        p_trip=p_trip, truncation_error=tail)


def oracle_g11(probs: ClickProbabilities) -> float:
    """Expected cross-correlation for the per-frame estimator."""
    if probs.p_s <= 0.0 or probs.p_i <= 0.0:
        raise DomainError("oracle cross-correlation undefined at zero rates")
    return probs.p_si / (probs.p_s * probs.p_i)


def oracle_g2h(probs: ClickProbabilities) -> float:
    """Expected heralded autocorrelation for the per-frame estimator."""
    if probs.p_s1i <= 0.0 or probs.p_s2i <= 0.0:
        raise DomainError("oracle heralded autocorrelation undefined")
    return probs.p_trip * probs.p_i / (probs.p_s1i * probs.p_s2i)


def heralded_g2_moments(
    source: PairSourceModel,
    memory: MemoryChannelModel,
    config: str = "SIG",
    slot=(0, "in"),
    gates: GateSpec | None = None,
    pulse_period_ps: float = 12500.0,
) -> float:
    """Photon-number-moment heralded g2 of the gated signal mode.

    Conditions the pair-number law on an idler click, propagates the
    mean and the second factorial moment through binomial loss and the
    memory channel analytically, and returns E[m(m-1)] / E[m]^2.  This
    is the loss-robust companion to the click-level oracle: without
    added noise the value is strictly independent of the signal-arm
    transmission, so equality between the input gate and the read-out
    gate holds to floating-point precision.
    """
    if source.pair_slots != "trigger":
        raise ConfigurationError(
            "moment oracle assumes a single pumped slot per frame")
    if gates is None:
        gates = GateSpec(read_in_center_ps=5000.0)
    gate_lo, gate_hi = gates.slot_window(slot, pulse_period_ps)
    center = gates.read_in_center_ps
    routes = _signal_routes(config, memory)
    r = sum(p for delay, p in routes if gate_lo <= center + delay < gate_hi)
    eta = source.eta_signal * r

    pmf = truncated_thermal_pmf(source.mu, source.n_max)
    pmf = pmf / pmf.sum()
    n = np.arange(source.n_max + 1)
    a_i = source.eta_idler * source.detector("i").efficiency
    d_i = source.detector("i").dark_rate_hz * gates.read_in_width_ps * 1e-12
    herald = 1.0 - (1.0 - a_i) ** n * (1.0 - d_i)
    z = float(pmf @ herald)
    if z <= 0.0:
        raise DomainError("herald probability vanishes")
    m1 = float(pmf @ (herald * n)) / z
    m2 = float(pmf @ (herald * n * (n - 1))) / z

    noise_mean = _noise_mean(config, memory)
    nu = 0.0
    if noise_mean > 0.0 and memory.storage_delay_ps is not None:
        if gate_lo <= center + memory.storage_delay_ps < gate_hi:
            nu = noise_mean * source.eta_signal
    mean = eta * m1 + nu
    if mean <= 0.0:
        raise DomainError("gated signal mode is empty")
    kappa = 2.0 * nu * nu if memory.noise_kind == "thermal" else nu * nu
    second = eta * eta * m2 + 2.0 * eta * m1 * nu + kappa
    return second / (mean * mean)


@dataclass(frozen=True)
class BudgetReport:
    """Loss-budget quotients with the named stages echoed back."""

    eta_klyshko: float
    eta_detector: float
    eta_signal_added: float
    eta_herald: float
    eta_signal_total: float | None = None
    eta_signal_waveguide: float | None = None
    stages: Mapping[str, float] | None = None

    def as_dict(self):
        out = {
            "eta_klyshko": self.eta_klyshko,
            "eta_detector": self.eta_detector,
            "eta_signal_added": self.eta_signal_added,
            "eta_herald": self.eta_herald,
        }
        if self.eta_signal_total is not None:
            out["eta_signal_total"] = self.eta_signal_total
            out["eta_signal_waveguide"] = self.eta_signal_waveguide
        if self.stages:
            out["stages"] = dict(self.stages)
        return out


def heralding_budget(
    eta_klyshko: float,
    eta_detector: float,
    eta_signal_added: float,
    eta_signal_total: float | None = None,
    stages: Mapping[str, float] | None = None,
) -> BudgetReport:
    """Heralding efficiency in front of the memory, and optionally the
    waveguide throughput, from the measured Klyshko efficiency.

    eta_herald = eta_klyshko / eta_detector / eta_signal_added, and
    with the full signal-path transmission given,
    eta_signal_waveguide = eta_klyshko / eta_detector / eta_signal_total.
    """
    named = {"eta_klyshko": eta_klyshko, "eta_detector": eta_detector,
             "eta_signal_added": eta_signal_added}
    if eta_signal_total is not None:
        named["eta_signal_total"] = eta_signal_total
    for key, val in {**named, **(dict(stages) if stages else {})}.items():
        if not 0.0 < val <= 1.0:
            raise DomainError(f"{key} must lie in (0, 1], got {val}")
    eta_herald = eta_klyshko / eta_detector / eta_signal_added
    waveguide = None
    if eta_signal_total is not None:
        waveguide = eta_klyshko / eta_detector / eta_signal_total
    return BudgetReport(
        eta_klyshko=eta_klyshko, eta_detector=eta_detector,
        eta_signal_added=eta_signal_added, eta_herald=eta_herald,
        eta_signal_total=eta_signal_total, eta_signal_waveguide=waveguide,
        stages=dict(stages) if stages else None)
