"""Single-atom master equation over the full 12-level ladder.

Reference integrator for spot checks of the propagation solver's
linearized dynamics: one atom of a given velocity class, all hyperfine
levels of the three manifolds, radiative decay of both excited
manifolds as Lindblad jumps between hyperfine levels with tabulated
branching ratios.  No field back-action; the fields are prescribed
envelopes.

Frame and signs match the propagation solver: intermediate levels
rotate at detuning + offset + k_s v, storage levels at the two-photon
offset + k_r v, and the populated ground level defines the energy
zero.  Couplings use the same signed relative line strengths, with the
bare Rabi frequencies supplied by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import DomainError, SolverInstabilityError
from ..atomphys.species import SpeciesRecord
from ..atomphys.angular import relative_line_strength, decay_branching

__all__ = ["LindbladResult", "single_atom_lindblad"]


@dataclass(frozen=True)
class LindbladResult:
    """Sampled density-matrix evolution.

    labels pairs each basis index with (manifold name, F).  populations
    has shape (n_times, 12); trace_error is max |tr rho - 1| over the
    samples.
    """

    times: np.ndarray
    labels: tuple[tuple[str, float], ...]
    populations: np.ndarray
    coherences: np.ndarray  # full rho, shape (n_times, 12, 12), complex
    trace_error: float

    def manifold_population(self, name: str) -> np.ndarray:
        idx = [i for i, (man, _) in enumerate(self.labels) if man == name]
        if not idx:
            raise DomainError(f"no manifold {name!r} in the basis")
        return self.populations[:, idx].sum(axis=1)


def _zero(_t: float) -> complex:
    return 0.0


def single_atom_lindblad(
    species: SpeciesRecord,
    omega_s: Callable[[float], complex] | None,
    omega_c: Callable[[float], complex] | None,
    detuning: float,
    velocity: float,
    t_span: tuple[float, float],
    geometry: str = "counter",
    two_photon_detuning: float = 0.0,
    n_samples: int = 201,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    initial: np.ndarray | None = None,
) -> LindbladResult:
    """Integrate the master equation and sample the state.

    omega_s / omega_c are bare Rabi envelopes in rad/s (None means
    off).  The atom starts in the populated ground level unless an
    explicit 12x12 density matrix is given.
    """
    if t_span[1] <= t_span[0]:
        raise DomainError("t_span must be increasing")
    if n_samples < 2:
        raise DomainError("n_samples must be at least 2")
    omega_s = omega_s or _zero
    omega_c = omega_c or _zero

    g_name, e_name, s_name = species.ladder
    man_g, man_e, man_s = (species.manifold(n) for n in (g_name, e_name, s_name))
    lower, upper = species.ladder_transitions
    I = species.nuclear_spin
    Fg = species.memory_ground_F

    labels = (
        [(g_name, lv.F) for lv in man_g.levels]
        + [(e_name, lv.F) for lv in man_e.levels]
        + [(s_name, lv.F) for lv in man_s.levels]
    )
    n = len(labels)
    ig = {lv.F: i for i, lv in enumerate(man_g.levels)}
    ie = {lv.F: len(man_g.levels) + i for i, lv in enumerate(man_e.levels)}
    i_s = {lv.F: len(man_g.levels) + len(man_e.levels) + i for i, lv in enumerate(man_s.levels)}

    k_s = lower.wavenumber
    k_r = k_s - upper.wavenumber if geometry == "counter" else k_s + upper.wavenumber
    if geometry not in ("counter", "co"):
        raise DomainError(f"geometry must be 'counter' or 'co', got {geometry!r}")

    # Energy zero sits on the populated ground level; one- and two-photon
    # detunings are referenced so the effective level shifts read
    # detuning + w_e and two_photon_detuning + w_s.
    diag = np.zeros(n)
    g0 = man_g.level(Fg).offset
    for lv in man_g.levels:
        diag[ig[lv.F]] = lv.offset - g0
    for lv in man_e.levels:
        diag[ie[lv.F]] = detuning + lv.offset + k_s * velocity
    for lv in man_s.levels:
        diag[i_s[lv.F]] = two_photon_detuning + lv.offset + k_r * velocity

    # coupling patterns (dimensionless), scaled by the envelopes at runtime
    C_ge = np.zeros((n, n))
    for lg in man_g.levels:
        for le in man_e.levels:
            w = relative_line_strength(lg.F, le.F, man_g.J, man_e.J, I)
            if w:
                C_ge[ie[le.F], ig[lg.F]] = w
    C_es = np.zeros((n, n))
    for le in man_e.levels:
        for ls in man_s.levels:
            w = relative_line_strength(le.F, ls.F, man_e.J, man_s.J, I)
            if w:
                C_es[i_s[ls.F], ie[le.F]] = w

    # Lindblad jumps: every collapse operator is sqrt(rate) |lower><upper|,
    # so sum_k L rho L^dag only feeds populations.  feed[l, u] holds the
    # total rate u -> l; decay_diag the total loss rate per level.
    feed = np.zeros((n, n))
    for le in man_e.levels:
        for lg in man_g.levels:
            rate = man_e.linewidth * decay_branching(le.F, lg.F, man_e.J, man_g.J, I)
            feed[ig[lg.F], ie[le.F]] += rate
    for ls in man_s.levels:
        for le in man_e.levels:
            rate = man_s.linewidth * decay_branching(ls.F, le.F, man_s.J, man_e.J, I)
            feed[ie[le.F], i_s[ls.F]] += rate
    decay_diag = feed.sum(axis=0)

    if initial is None:
        rho0 = np.zeros((n, n), dtype=complex)
        rho0[ig[Fg], ig[Fg]] = 1.0
    else:
        rho0 = np.asarray(initial, dtype=complex)
        if rho0.shape != (n, n):
            raise DomainError(f"initial state must be {n}x{n}")
        if abs(np.trace(rho0) - 1.0) > 1e-9:
            raise DomainError("initial state must have unit trace")

    H0 = np.diag(diag.astype(complex))

    def rhs(t, y):
        rho = y.reshape(n, n)
        off = 0.5 * (omega_s(t) * C_ge + omega_c(t) * C_es)
        H = H0 + off + off.conj().T
        drho = -1j * (H @ rho - rho @ H)
        drho -= 0.5 * (decay_diag[:, None] + decay_diag[None, :]) * rho
        drho[np.diag_indices(n)] += feed @ rho.diagonal()
        return drho.reshape(-1)

    times = np.linspace(t_span[0], t_span[1], n_samples)
    sol = solve_ivp(
        rhs,
        t_span,
        rho0.reshape(-1),
        t_eval=times,
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise SolverInstabilityError(
            f"master-equation integration failed: {sol.message}",
            diagnostics={"status": sol.status},
        )
    rho_t = sol.y.T.reshape(-1, n, n)
    pops = np.real(np.einsum("tii->ti", rho_t))
    trace_error = float(np.max(np.abs(pops.sum(axis=1) - 1.0)))
    return LindbladResult(
        times=times,
        labels=tuple(labels),
        populations=pops,
        coherences=rho_t,
        trace_error=trace_error,
    )
