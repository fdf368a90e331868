"""Numerical grid and hyperfine path selection for the propagation solver.

Stability: the time stepper is classical RK4, whose stability region
crosses the imaginary axis at |lambda| dt = 2*sqrt(2).  The stiffest
retained mode rotates at the one-photon detuning plus the largest
hyperfine offset plus the largest Doppler shift, so the solver refuses
to run unless

    (|detuning| + max offset + k_s v_max + Gamma_e/2) * dt <= 2.5,

keeping a margin below the exact bound.  Accuracy is usually the
tighter constraint; the defaults resolve one optical-detuning period
with ~40 steps and pass a halving test well inside 0.5%.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigurationError, DomainError
from ..atomphys.species import SpeciesRecord
from ..atomphys.thermal import ThermalEnsemble, velocity_quadrature
from ..atomphys.angular import relative_line_strength

__all__ = ["HyperfinePath", "SolverGrid", "hyperfine_paths", "make_grid"]

RK4_IMAG_STABILITY = 2.5  # enforced |lambda| dt bound (exact limit 2*sqrt(2))


@dataclass(frozen=True)
class HyperfinePath:
    """One ladder chain ground F -> intermediate F -> storage F."""

    F_g: float
    F_e: float
    F_s: float


@dataclass(frozen=True)
class SolverGrid:
    """Discretization of one propagation run.

    n_z spatial intervals (n_z + 1 nodes), fixed time step dt, a list
    of (velocity, weight) quadrature nodes, and the retained hyperfine
    paths.  window_halfwidth sets the half width of each stage's time
    window around its pulse centers; None picks 3x the widest pulse
    FWHM, where a Gaussian envelope is below 4e-6 of its peak.
    splitting_scale multiplies every hyperfine offset (0 collapses the
    manifolds to their centroids).
    """

    velocities: tuple[tuple[float, float], ...]
    paths: tuple[HyperfinePath, ...]
    n_z: int = 32
    dt: float = 4.0e-12
    window_halfwidth: float | None = None
    splitting_scale: float = 1.0

    def __post_init__(self):
        if self.n_z < 2:
            raise ConfigurationError("n_z must be at least 2")
        if self.dt <= 0:
            raise ConfigurationError("dt must be positive")
        if not self.velocities:
            raise ConfigurationError("velocity quadrature must not be empty")
        if not self.paths:
            raise ConfigurationError("at least one hyperfine path is required")
        if self.window_halfwidth is not None and self.window_halfwidth <= 0:
            raise ConfigurationError("window_halfwidth must be positive")


def hyperfine_paths(species: SpeciesRecord, pumped: bool = False) -> tuple[HyperfinePath, ...]:
    """Dipole-allowed ladder chains out of the populated ground level.

    pumped=True keeps only the stretch chain F_g -> F_g+1 -> F_g+2,
    the situation prepared by optical pumping to the edge state where
    no other route interferes.
    """
    g_name, e_name, s_name = species.ladder
    Fg = species.memory_ground_F
    man_e, man_s = species.manifold(e_name), species.manifold(s_name)
    I = species.nuclear_spin
    if pumped:
        path = HyperfinePath(Fg, Fg + 1, Fg + 2)
        for man, F in ((man_e, path.F_e), (man_s, path.F_s)):
            man.level(F)  # raises if the stretch levels do not exist
        return (path,)
    paths = []
    for le in man_e.levels:
        if relative_line_strength(Fg, le.F, species.manifold(g_name).J, man_e.J, I) == 0.0:
            continue
        for ls in man_s.levels:
            if relative_line_strength(le.F, ls.F, man_e.J, man_s.J, I) == 0.0:
                continue
            paths.append(HyperfinePath(Fg, le.F, ls.F))
    return tuple(paths)


def make_grid(
    species: SpeciesRecord,
    ensemble: ThermalEnsemble,
    *,
    n_z: int = 32,
    dt: float = 4.0e-12,
    n_velocity: int = 24,
    pumped: bool = False,
    window_halfwidth: float | None = None,
    splitting_scale: float = 1.0,
) -> SolverGrid:
    """Convenience builder wiring the quadrature and paths to a grid."""
    if n_velocity < 1:
        raise DomainError("n_velocity must be >= 1")
    return SolverGrid(
        velocities=tuple(velocity_quadrature(ensemble, n_velocity)),
        paths=hyperfine_paths(species, pumped=pumped),
        n_z=n_z,
        dt=dt,
        window_halfwidth=window_halfwidth,
        splitting_scale=splitting_scale,
    )
