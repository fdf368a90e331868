"""Maxwell-Bloch storage / retrieval solver."""

from .schedule import (
    SignalPulse,
    ControlPulse,
    ProtocolSchedule,
    Calibration,
    ControlEnvelope,
    build_control_envelope,
)
from .grid import HyperfinePath, SolverGrid, hyperfine_paths, make_grid
from .state import CouplingSet, EnsembleState, MemoryResult
from .propagate import (propagate_storage, evolve_dark, propagate_retrieval,
                        build_couplings, group_delay)
from .curves import (
    LifetimeCurve,
    EfficiencyPoint,
    LifetimeFit,
    lifetime_curve,
    efficiency_vs_energy,
    fit_lifetime,
)

__all__ = [
    "SignalPulse",
    "ControlPulse",
    "ProtocolSchedule",
    "Calibration",
    "ControlEnvelope",
    "build_control_envelope",
    "HyperfinePath",
    "SolverGrid",
    "hyperfine_paths",
    "make_grid",
    "CouplingSet",
    "EnsembleState",
    "MemoryResult",
    "propagate_storage",
    "evolve_dark",
    "propagate_retrieval",
    "build_couplings",
    "LifetimeCurve",
    "EfficiencyPoint",
    "LifetimeFit",
    "lifetime_curve",
    "efficiency_vs_energy",
    "fit_lifetime",
]
