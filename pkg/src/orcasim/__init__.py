"""Simulation and analysis toolkit for a broadband atomic-cascade optical memory.

Subpackages
-----------
atomphys
    Species constants, hyperfine structure, thermal ensembles and
    linear absorption.
mbsolver
    Maxwell-Bloch storage / retrieval integrator and derived curves
    (lifetime, efficiency versus pulse energy).
analytic
    Closed-form references: motional dephasing, hyperfine beat
    envelopes, noise metrics and a single-atom master equation.
photonstats
    Detector-event simulation, histograms, gated correlation
    estimators and exact counting oracles.
cli
    Command-line front end (``orcasim``).
"""

__version__ = "0.1.0"
