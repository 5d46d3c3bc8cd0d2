"""Quantum walks of two interacting bosons on a one-dimensional lattice.

The package covers exact two-particle dynamics of the Bose-Hubbard chain,
density and pair-correlation observables, the two-body spectrum, free boson,
free fermion and hard-core references, and the classical nonlinear-lattice
(thermal light) analogue.
"""

__version__ = "0.1.0"

from .errors import ConfigurationError, NumericalError, UsageError
from .lattice import (
    LatticeSpec,
    PairBasis,
    TwoParticleState,
    build_basis,
    build_hamiltonian,
    initial_state,
)
from .propagation import EvolutionSpec, eigensystem, evolve
from .observables import (
    CorrelationMatrix,
    bunching_ratio,
    correlation,
    correlation_fluctuation,
    density,
    diagonal_weight,
    participation_ratio,
)
from .spectrum import SpectrumResult, band_gap, classify_bound, full_spectrum, pair_wavefunction
from .reference import boson_correlation_u0, fermion_correlation, hardcore_evolve, propagator
from .classical import (
    EnsembleSpec,
    dnls_evolve,
    quantum_classical_distance,
    thermal_ensemble_correlation,
)
from .pipeline import SweepPoint, WalkResult, density_evolution, distance_sweep, run_walk

__all__ = [
    "LatticeSpec",
    "PairBasis",
    "TwoParticleState",
    "build_basis",
    "build_hamiltonian",
    "initial_state",
    "CorrelationMatrix",
    "bunching_ratio",
    "correlation",
    "correlation_fluctuation",
    "density",
    "diagonal_weight",
    "participation_ratio",
    "EnsembleSpec",
    "dnls_evolve",
    "quantum_classical_distance",
    "thermal_ensemble_correlation",
    "ConfigurationError",
    "NumericalError",
    "UsageError",
    "EvolutionSpec",
    "eigensystem",
    "evolve",
    "SpectrumResult",
    "band_gap",
    "classify_bound",
    "full_spectrum",
    "pair_wavefunction",
    "boson_correlation_u0",
    "fermion_correlation",
    "hardcore_evolve",
    "propagator",
    "SweepPoint",
    "WalkResult",
    "density_evolution",
    "distance_sweep",
    "run_walk",
]
